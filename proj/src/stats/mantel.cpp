#include "iclscope/stats/mantel.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <numeric>

#include "iclscope/error.hpp"
#include "iclscope/rng.hpp"

namespace iclscope::stats {

namespace {

// Ties between a permuted and the observed statistic are counted as
// "at least as extreme" up to this tolerance.
constexpr double kTieTolerance = 1e-12;

void require_square_pair(const Eigen::MatrixXd& M, const Eigen::MatrixXd& H) {
  if (M.rows() != M.cols() || H.rows() != H.cols() || M.rows() != H.rows()) {
    throw Error(ErrorCode::kOrderMismatch, "Mantel test needs square matrices of equal order");
  }
  if (M.rows() < 4) throw Error(ErrorCode::kTooFewSamples, "Mantel test needs order >= 4");
}

// Replaces matrix entries by the ranks of their upper-triangle values, so a
// permuted rank matrix is the rank matrix of the permuted input.
Eigen::MatrixXd rank_matrix(const Eigen::MatrixXd& m) {
  const auto tri = upper_triangle(m);
  const auto ranks = average_ranks(tri);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      out(i, j) = ranks[k];
      out(j, i) = ranks[k];
      ++k;
    }
  }
  return out;
}

class PermutationCorrelator {
 public:
  PermutationCorrelator(const Eigen::MatrixXd& M, const Eigen::MatrixXd& H, CorrelationMethod method)
      : x_(method == CorrelationMethod::kSpearman ? rank_matrix(M) : M),
        y_(method == CorrelationMethod::kSpearman ? rank_matrix(H) : H) {
    const auto xs = upper_triangle(x_);
    const auto ys = upper_triangle(y_);
    x_mean_ = mean(xs);
    y_mean_ = mean(ys);
    double sxx = 0.0, syy = 0.0;
    for (double v : xs) sxx += (v - x_mean_) * (v - x_mean_);
    for (double v : ys) syy += (v - y_mean_) * (v - y_mean_);
    if (syy == 0.0) throw Error(ErrorCode::kDegenerateHypothesis, "hypothesis is constant off-diagonal");
    if (sxx == 0.0) throw Error(ErrorCode::kConstantInput, "similarity matrix is constant off-diagonal");
    norm_ = std::sqrt(sxx * syy);
  }

  // Correlation of x with y permuted jointly over rows and columns.
  double operator()(const std::vector<std::size_t>& perm) const {
    const auto m = static_cast<std::size_t>(x_.rows());
    double cross = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto pi = static_cast<Eigen::Index>(perm[i]);
      for (std::size_t j = i + 1; j < m; ++j) {
        cross += (x_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - x_mean_) *
                 (y_(pi, static_cast<Eigen::Index>(perm[j])) - y_mean_);
      }
    }
    return std::clamp(cross / norm_, -1.0, 1.0);
  }

 private:
  Eigen::MatrixXd x_;
  Eigen::MatrixXd y_;
  double x_mean_ = 0.0;
  double y_mean_ = 0.0;
  double norm_ = 1.0;
};

}  // namespace

const char* to_string(CorrelationMethod method) {
  return method == CorrelationMethod::kSpearman ? "spearman" : "pearson";
}

CorrelationMethod parse_correlation_method(const std::string& text) {
  if (text == "pearson") return CorrelationMethod::kPearson;
  if (text == "spearman") return CorrelationMethod::kSpearman;
  throw Error(ErrorCode::kInvalidArgument, "unknown correlation method '" + text + "'");
}

std::vector<double> upper_triangle(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.rows() * (m.rows() - 1) / 2));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) out.push_back(m(i, j));
  }
  return out;
}

std::vector<std::size_t> mantel_permutation(std::size_t m, std::uint64_t seed, std::size_t index) {
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed, index);
  rng.shuffle(std::span<std::size_t>(perm));
  return perm;
}

TestResult mantel_with_permutations(const Eigen::MatrixXd& M, const Eigen::MatrixXd& H,
                                    const std::vector<std::vector<std::size_t>>& permutations,
                                    CorrelationMethod method) {
  require_square_pair(M, H);
  const PermutationCorrelator corr(M, H, method);
  std::vector<std::size_t> identity(static_cast<std::size_t>(M.rows()));
  std::iota(identity.begin(), identity.end(), 0);
  const double observed = corr(identity);

  std::size_t at_least = 0;
  for (const auto& perm : permutations) {
    if (perm.size() != identity.size()) {
      throw Error(ErrorCode::kInvalidArgument, "permutation length differs from matrix order");
    }
    if (corr(perm) >= observed - kTieTolerance) ++at_least;
  }
  TestResult r;
  r.method = std::string("mantel_") + to_string(method);
  r.statistic = observed;
  r.n = permutations.size();
  r.p_value = static_cast<double>(1 + at_least) / static_cast<double>(permutations.size() + 1);
  return r;
}

TestResult mantel(const Eigen::MatrixXd& M, const Eigen::MatrixXd& H, std::size_t n_perm,
                  CorrelationMethod method, std::uint64_t seed) {
  require_square_pair(M, H);
  const PermutationCorrelator corr(M, H, method);
  const auto m = static_cast<std::size_t>(M.rows());
  std::vector<std::size_t> identity(m);
  std::iota(identity.begin(), identity.end(), 0);
  const double observed = corr(identity);

  std::size_t at_least = 0;
  for (std::size_t k = 0; k < n_perm; ++k) {
    if (corr(mantel_permutation(m, seed, k)) >= observed - kTieTolerance) ++at_least;
  }
  TestResult r;
  r.method = std::string("mantel_") + to_string(method);
  r.statistic = observed;
  r.n = n_perm;
  r.p_value = static_cast<double>(1 + at_least) / static_cast<double>(n_perm + 1);
  return r;
}

}  // namespace iclscope::stats
