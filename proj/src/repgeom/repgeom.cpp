#include "iclscope/repgeom/repgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "iclscope/error.hpp"
#include "iclscope/stats/tests.hpp"
#include "iclscope/tensorstore/spans.hpp"

namespace iclscope::repgeom {

namespace ts = iclscope::tensorstore;

Pooling parse_pooling(const std::string& text) {
  if (text == "max") return Pooling::kMax;
  if (text == "mean") return Pooling::kMean;
  throw Error(ErrorCode::kInvalidArgument, "unknown pooling '" + text + "'");
}

const char* to_string(Pooling pooling) { return pooling == Pooling::kMean ? "mean" : "max"; }

std::string TokenSelection::describe() const {
  switch (kind) {
    case Kind::kAllPromptTokens: return "all";
    case Kind::kSegment: return "segment:" + role;
    case Kind::kLastSegment: return "last:" + role;
  }
  return "all";
}

TokenSelection parse_selection(const std::string& text) {
  if (text == "all") return TokenSelection::all_prompt_tokens();
  if (text.starts_with("segment:")) return TokenSelection::segment(text.substr(8));
  if (text.starts_with("last:")) return TokenSelection::last_segment(text.substr(5));
  throw Error(ErrorCode::kInvalidArgument, "unknown token selection '" + text + "'");
}

std::vector<std::size_t> resolve_selection(const ts::PromptRecord& record,
                                           const TokenSelection& selection, std::size_t n_rows) {
  std::vector<std::size_t> rows;
  switch (selection.kind) {
    case TokenSelection::Kind::kAllPromptTokens:
      rows = ts::prompt_token_indices(record);
      break;
    case TokenSelection::Kind::kSegment:
      rows = ts::resolve_role(record, selection.role);
      break;
    case TokenSelection::Kind::kLastSegment: {
      const auto& intervals = ts::segment_intervals(record, selection.role);
      if (intervals.empty()) break;
      const ts::Interval last = *std::max_element(
          intervals.begin(), intervals.end(),
          [](const ts::Interval& a, const ts::Interval& b) { return a.start < b.start; });
      rows = ts::tokens_overlapping(record, std::span<const ts::Interval>(&last, 1));
      break;
    }
  }
  if (rows.empty()) {
    throw Error(ErrorCode::kEmptySelection,
                "selection '" + selection.describe() + "' is empty for record '" + record.id + "'");
  }
  if (rows.back() >= n_rows) {
    throw Error(ErrorCode::kInvalidArgument, "selection '" + selection.describe() + "' for record '" +
                                                 record.id + "' includes tokens without embeddings");
  }
  return rows;
}

Eigen::VectorXd pool_rows(const ts::EmbeddingBlock& block, std::span<const std::size_t> rows,
                          Pooling method) {
  if (rows.empty()) throw Error(ErrorCode::kEmptySelection, "no token rows to pool");
  const auto d = static_cast<Eigen::Index>(block.dim);
  Eigen::VectorXd out(d);
  if (method == Pooling::kMax) {
    out.setConstant(-std::numeric_limits<double>::infinity());
    for (std::size_t r : rows) {
      for (Eigen::Index j = 0; j < d; ++j) {
        out(j) = std::max(out(j), static_cast<double>(block.at(r, static_cast<std::size_t>(j))));
      }
    }
  } else {
    out.setZero();
    for (std::size_t r : rows) {
      for (Eigen::Index j = 0; j < d; ++j) out(j) += block.at(r, static_cast<std::size_t>(j));
    }
    out /= static_cast<double>(rows.size());
  }
  return out;
}

PromptVector pool_tokens(const ts::EmbeddingBlock& block, const ts::PromptRecord& record,
                         const TokenSelection& selection, Pooling method) {
  const auto rows = resolve_selection(record, selection, block.n_tokens);
  return {record.id, block.layer, pool_rows(block, rows, method), method, selection};
}

std::vector<PromptVector> standardize(const std::vector<PromptVector>& vectors) {
  if (vectors.size() < 2) throw Error(ErrorCode::kTooFewSamples, "standardize needs at least 2 vectors");
  const Eigen::Index d = vectors.front().vector.size();
  for (const auto& v : vectors) {
    if (v.vector.size() != d) throw Error(ErrorCode::kDimensionMismatch, "vectors differ in dimension");
  }
  const double n = static_cast<double>(vectors.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& v : vectors) mean += v.vector;
  mean /= n;
  Eigen::VectorXd var = Eigen::VectorXd::Zero(d);
  for (const auto& v : vectors) var += (v.vector - mean).cwiseAbs2();
  var /= n;
  const Eigen::VectorXd scale = var.cwiseSqrt().cwiseMax(kStdFloor);

  std::vector<PromptVector> out = vectors;
  for (auto& v : out) v.vector = (v.vector - mean).cwiseQuotient(scale);
  return out;
}

std::vector<std::vector<PromptVector>> standardize_groups(
    const std::vector<std::vector<PromptVector>>& groups, bool joint) {
  std::vector<std::vector<PromptVector>> out;
  if (!joint) {
    for (const auto& g : groups) out.push_back(standardize(g));
    return out;
  }
  std::vector<PromptVector> all;
  for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
  const auto z = standardize(all);
  std::size_t k = 0;
  for (const auto& g : groups) {
    out.emplace_back(z.begin() + static_cast<std::ptrdiff_t>(k),
                     z.begin() + static_cast<std::ptrdiff_t>(k + g.size()));
    k += g.size();
  }
  return out;
}

SimilarityMatrix cosine_similarity_matrix(const std::vector<PromptVector>& vectors) {
  const auto m = static_cast<Eigen::Index>(vectors.size());
  SimilarityMatrix out;
  out.values = Eigen::MatrixXd::Identity(m, m);
  std::vector<double> norms;
  for (const auto& v : vectors) {
    const double norm = v.vector.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorCode::kZeroVector, "zero vector for record '" + v.record_id + "'");
    }
    if (v.vector.size() != vectors.front().vector.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "vectors differ in dimension");
    }
    norms.push_back(norm);
    out.order.push_back(v.record_id);
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      const double c = std::clamp(vectors[ui].vector.dot(vectors[uj].vector) / (norms[ui] * norms[uj]),
                                  -1.0, 1.0);
      out.values(i, j) = c;
      out.values(j, i) = c;
    }
  }
  return out;
}

const char* to_string(HypothesisKind kind) {
  switch (kind) {
    case HypothesisKind::kLabelEquality: return "label_equality";
    case HypothesisKind::kCombined: return "combined";
    case HypothesisKind::kSuccessorRepresentation: return "successor_representation";
    case HypothesisKind::kCustom: return "custom";
  }
  return "custom";
}

HypothesisMatrix hypothesis_from_values(std::vector<std::string> order,
                                        std::span<const std::string> values) {
  if (order.size() != values.size()) {
    throw Error(ErrorCode::kOrderMismatch, "one label value per item required");
  }
  const auto m = static_cast<Eigen::Index>(values.size());
  HypothesisMatrix h;
  h.order = std::move(order);
  h.kind = HypothesisKind::kLabelEquality;
  h.values.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      h.values(i, j) = values[static_cast<std::size_t>(i)] == values[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
    }
  }
  return h;
}

HypothesisMatrix hypothesis_from_labels(std::span<const ts::PromptRecord* const> records,
                                        const std::string& label_key) {
  std::vector<std::string> order;
  std::vector<std::string> values;
  for (const auto* r : records) {
    auto v = r->label(label_key);
    if (!v) throw Error(ErrorCode::kMissingLabel, "record '" + r->id + "' lacks label '" + label_key + "'");
    order.push_back(r->id);
    values.push_back(*v);
  }
  return hypothesis_from_values(std::move(order), values);
}

HypothesisMatrix hypothesis_combined(const HypothesisMatrix& h1, const HypothesisMatrix& h2) {
  if (h1.order != h2.order) throw Error(ErrorCode::kOrderMismatch, "hypotheses have different orders");
  return {h1.order, 0.5 * (h1.values + h2.values), HypothesisKind::kCombined};
}

HypothesisMatrix hypothesis_from_matrix(std::vector<std::string> order, Eigen::MatrixXd values,
                                        HypothesisKind kind) {
  if (values.rows() != values.cols() || static_cast<std::size_t>(values.rows()) != order.size()) {
    throw Error(ErrorCode::kOrderMismatch, "hypothesis matrix shape disagrees with order");
  }
  if (!values.isApprox(values.transpose(), 1e-12) && (values - values.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "hypothesis matrix is not symmetric");
  }
  if (values.minCoeff() < 0.0 || values.maxCoeff() > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "hypothesis values must lie in [0,1]");
  }
  return {std::move(order), std::move(values), kind};
}

double hypothesis_alignment(const SimilarityMatrix& M, const HypothesisMatrix& H,
                            stats::CorrelationMethod method) {
  if (M.order != H.order) throw Error(ErrorCode::kOrderMismatch, "M and H have different record orders");
  const Eigen::Index m = M.values.rows();
  if (m < 3) throw Error(ErrorCode::kTooFewSamples, "alignment needs at least 3 items");

  std::vector<double> x, y;
  x.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
  y.reserve(x.capacity());
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      x.push_back(M.values(i, j));
      y.push_back(H.values(i, j));
    }
  }
  if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); })) {
    throw Error(ErrorCode::kDegenerateHypothesis, "hypothesis is constant off-diagonal");
  }
  if (method == stats::CorrelationMethod::kSpearman) {
    x = stats::average_ranks(x);
    y = stats::average_ranks(y);
  }
  // Single pass with running means (Welford co-moment).
  double mx = 0.0, my = 0.0, cxy = 0.0, cxx = 0.0, cyy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double n = static_cast<double>(k + 1);
    const double dx = x[k] - mx;
    const double dy = y[k] - my;
    mx += dx / n;
    my += dy / n;
    cxy += dx * (y[k] - my);
    cxx += dx * (x[k] - mx);
    cyy += dy * (y[k] - my);
  }
  if (cxx <= 0.0) throw Error(ErrorCode::kConstantInput, "similarity matrix is constant off-diagonal");
  return std::clamp(cxy / std::sqrt(cxx * cyy), -1.0, 1.0);
}

}  // namespace iclscope::repgeom
