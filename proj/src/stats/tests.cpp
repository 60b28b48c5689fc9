#include "iclscope/stats/tests.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "iclscope/error.hpp"
#include "iclscope/stats/distributions.hpp"

namespace iclscope::stats {

namespace {

double clamp_unit(double p) { return std::clamp(p, 0.0, 1.0); }

void require_paired(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kInvalidArgument, "correlation inputs differ in length");
  }
  if (x.size() < 3) {
    throw Error(ErrorCode::kTooFewSamples, "correlation needs at least 3 pairs");
  }
}

}  // namespace

nlohmann::json TestResult::to_json() const {
  nlohmann::json j{{"method", method}, {"statistic", statistic}, {"p_value", p_value}};
  if (df) j["df"] = *df;
  if (df2) j["df2"] = *df2;
  if (n) j["n"] = *n;
  return j;
}

double mean(std::span<const double> x) {
  if (x.empty()) throw Error(ErrorCode::kTooFewSamples, "mean of empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x, int ddof) {
  if (x.size() <= static_cast<std::size_t>(ddof)) {
    throw Error(ErrorCode::kTooFewSamples, "variance needs more samples than ddof");
  }
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - static_cast<std::size_t>(ddof));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  require_paired(x, y);
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::kConstantInput, "correlation of a constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  require_paired(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

TestResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorCode::kTooFewSamples, "Welch t test needs at least 2 samples per group");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = variance(a) / na;
  const double vb = variance(b) / nb;
  if (va + vb == 0.0) {
    throw Error(ErrorCode::kConstantInput, "Welch t test needs positive variance in a sample");
  }
  const double t = (mean(a) - mean(b)) / std::sqrt(va + vb);
  const double df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  TestResult r;
  r.method = "welch_t";
  r.statistic = t;
  r.df = df;
  r.n = a.size() + b.size();
  r.p_value = clamp_unit(2.0 * student_t_cdf(-std::abs(t), df));
  return r;
}

TestResult fisher_z_compare(double r1, std::size_t n1, double r2, std::size_t n2) {
  if (!(std::abs(r1) < 1.0) || !(std::abs(r2) < 1.0)) {
    throw Error(ErrorCode::kDegenerateCorrelation, "Fisher z needs |r| < 1");
  }
  if (n1 <= 3 || n2 <= 3) {
    throw Error(ErrorCode::kTooFewSamples, "Fisher z needs n > 3 for both correlations");
  }
  const double se = std::sqrt(1.0 / static_cast<double>(n1 - 3) + 1.0 / static_cast<double>(n2 - 3));
  TestResult r;
  r.method = "fisher_z";
  r.statistic = (std::atanh(r1) - std::atanh(r2)) / se;
  r.p_value = clamp_unit(std::erfc(std::abs(r.statistic) / std::sqrt(2.0)));
  r.n = n1 + n2;
  return r;
}

TestResult anova_oneway(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw Error(ErrorCode::kTooFewGroups, "ANOVA needs at least 2 groups");
  std::size_t total = 0;
  double grand = 0.0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw Error(ErrorCode::kTooFewSamples, "ANOVA needs at least 2 samples per group");
    total += g.size();
    grand += std::accumulate(g.begin(), g.end(), 0.0);
  }
  grand /= static_cast<double>(total);
  double ss_between = 0.0, ss_within = 0.0;
  for (const auto& g : groups) {
    const double m = mean(g);
    ss_between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double v : g) ss_within += (v - m) * (v - m);
  }
  const double df1 = static_cast<double>(groups.size() - 1);
  const double df2 = static_cast<double>(total - groups.size());
  TestResult r;
  r.method = "anova_oneway";
  r.df = df1;
  r.df2 = df2;
  r.n = total;
  // All values identical within and across groups: F = 0, p = 1 by convention.
  constexpr double kTiny = 1e-12;
  const double scale = std::max(1.0, grand * grand) * static_cast<double>(total);
  if (ss_within <= kTiny * scale) {
    if (ss_between <= kTiny * scale) {
      r.statistic = 0.0;
      r.p_value = 1.0;
      return r;
    }
    throw Error(ErrorCode::kConstantInput, "ANOVA with zero within-group variance and distinct means");
  }
  r.statistic = (ss_between / df1) / (ss_within / df2);
  r.p_value = clamp_unit(f_sf(r.statistic, df1, df2));
  return r;
}

TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kTooFewSamples, "KS test needs nonempty samples");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  TestResult r;
  r.method = "ks_two_sample";
  r.statistic = d;
  r.n = sa.size() + sb.size();
  const double en = std::sqrt(na * nb / (na + nb));
  r.p_value = clamp_unit(kolmogorov_sf(en * d));
  return r;
}

}  // namespace iclscope::stats
