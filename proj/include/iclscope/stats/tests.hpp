#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace iclscope::stats {

struct TestResult {
  std::string method;
  double statistic = 0.0;
  double p_value = 1.0;
  std::optional<double> df;   // t: Welch-Satterthwaite df; F: between-groups df
  std::optional<double> df2;  // F: within-groups df
  std::optional<std::size_t> n;

  nlohmann::json to_json() const;
};

double mean(std::span<const double> x);
// Sample variance with `ddof` subtracted from the denominator.
double variance(std::span<const double> x, int ddof = 1);

double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);

// 1-based ranks, ties receive the average of the ranks they span.
std::vector<double> average_ranks(std::span<const double> x);

// Unequal-variance two-sample t test, two-sided.
TestResult welch_t_test(std::span<const double> a, std::span<const double> b);

// Compares two independent correlations via atanh; two-sided normal p.
TestResult fisher_z_compare(double r1, std::size_t n1, double r2, std::size_t n2);

TestResult anova_oneway(const std::vector<std::vector<double>>& groups);

// Two-sample Kolmogorov-Smirnov with asymptotic p-value.
TestResult ks_two_sample(std::span<const double> a, std::span<const double> b);

}  // namespace iclscope::stats
