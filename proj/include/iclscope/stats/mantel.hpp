#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "iclscope/stats/tests.hpp"

namespace iclscope::stats {

enum class CorrelationMethod { kPearson, kSpearman };

const char* to_string(CorrelationMethod method);
CorrelationMethod parse_correlation_method(const std::string& text);

inline constexpr std::size_t kDefaultPermutations = 9999;

// Strictly-upper-triangle entries in row-major order.
std::vector<double> upper_triangle(const Eigen::MatrixXd& m);

// Permutation `index` of the Mantel null for a matrix of order m. Each
// permutation owns the RNG stream derive_key(seed, index).
std::vector<std::size_t> mantel_permutation(std::size_t m, std::uint64_t seed, std::size_t index);

// One-sided Mantel test: statistic is the upper-triangle correlation of M and H,
// the null permutes H jointly over rows and columns, and
// p = (1 + #{r_perm >= r_obs}) / (n_perm + 1).
TestResult mantel(const Eigen::MatrixXd& M, const Eigen::MatrixXd& H, std::size_t n_perm,
                  CorrelationMethod method, std::uint64_t seed);

// Same test over an explicit list of permutations.
TestResult mantel_with_permutations(const Eigen::MatrixXd& M, const Eigen::MatrixXd& H,
                                    const std::vector<std::vector<std::size_t>>& permutations,
                                    CorrelationMethod method);

}  // namespace iclscope::stats
