#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "iclscope/taskgen/suite.hpp"

namespace iclscope::taskgen {

struct LineSpec {
  double slope = 1.0;
  double intercept = 0.0;
  std::string id;
};

enum class RangeKind { kInRange, kOutOfRange };
const char* to_string(RangeKind kind);

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct RegressionPrompt {
  std::string id;
  LineSpec line;
  std::vector<Point> example_points;
  double x_T = 0.0;
  double y_T = 0.0;
  RangeKind range_kind = RangeKind::kInRange;
  std::string rendered;
  SegmentMap segments;

  std::size_t icl_count() const { return example_points.size() - 2; }
  SuiteRecord to_record() const;
};

inline constexpr int kRegressionDecimals = 2;
inline constexpr const char* kRegressionPreamble =
    "Here are a set of point coordinates that all fall on the same line: ";

// Rounds half away from zero to 2 decimals.
double round2(double value);

// The fixture lines: slopes evenly spaced in [5,25], intercepts alternating 0 and 5.
std::vector<LineSpec> regression_lines(std::size_t n_lines);

// Re-renders text and segments from the prompt's points.
void render_regression(RegressionPrompt& prompt);

std::vector<RegressionPrompt> gen_regression_suite(std::size_t n_lines, std::size_t prompts_per_line,
                                                   std::uint64_t seed);

// First decimal number in text (optional sign and fraction). Throws NoNumberFound.
double parse_numeric_response(const std::string& text);

double score_regression(double y_T, double y_hat);

// Distinct orderings of the example points, the original first.
std::vector<RegressionPrompt> permute_icl_examples(const RegressionPrompt& prompt, std::size_t max_perms,
                                                   std::uint64_t seed);

}  // namespace iclscope::taskgen
