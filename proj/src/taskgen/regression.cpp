#include "iclscope/taskgen/regression.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <regex>
#include <set>

#include "iclscope/error.hpp"
#include "iclscope/rng.hpp"

namespace iclscope::taskgen {

const char* to_string(RangeKind kind) {
  return kind == RangeKind::kInRange ? "in_range" : "out_of_range";
}

double round2(double value) { return std::round(value * 100.0) / 100.0; }

std::vector<LineSpec> regression_lines(std::size_t n_lines) {
  const std::size_t n_slopes = std::max<std::size_t>(1, (n_lines + 1) / 2);
  std::vector<LineSpec> lines;
  for (std::size_t l = 0; l < n_lines; ++l) {
    const std::size_t k = l / 2;
    const double slope =
        n_slopes == 1 ? 15.0 : 5.0 + 20.0 * static_cast<double>(k) / static_cast<double>(n_slopes - 1);
    lines.push_back({slope, 5.0 * static_cast<double>(l % 2), "line" + std::to_string(l)});
  }
  return lines;
}

void render_regression(RegressionPrompt& p) {
  TextBuilder b;
  b.append(kRegressionPreamble);
  for (std::size_t i = 0; i < p.example_points.size(); ++i) {
    const auto& pt = p.example_points[i];
    b.mark("examples", "(" + format_fixed(pt.x, kRegressionDecimals) + "," +
                           format_fixed(round2(pt.y), kRegressionDecimals) + ")");
    b.append("; ");
  }
  b.mark("query", "(" + format_fixed(p.x_T, kRegressionDecimals) + ",");
  p.rendered = b.text();
  p.segments = b.segments();
}

SuiteRecord RegressionPrompt::to_record() const {
  SuiteRecord r;
  r.id = id;
  r.task = "regression";
  r.prompt_text = rendered;
  r.segments = segments;
  r.labels = {{"slope", format_fixed(line.slope, 4)},
              {"intercept", format_fixed(line.intercept, 1)},
              {"line", line.id},
              {"icl_count", std::to_string(icl_count())},
              {"range_kind", to_string(range_kind)}};
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& pt : example_points) pts.push_back({pt.x, pt.y});
  r.answer = {{"y_T", y_T}, {"x_T", x_T}, {"slope", line.slope}, {"intercept", line.intercept},
              {"points", pts}};
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, y_T, std::chars_format::fixed);
  r.oracle_response = " " + std::string(buf, res.ptr) + ")";
  return r;
}

namespace {

double hundredths(std::uint64_t k) { return static_cast<double>(k) / 100.0; }

Point on_line(const LineSpec& line, double x) { return {x, line.slope * x + line.intercept}; }

}  // namespace

std::vector<RegressionPrompt> gen_regression_suite(std::size_t n_lines, std::size_t prompts_per_line,
                                                   std::uint64_t seed) {
  if (n_lines < 1 || prompts_per_line < 1) {
    throw Error(ErrorCode::kInvalidArgument, "regression suite needs n_lines >= 1 and prompts_per_line >= 1");
  }
  std::vector<RegressionPrompt> out;
  const auto lines = regression_lines(n_lines);
  for (std::size_t l = 0; l < n_lines; ++l) {
    for (std::size_t j = 0; j < prompts_per_line; ++j) {
      const std::size_t index = l * prompts_per_line + j;
      Rng rng(seed, index);
      RegressionPrompt p;
      p.id = "reg_" + std::to_string(l) + "_" + std::to_string(j);
      p.line = lines[l];
      p.range_kind = j % 2 == 0 ? RangeKind::kInRange : RangeKind::kOutOfRange;
      const std::size_t count = 2 + j % 7;
      const std::size_t draws = p.range_kind == RangeKind::kInRange ? count + 1 : count;

      std::vector<std::uint64_t> grid(100);
      std::iota(grid.begin(), grid.end(), 0);
      rng.shuffle(std::span<std::uint64_t>(grid));
      std::vector<std::uint64_t> ks(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(draws));

      if (p.range_kind == RangeKind::kInRange) {
        // x_T is one of the interior draws so it lies strictly inside the example range.
        std::vector<std::uint64_t> sorted = ks;
        std::sort(sorted.begin(), sorted.end());
        const auto pick = sorted[1 + rng.below(draws - 2)];
        p.x_T = hundredths(pick);
        ks.erase(std::find(ks.begin(), ks.end(), pick));
      } else {
        p.x_T = hundredths(200 + rng.below(101));
      }
      for (auto k : ks) p.example_points.push_back(on_line(p.line, hundredths(k)));
      p.y_T = p.line.slope * p.x_T + p.line.intercept;
      render_regression(p);
      out.push_back(std::move(p));
    }
  }
  return out;
}

double parse_numeric_response(const std::string& text) {
  static const std::regex number(R"([-+]?(\d+(\.\d*)?|\.\d+))");
  std::smatch m;
  if (!std::regex_search(text, m, number)) {
    throw Error(ErrorCode::kNoNumberFound, "no number in response");
  }
  return std::stod(m.str());
}

double score_regression(double y_T, double y_hat) { return std::abs(y_T - y_hat); }

namespace {

std::uint64_t factorial_capped(std::size_t n, std::uint64_t cap) {
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) {
    f *= i;
    if (f > cap) return cap + 1;
  }
  return f;
}

}  // namespace

std::vector<RegressionPrompt> permute_icl_examples(const RegressionPrompt& prompt, std::size_t max_perms,
                                                   std::uint64_t seed) {
  if (max_perms < 1) throw Error(ErrorCode::kInvalidArgument, "max_perms must be >= 1");
  const std::size_t n = prompt.example_points.size();
  std::vector<std::vector<std::size_t>> orders;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (factorial_capped(n, max_perms) <= max_perms) {
    do orders.push_back(order);
    while (std::next_permutation(order.begin(), order.end()));
  } else {
    std::set<std::vector<std::size_t>> seen{order};
    orders.push_back(order);
    Rng rng(seed, fnv1a64(prompt.id));
    while (orders.size() < max_perms) {
      rng.shuffle(std::span<std::size_t>(order));
      if (seen.insert(order).second) orders.push_back(order);
    }
  }
  std::vector<RegressionPrompt> out;
  for (std::size_t k = 0; k < orders.size(); ++k) {
    RegressionPrompt v = prompt;
    v.id = prompt.id + "_p" + std::to_string(k);
    for (std::size_t i = 0; i < n; ++i) v.example_points[i] = prompt.example_points[orders[k][i]];
    render_regression(v);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace iclscope::taskgen
