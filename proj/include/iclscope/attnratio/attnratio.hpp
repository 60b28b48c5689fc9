#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "iclscope/stats/tests.hpp"
#include "iclscope/tensorstore/dataset.hpp"

namespace iclscope::attnratio {

enum class Aggregation { kMax, kMean };

Aggregation parse_aggregation(const std::string& text);
const char* to_string(Aggregation aggregation);

// Head-reduced attention for one record and layer; rows attend to columns.
struct AggregatedAttention {
  std::string record_id;
  int layer = 0;
  Eigen::MatrixXd matrix;
  Aggregation aggregation = Aggregation::kMax;
};

AggregatedAttention aggregate_heads(const tensorstore::AttentionBlock& block, Aggregation method);

// What a token set is resolved from.
struct SpanTarget {
  enum class Kind { kRole, kInterval, kSubstring };
  Kind kind = Kind::kRole;
  std::string text;  // role name or literal substring
  tensorstore::Interval interval;

  static SpanTarget role(std::string name) { return {Kind::kRole, std::move(name), {}}; }
  static SpanTarget chars(std::size_t start, std::size_t end) {
    return {Kind::kInterval, {}, {start, end}};
  }
  static SpanTarget substring(std::string literal) {
    return {Kind::kSubstring, std::move(literal), {}};
  }

  std::string describe() const;
};

// "<role>", "chars:<start>-<end>" or "text:<literal>".
SpanTarget parse_target(const std::string& text);

struct TokenIndexSet {
  std::string record_id;
  std::string source;
  std::vector<std::size_t> indices;  // sorted, unique

  bool empty() const { return indices.empty(); }
};

TokenIndexSet token_spans(const tensorstore::PromptRecord& record, const SpanTarget& target);

// Mean attention from rows a onto columns s over mean attention from a onto t.
double attention_ratio(const AggregatedAttention& A, const TokenIndexSet& a, const TokenIndexSet& s,
                       const TokenIndexSet& t);

struct AttentionRatioSample {
  std::string record_id;
  int layer = 0;
  double ratio = 0.0;
  bool degenerate = false;
  std::string reason;  // set when degenerate
  std::string group;
  std::map<std::string, std::string> tags;
};

struct GroupSummary {
  std::string group;
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;  // sample std (ddof 1); 0 when n < 2
};

struct PairComparison {
  std::string group_a;
  std::string group_b;
  std::optional<stats::TestResult> welch;
  std::string note;  // why `welch` is absent
};

struct AraConfig {
  std::optional<int> layer;  // last dataset layer when unset
  Aggregation aggregation = Aggregation::kMax;
  SpanTarget a = SpanTarget::role("response");
  SpanTarget s;
  SpanTarget t = SpanTarget::role("prompt");
  std::vector<std::string> group_by;  // label keys; empty puts everything in one group
};

struct AraStudy {
  int layer = 0;
  AraConfig config;
  std::vector<AttentionRatioSample> samples;
  std::vector<GroupSummary> groups;
  std::vector<PairComparison> comparisons;
  std::size_t excluded = 0;

  nlohmann::json to_json() const;
  std::string samples_csv() const;
  // Valid ratios per group, in group order.
  std::map<std::string, std::vector<double>> ratios_by_group() const;
};

// Group key built from the record's values for `keys`, e.g. "icl=1,name=Fred".
std::string group_key(const tensorstore::PromptRecord& record, const std::vector<std::string>& keys);

AraStudy ara_study(const tensorstore::Dataset& dataset, const AraConfig& config);

}  // namespace iclscope::attnratio
