#include "iclscope/attnratio/attnratio.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "iclscope/error.hpp"
#include "iclscope/tensorstore/spans.hpp"
#include "iclscope/text.hpp"

namespace iclscope::attnratio {

namespace ts = iclscope::tensorstore;

Aggregation parse_aggregation(const std::string& text) {
  if (text == "max") return Aggregation::kMax;
  if (text == "mean") return Aggregation::kMean;
  throw Error(ErrorCode::kInvalidArgument, "unknown aggregation '" + text + "'");
}

const char* to_string(Aggregation aggregation) {
  return aggregation == Aggregation::kMean ? "mean" : "max";
}

AggregatedAttention aggregate_heads(const ts::AttentionBlock& block, Aggregation method) {
  if (block.heads == 0) throw Error(ErrorCode::kInvalidArgument, "attention block has no heads");
  const auto n = static_cast<Eigen::Index>(block.n);
  AggregatedAttention out{block.record_id, block.layer, Eigen::MatrixXd(n, n), method};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      double acc = block.at(0, ui, uj);
      for (std::size_t h = 1; h < block.heads; ++h) {
        const double v = block.at(h, ui, uj);
        acc = method == Aggregation::kMax ? std::max(acc, v) : acc + v;
      }
      out.matrix(i, j) = method == Aggregation::kMax ? acc : acc / static_cast<double>(block.heads);
    }
  }
  return out;
}

std::string SpanTarget::describe() const {
  switch (kind) {
    case Kind::kRole: return text;
    case Kind::kInterval:
      return "chars:" + std::to_string(interval.start) + "-" + std::to_string(interval.end);
    case Kind::kSubstring: return "text:" + text;
  }
  return text;
}

SpanTarget parse_target(const std::string& text) {
  if (text.starts_with("text:")) {
    if (text.size() == 5) throw Error(ErrorCode::kInvalidArgument, "empty substring target");
    return SpanTarget::substring(text.substr(5));
  }
  if (text.starts_with("chars:")) {
    const std::string body = text.substr(6);
    const auto dash = body.find('-');
    try {
      if (dash == std::string::npos) throw std::invalid_argument("no dash");
      std::size_t used = 0;
      const auto start = std::stoull(body.substr(0, dash), &used);
      if (used != dash) throw std::invalid_argument("trailing");
      const std::string tail = body.substr(dash + 1);
      const auto end = std::stoull(tail, &used);
      if (used != tail.size() || end < start) throw std::invalid_argument("bad end");
      return SpanTarget::chars(start, end);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kInvalidArgument, "malformed interval target '" + text + "'");
    }
  }
  if (text.empty()) throw Error(ErrorCode::kInvalidArgument, "empty span target");
  return SpanTarget::role(text);
}

namespace {

ts::Interval unique_occurrence(const ts::PromptRecord& record, const std::string& literal) {
  const std::string x = record.full_text();
  const auto first = x.find(literal);
  if (first == std::string::npos) {
    throw Error(ErrorCode::kSubstringNotFound,
                "'" + literal + "' does not occur in record '" + record.id + "'");
  }
  // Overlapping occurrences count as distinct.
  if (x.find(literal, first + 1) != std::string::npos) {
    throw Error(ErrorCode::kAmbiguousSubstring,
                "'" + literal + "' occurs more than once in record '" + record.id + "'");
  }
  const std::size_t start = text::codepoint_index(x, first);
  return {start, start + text::codepoint_length(literal)};
}

}  // namespace

TokenIndexSet token_spans(const ts::PromptRecord& record, const SpanTarget& target) {
  TokenIndexSet out{record.id, target.describe(), {}};
  switch (target.kind) {
    case SpanTarget::Kind::kRole:
      out.indices = ts::resolve_role(record, target.text);
      break;
    case SpanTarget::Kind::kInterval:
      out.indices = ts::tokens_overlapping(record, std::span<const ts::Interval>(&target.interval, 1));
      break;
    case SpanTarget::Kind::kSubstring: {
      const ts::Interval where = unique_occurrence(record, target.text);
      out.indices = ts::tokens_overlapping(record, std::span<const ts::Interval>(&where, 1));
      break;
    }
  }
  return out;
}

double attention_ratio(const AggregatedAttention& A, const TokenIndexSet& a, const TokenIndexSet& s,
                       const TokenIndexSet& t) {
  const auto n = static_cast<std::size_t>(A.matrix.rows());
  for (const auto* set : {&a, &s, &t}) {
    if (set->empty()) throw Error(ErrorCode::kEmptySet, "token set '" + set->source + "' is empty");
    if (set->indices.back() >= n) {
      throw Error(ErrorCode::kInvalidArgument,
                  "token set '" + set->source + "' exceeds attention size " + std::to_string(n));
    }
  }
  auto mass = [&](const TokenIndexSet& cols) {
    double sum = 0.0;
    for (std::size_t i : a.indices) {
      for (std::size_t j : cols.indices) {
        sum += A.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
    return sum / static_cast<double>(cols.indices.size());
  };
  const double denominator = mass(t);
  if (!(denominator > 0.0)) {
    throw Error(ErrorCode::kZeroDenominator,
                "no attention from '" + a.source + "' to '" + t.source + "' in record '" + A.record_id + "'");
  }
  return mass(s) / denominator;
}

std::string group_key(const ts::PromptRecord& record, const std::vector<std::string>& keys) {
  if (keys.empty()) return "all";
  std::string out;
  for (const auto& key : keys) {
    const auto value = record.label(key);
    if (!value) {
      throw Error(ErrorCode::kMissingLabel, "record '" + record.id + "' lacks label '" + key + "'");
    }
    if (!out.empty()) out += ',';
    out += key + "=" + *value;
  }
  return out;
}

std::map<std::string, std::vector<double>> AraStudy::ratios_by_group() const {
  std::map<std::string, std::vector<double>> out;
  for (const auto& g : groups) out[g.group];
  for (const auto& s : samples) {
    if (!s.degenerate) out[s.group].push_back(s.ratio);
  }
  return out;
}

AraStudy ara_study(const ts::Dataset& dataset, const AraConfig& config) {
  AraStudy study;
  study.config = config;
  if (config.layer) {
    study.layer = *config.layer;
  } else {
    const auto layers = dataset.layers();
    if (layers.empty()) throw Error(ErrorCode::kNoAttentionAtLayer, "dataset has no layers");
    study.layer = layers.back();
  }

  std::set<std::string> group_names;
  for (const auto& record : dataset.records) {
    const ts::AttentionBlock* block = dataset.attention_at(record.id, study.layer);
    if (!block) {
      throw Error(ErrorCode::kNoAttentionAtLayer, "record '" + record.id + "' has no attention at layer " +
                                                       std::to_string(study.layer));
    }
    AttentionRatioSample sample{record.id, study.layer, 0.0, false, {}, group_key(record, config.group_by),
                                record.labels};
    group_names.insert(sample.group);
    const auto A = aggregate_heads(*block, config.aggregation);
    const auto a = token_spans(record, config.a);
    const auto s = token_spans(record, config.s);
    const auto t = token_spans(record, config.t);
    try {
      sample.ratio = attention_ratio(A, a, s, t);
      if (!std::isfinite(sample.ratio) || sample.ratio <= 0.0) {
        sample.degenerate = true;
        sample.reason = "NonPositiveRatio";
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kZeroDenominator && e.code() != ErrorCode::kEmptySet) throw;
      sample.degenerate = true;
      sample.reason = error_code_name(e.code());
    }
    if (sample.degenerate) ++study.excluded;
    study.samples.push_back(std::move(sample));
  }

  for (const auto& name : group_names) study.groups.push_back({name, 0, 0.0, 0.0});
  const auto by_group = study.ratios_by_group();
  for (auto& g : study.groups) {
    const auto& values = by_group.at(g.group);
    g.n = values.size();
    if (!values.empty()) g.mean = stats::mean(values);
    if (values.size() >= 2) g.std = std::sqrt(stats::variance(values));
  }

  for (std::size_t i = 0; i < study.groups.size(); ++i) {
    for (std::size_t j = i + 1; j < study.groups.size(); ++j) {
      PairComparison cmp{study.groups[i].group, study.groups[j].group, std::nullopt, {}};
      const auto& x = by_group.at(cmp.group_a);
      const auto& y = by_group.at(cmp.group_b);
      if (x.size() < 2 || y.size() < 2) {
        cmp.note = "TooFewSamples";
      } else {
        try {
          cmp.welch = stats::welch_t_test(x, y);
        } catch (const Error& e) {
          cmp.note = error_code_name(e.code());
        }
      }
      study.comparisons.push_back(std::move(cmp));
    }
  }
  return study;
}

nlohmann::json AraStudy::to_json() const {
  nlohmann::json j;
  j["layer"] = layer;
  j["aggregation"] = to_string(config.aggregation);
  j["roles"] = {{"a", config.a.describe()}, {"s", config.s.describe()}, {"t", config.t.describe()}};
  j["group_by"] = config.group_by;
  j["n_samples"] = samples.size();
  j["excluded"] = excluded;
  j["groups"] = nlohmann::json::array();
  for (const auto& g : groups) {
    j["groups"].push_back({{"group", g.group}, {"n", g.n}, {"mean", g.mean}, {"std", g.std}});
  }
  j["comparisons"] = nlohmann::json::array();
  for (const auto& c : comparisons) {
    nlohmann::json entry{{"group_a", c.group_a}, {"group_b", c.group_b}};
    entry["welch"] = c.welch ? c.welch->to_json() : nlohmann::json(nullptr);
    if (!c.note.empty()) entry["note"] = c.note;
    j["comparisons"].push_back(std::move(entry));
  }
  return j;
}

namespace {

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n\r") == std::string::npos) return value;
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string AraStudy::samples_csv() const {
  std::set<std::string> label_keys;
  for (const auto& s : samples) {
    for (const auto& [k, v] : s.tags) label_keys.insert(k);
  }
  std::ostringstream out;
  out.precision(17);
  out << "record_id,layer,a,s,t,group,ratio,degenerate,reason";
  for (const auto& k : label_keys) out << ',' << csv_field(k);
  out << '\n';
  for (const auto& s : samples) {
    out << csv_field(s.record_id) << ',' << s.layer << ',' << csv_field(config.a.describe()) << ','
        << csv_field(config.s.describe()) << ',' << csv_field(config.t.describe()) << ','
        << csv_field(s.group) << ',';
    if (!s.degenerate) out << s.ratio;
    out << ',' << (s.degenerate ? 1 : 0) << ',' << s.reason;
    for (const auto& k : label_keys) {
      auto it = s.tags.find(k);
      out << ',' << (it == s.tags.end() ? std::string() : csv_field(it->second));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace iclscope::attnratio
