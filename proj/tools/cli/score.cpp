#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "commands.hpp"
#include "iclscope/error.hpp"
#include "iclscope/report/report.hpp"
#include "iclscope/stats/tests.hpp"
#include "iclscope/taskgen/graph.hpp"
#include "iclscope/taskgen/reading.hpp"
#include "iclscope/taskgen/regression.hpp"
#include "iclscope/taskgen/suite.hpp"

namespace iclscope::cli {

namespace tg = iclscope::taskgen;

namespace {

// Per-record outcome. `value` is the absolute error for regression and 0/1 success elsewhere;
// it is empty when the response is missing or unparseable.
struct Outcome {
  std::string record_id;
  std::optional<double> value;
  std::string note;
};

std::string label_or(const tg::SuiteRecord& r, const std::string& key, const std::string& fallback = "") {
  const auto it = r.labels.find(key);
  return it == r.labels.end() ? fallback : it->second;
}

Outcome score_one(const tg::SuiteRecord& r, const std::optional<std::string>& response) {
  Outcome o{r.id, std::nullopt, ""};
  if (!response) {
    o.note = "missing response";
    if (r.task != "regression") o.value = 0.0;
    return o;
  }
  if (r.task == "regression") {
    try {
      o.value = tg::score_regression(r.answer.at("y_T").get<double>(), tg::parse_numeric_response(*response));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoNumberFound) throw;
      o.note = "NoNumberFound";
    }
  } else if (r.task == "reading" || r.task == "persona") {
    o.value = tg::score_reading(*response, r.answer.at("activity").get<std::string>()) ? 1.0 : 0.0;
  } else if (r.task == "graph") {
    o.value = tg::score_traversal(*response, tg::TraversalTask::from_record(r)) ? 1.0 : 0.0;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "record '" + r.id + "' has unknown task '" + r.task + "'");
  }
  return o;
}

std::map<std::string, std::string> load_responses(const std::string& spec, const std::vector<tg::SuiteRecord>& suite) {
  if (spec == "oracle") {
    std::map<std::string, std::string> out;
    for (const auto& r : suite) out[r.id] = r.oracle_response;
    return out;
  }
  return tg::read_responses(spec);
}

std::vector<Outcome> score_all(const std::vector<tg::SuiteRecord>& suite, const std::map<std::string, std::string>& responses) {
  std::vector<Outcome> out;
  for (const auto& r : suite) {
    const auto it = responses.find(r.id);
    out.push_back(score_one(r, it == responses.end() ? std::nullopt : std::optional<std::string>(it->second)));
  }
  return out;
}

nlohmann::json summarize(const std::vector<double>& v) {
  if (v.empty()) return {{"n", 0}};
  return {{"n", v.size()},
          {"mean", stats::mean(v)},
          {"min", *std::min_element(v.begin(), v.end())},
          {"max", *std::max_element(v.begin(), v.end())}};
}

// Groups scored values by the joined values of `keys`.
std::map<std::string, std::vector<double>> by_labels(const std::vector<tg::SuiteRecord>& suite,
                                                     const std::vector<Outcome>& outcomes,
                                                     const std::vector<std::string>& keys) {
  std::map<std::string, std::vector<double>> out;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    if (!outcomes[i].value) continue;
    std::string key;
    for (const auto& k : keys) key += (key.empty() ? "" : ",") + k + "=" + label_or(suite[i], k, "?");
    out[key.empty() ? "all" : key].push_back(*outcomes[i].value);
  }
  return out;
}

// Ordering analysis over permutation families sharing a `perm_of` base.
nlohmann::json ordering_analysis(const std::vector<tg::SuiteRecord>& suite, const std::vector<Outcome>& outcomes) {
  std::map<std::string, std::vector<double>> errors;
  std::map<std::string, std::string> count_of;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const auto base = label_or(suite[i], "perm_of");
    if (base.empty() || !outcomes[i].value) continue;
    errors[base].push_back(*outcomes[i].value);
    count_of[base] = label_or(suite[i], "icl_count", "?");
  }
  nlohmann::json bases = nlohmann::json::array();
  std::map<std::string, std::vector<double>> variance_by_count;
  std::vector<double> best;
  for (const auto& [base, e] : errors) {
    nlohmann::json b{{"base", base}, {"icl_count", count_of[base]}, {"n", e.size()},
                     {"min_error", *std::min_element(e.begin(), e.end())}, {"mean_error", stats::mean(e)}};
    best.push_back(*std::min_element(e.begin(), e.end()));
    if (e.size() >= 2) {
      const double v = stats::variance(e, 1);
      b["variance"] = v;
      variance_by_count[count_of[base]].push_back(v);
    }
    bases.push_back(std::move(b));
  }
  nlohmann::json out{{"bases", bases}, {"best_of_permutations", summarize(best)}};
  std::vector<std::vector<double>> groups;
  for (const auto& [count, v] : variance_by_count) groups.push_back(v);
  try {
    out["variance_anova_by_icl_count"] = stats::anova_oneway(groups).to_json();
  } catch (const Error& e) {
    out["variance_anova_by_icl_count"] = {{"note", std::string(error_code_name(e.code())) + ": " + e.what()}};
  }
  return out;
}

}  // namespace

void run_score(Context& ctx) {
  auto& c = ctx.config;
  const std::string suite_path = c.str("suite", "");
  if (suite_path.empty()) throw Error(ErrorCode::kInvalidArgument, "--suite is required");
  auto suite = tg::read_suite(suite_path);
  const std::string task = c.str("task", "");
  if (!task.empty() && task != "all") {
    std::erase_if(suite, [&](const auto& r) { return r.task != task; });
  }
  if (suite.empty()) throw Error(ErrorCode::kInvalidArgument, "suite has no records for task '" + task + "'");
  const auto responses = load_responses(c.str("responses", "oracle"), suite);
  for (const auto& [id, text] : responses) {
    if (std::none_of(suite.begin(), suite.end(), [&](const auto& r) { return r.id == id; })) {
      ctx.warn("response for unknown record '" + id + "' ignored");
    }
  }
  const auto outcomes = score_all(suite, responses);

  std::ostringstream csv;
  csv << "record_id,task,score,note\n";
  std::map<std::string, std::size_t> missing;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    csv << suite[i].id << ',' << suite[i].task << ',';
    if (outcomes[i].value) csv << tg::format_fixed(*outcomes[i].value, 6);
    csv << ',' << outcomes[i].note << '\n';
    if (!outcomes[i].note.empty()) ++missing[outcomes[i].note];
  }
  ctx.write("score/scores.csv", csv.str());
  for (const auto& [note, n] : missing) ctx.warn(std::to_string(n) + " record(s): " + note);

  std::map<std::string, std::vector<std::size_t>> per_task;
  for (std::size_t i = 0; i < suite.size(); ++i) per_task[suite[i].task].push_back(i);

  nlohmann::json tasks = nlohmann::json::object();
  for (const auto& [name, idx] : per_task) {
    std::vector<tg::SuiteRecord> sub;
    std::vector<Outcome> out;
    for (auto i : idx) {
      sub.push_back(suite[i]);
      out.push_back(outcomes[i]);
    }
    std::vector<std::string> keys;
    if (name == "regression") keys = {"icl_count"};
    if (name == "reading") keys = {"composite_size", "icl"};
    if (name == "persona") keys = {"template", "icl"};
    if (name == "graph") keys = {"graph", "domain", "condition", "icl"};
    nlohmann::json t{{"metric", name == "regression" ? "absolute_error" : "success"},
                     {"overall", summarize(by_labels(sub, out, {})["all"])},
                     {"unscored", std::count_if(out.begin(), out.end(), [](const auto& o) { return !o.value; })}};
    nlohmann::json groups = nlohmann::json::object();
    const auto grouped = by_labels(sub, out, keys);
    for (const auto& [g, v] : grouped) groups[g] = summarize(v);
    t["groups"] = groups;
    if (name == "regression") {
      t["by_range_kind"] = nlohmann::json::object();
      for (const auto& [g, v] : by_labels(sub, out, {"range_kind"})) t["by_range_kind"][g] = summarize(v);
      if (std::any_of(sub.begin(), sub.end(), [](const auto& r) { return r.labels.count("perm_of"); })) {
        t["ordering"] = ordering_analysis(sub, out);
      }
      report::Series s{"mean absolute error", {}};
      for (const auto& [g, v] : grouped) {
        try {
          s.points.emplace_back(std::stod(g.substr(g.find('=') + 1)), stats::mean(v));
        } catch (const std::logic_error&) {
        }
      }
      ctx.write("score/regression_error.svg", report::line_chart_svg("Regression error", "icl_count", "abs error", {s}));
    }
    tasks[name] = std::move(t);
  }

  nlohmann::json rep{{"suite", suite_path}, {"responses", c.str("responses", "oracle")}, {"tasks", tasks}};
  const std::string compare = c.str("score.compare", "");
  if (!compare.empty()) {
    const auto other = score_all(suite, load_responses(compare, suite));
    std::vector<double> a, b;
    for (std::size_t i = 0; i < suite.size(); ++i) {
      if (outcomes[i].value && other[i].value) {
        a.push_back(*outcomes[i].value);
        b.push_back(*other[i].value);
      }
    }
    nlohmann::json cmp{{"with", compare}, {"n", a.size()}};
    try {
      cmp["spearman"] = stats::spearman(a, b);
    } catch (const Error& e) {
      cmp["note"] = std::string(error_code_name(e.code())) + ": " + e.what();
    }
    rep["comparison"] = cmp;
  }
  ctx.write_json("score/report.json", rep);
  ctx.summary["score"] = tasks;
}

}  // namespace iclscope::cli
