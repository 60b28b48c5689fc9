#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "commands.hpp"
#include "iclscope/attnratio/attnratio.hpp"
#include "iclscope/error.hpp"
#include "iclscope/probes/probes.hpp"
#include "iclscope/repgeom/repgeom.hpp"
#include "iclscope/report/report.hpp"
#include "iclscope/stats/mantel.hpp"
#include "iclscope/taskgen/graph.hpp"
#include "iclscope/tensorstore/dump_io.hpp"
#include "iclscope/tensorstore/validate.hpp"

namespace iclscope::cli {

namespace ts = iclscope::tensorstore;
namespace rg = iclscope::repgeom;

namespace {

constexpr const char* kFisherCaveat =
    "Fisher z comparisons use n = m(m-1)/2 similarity pairs per matrix. Those pairs share items and are not "
    "independent, so these p-values are optimistic and serve as a descriptive guide only.";

bool all_have(const ts::Dataset& ds, const std::string& key) {
  return !ds.records.empty() &&
         std::all_of(ds.records.begin(), ds.records.end(), [&](const auto& r) { return r.label(key).has_value(); });
}

std::vector<std::string> default_groups(const ts::Dataset& ds, const std::string& task, const std::string& analysis) {
  std::vector<std::string> keys;
  if (task == "regression") {
    keys = {"icl_count"};
  } else if (task == "graph" && analysis != "probe") {
    keys = {"condition", "icl"};
  } else if (analysis == "probe") {
    keys = {"icl"};
  } else if (task == "reading" && analysis != "ara") {
    keys = {"composite_size", "icl"};
  } else if (task == "persona") {
    keys = {"template", "icl"};
  } else {
    keys = {"icl"};
  }
  std::vector<std::string> present;
  for (const auto& k : keys) {
    if (all_have(ds, k)) present.push_back(k);
  }
  return present;
}

std::string default_label(const std::string& task) {
  if (task == "regression") return "slope";
  if (task == "reading" || task == "persona") return "activity";
  if (task == "graph") return "condition";
  return "";
}

std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out.empty() ? "all" : out;
}

// Records grouped by label values, each group in record-id order.
std::map<std::string, std::vector<const ts::PromptRecord*>> group_records(const ts::Dataset& ds,
                                                                          const std::vector<std::string>& keys) {
  std::map<std::string, std::vector<const ts::PromptRecord*>> out;
  for (const auto& r : ds.records) out[attnratio::group_key(r, keys)].push_back(&r);
  for (auto& [k, v] : out) {
    std::sort(v.begin(), v.end(), [](const auto* a, const auto* b) { return a->id < b->id; });
  }
  return out;
}

const ts::EmbeddingBlock& require_embedding(const ts::Dataset& ds, const std::string& id, int layer) {
  const auto* e = ds.embedding(id, layer);
  if (!e) throw Error(ErrorCode::kInvalidArgument, "record '" + id + "' has no embedding at layer " + std::to_string(layer));
  return *e;
}

// x position for a group: its single numeric value when there is one, else its index.
std::vector<double> group_positions(const std::vector<std::string>& groups) {
  std::vector<double> xs;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const auto eq = groups[i].find('=');
    const bool single = eq != std::string::npos && groups[i].find(',') == std::string::npos;
    try {
      std::size_t used = 0;
      const std::string v = single ? groups[i].substr(eq + 1) : "";
      const double x = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      xs.push_back(x);
    } catch (const std::logic_error&) {
      xs.assign(groups.size(), 0.0);
      for (std::size_t k = 0; k < groups.size(); ++k) xs[k] = static_cast<double>(k);
      return xs;
    }
  }
  return xs;
}

rg::HypothesisMatrix build_hypothesis(const std::string& spec, std::span<const ts::PromptRecord* const> records) {
  if (spec.starts_with("label:")) {
    auto h = rg::hypothesis_from_labels(records, spec.substr(6));
    return h;
  }
  if (spec.starts_with("combined:")) {
    const auto keys = split(spec.substr(9), ',');
    if (keys.size() != 2) throw Error(ErrorCode::kInvalidArgument, "combined hypothesis needs two label keys");
    return rg::hypothesis_combined(rg::hypothesis_from_labels(records, keys[0]),
                                   rg::hypothesis_from_labels(records, keys[1]));
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown hypothesis '" + spec + "' (label:<key>, combined:<a>,<b>, sr)");
}


void rsa_graph_nodes(Context& ctx, const ts::Dataset& ds, const std::vector<int>& layers, rg::Pooling pooling,
                     bool standardize, const std::vector<std::string>& group_by) {
  auto& c = ctx.config;
  const double gamma = c.get<double>("rsa.gamma", taskgen::kDefaultGamma);
  const std::filesystem::path data = c.str("data_dir", taskgen::default_data_dir().string());
  std::map<std::string, taskgen::GraphSpec> graphs;
  std::map<std::string, Eigen::MatrixXd> hyps;
  for (const auto& r : ds.records) {
    const auto id = r.label("graph");
    if (!id) throw Error(ErrorCode::kMissingLabel, "record '" + r.id + "' lacks label 'graph'");
    if (!graphs.count(*id)) {
      graphs[*id] = taskgen::load_fixture(*id, data);
      hyps[*id] = taskgen::sr_hypothesis(graphs[*id], gamma);
      std::vector<std::string> order;
      for (auto u : graphs[*id].nodes) order.push_back("node:" + std::to_string(u));
      ctx.write(std::filesystem::path("rsa") / ("H_" + slug(*id) + ".csv"), report::matrix_csv(order, hyps[*id]));
      ctx.write(std::filesystem::path("rsa") / ("H_" + slug(*id) + ".svg"),
                report::heatmap_svg("SR hypothesis " + *id, order, hyps[*id]));
    }
  }

  nlohmann::json units = nlohmann::json::array();
  std::vector<report::Series> series;
  const auto groups = group_records(ds, group_by);
  std::vector<std::string> group_names;
  for (const auto& [g, v] : groups) group_names.push_back(g);
  const auto xs = group_positions(group_names);
  for (int layer : layers) {
    report::Series line{"layer " + std::to_string(layer), {}};
    std::size_t gi = 0;
    for (const auto& [group, records] : groups) {
      std::vector<double> values;
      nlohmann::json per_record = nlohmann::json::array();
      for (const auto* r : records) {
        const auto& g = graphs.at(*r->label("graph"));
        std::vector<rg::PromptVector> vectors;
        std::vector<std::size_t> idx;
        for (auto u : g.nodes) {
          const std::string role = "node:" + std::to_string(u);
          if (!r->segments.count(role)) continue;
          auto v = rg::pool_tokens(require_embedding(ds, r->id, layer), *r, rg::TokenSelection::last_segment(role), pooling);
          v.record_id = role;
          vectors.push_back(std::move(v));
          idx.push_back(g.index_of(u));
        }
        if (vectors.size() < 3) {
          ctx.warn("record '" + r->id + "' mentions fewer than 3 nodes; skipped");
          continue;
        }
        if (standardize) vectors = rg::standardize(vectors);
        const auto M = rg::cosine_similarity_matrix(vectors);
        Eigen::MatrixXd h(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i) {
          for (std::size_t j = 0; j < idx.size(); ++j) {
            h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                hyps.at(g.id)(static_cast<Eigen::Index>(idx[i]), static_cast<Eigen::Index>(idx[j]));
          }
        }
        const auto H = rg::hypothesis_from_matrix(M.order, h, rg::HypothesisKind::kSuccessorRepresentation);
        const double a = rg::hypothesis_alignment(M, H);
        values.push_back(a);
        per_record.push_back({{"record_id", r->id}, {"alignment", a}, {"nodes", vectors.size()}});
      }
      nlohmann::json unit{{"layer", layer}, {"group", group}, {"n_records", values.size()}, {"records", per_record}};
      if (!values.empty()) {
        unit["mean_alignment"] = stats::mean(values);
        unit["sd_alignment"] = values.size() > 1 ? std::sqrt(stats::variance(values)) : 0.0;
        line.points.emplace_back(xs[gi], stats::mean(values));
      }
      units.push_back(std::move(unit));
      ++gi;
    }
    series.push_back(std::move(line));
  }
  ctx.write(std::filesystem::path("rsa") / "alignment.svg",
            report::line_chart_svg("Mean node-level SR alignment", "group", "alignment", series));
  const nlohmann::json rep{{"level", "node"}, {"hypothesis", "sr"}, {"gamma", gamma}, {"group_by", group_by},
                           {"groups", group_names}, {"units", units}};
  ctx.write_json(std::filesystem::path("rsa") / "report.json", rep);
  ctx.summary["rsa"] = rep;
}

}  // namespace

void run_validate(Context& ctx) {
  const std::string dump = ctx.config.str("dump", "");
  if (dump.empty()) throw Error(ErrorCode::kInvalidArgument, "--dump is required");
  const auto rep = ts::validate_dump(dump);
  ctx.write_json(std::filesystem::path("validate") / "report.json", rep.to_json());
  ctx.summary["errors"] = rep.errors.size();
  ctx.summary["warnings"] = rep.warnings.size();
  for (const auto& w : rep.warnings) ctx.warn(ts::describe(w));
  if (!rep.ok()) {
    throw Error(rep.errors.front().code, std::to_string(rep.errors.size()) + " validation error(s); first: " +
                                             ts::describe(rep.errors.front(), false));
  }
}

void run_rsa(Context& ctx) {
  auto& c = ctx.config;
  const auto ds = load_dataset(ctx);
  const std::string task = dataset_task(ds);
  const auto layers = resolve_layers(c.str("layers", "all"), ds);
  const auto pooling = rg::parse_pooling(c.str("pooling", "max"));
  const bool standardize = c.get<bool>("rsa.standardize", true);
  const auto group_by = c.list("rsa.group_by", default_groups(ds, task, "rsa"));
  const std::string hyp = c.str("hypothesis", task == "graph" ? "sr" : "label:" + default_label(task));
  if (hyp == "sr") {
    rsa_graph_nodes(ctx, ds, layers, pooling, standardize, group_by);
    return;
  }
  const auto selection = rg::parse_selection(c.str("rsa.selection", "all"));
  const auto method = stats::parse_correlation_method(c.str("rsa.method", "pearson"));
  const auto n_perm = c.get<std::size_t>("n_perm", stats::kDefaultPermutations);
  const std::uint64_t seed = c.seed();

  const auto groups = group_records(ds, group_by);
  std::vector<std::string> group_names;
  for (const auto& [g, v] : groups) group_names.push_back(g);
  const auto xs = group_positions(group_names);

  nlohmann::json units = nlohmann::json::array();
  nlohmann::json comparisons = nlohmann::json::array();
  std::vector<report::Series> series;
  std::map<std::string, rg::HypothesisMatrix> hyp_by_group;
  for (const auto& [group, records] : groups) {
    try {
      hyp_by_group[group] = build_hypothesis(hyp, records);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kInvalidArgument) throw;
      ctx.warn("group '" + group + "': " + e.what());
      continue;
    }
    const auto& H = hyp_by_group[group];
    ctx.write(std::filesystem::path("rsa") / ("H_" + slug(group) + ".csv"), report::matrix_csv(H.order, H.values));
  }

  for (int layer : layers) {
    report::Series line{"layer " + std::to_string(layer), {}};
    std::map<std::string, std::pair<double, std::size_t>> fitted;
    std::size_t gi = 0;
    for (const auto& [group, records] : groups) {
      nlohmann::json unit{{"layer", layer}, {"group", group}, {"m", records.size()}};
      const auto hit = hyp_by_group.find(group);
      if (hit == hyp_by_group.end()) {
        unit["note"] = "hypothesis unavailable";
        units.push_back(std::move(unit));
        ++gi;
        continue;
      }
      std::vector<rg::PromptVector> vectors;
      for (const auto* r : records) {
        vectors.push_back(rg::pool_tokens(require_embedding(ds, r->id, layer), *r, selection, pooling));
      }
      try {
        if (standardize) vectors = rg::standardize(vectors);
        const auto M = rg::cosine_similarity_matrix(vectors);
        const double alignment = rg::hypothesis_alignment(M, hit->second, method);
        unit["alignment"] = alignment;
        if (n_perm > 0) unit["mantel"] = stats::mantel(M.values, hit->second.values, n_perm, method, seed).to_json();
        const std::size_t m = records.size();
        fitted[group] = {alignment, m * (m - 1) / 2};
        line.points.emplace_back(xs[gi], alignment);
        const std::string base = "M_L" + std::to_string(layer) + "_" + slug(group);
        ctx.write(std::filesystem::path("rsa") / (base + ".csv"), report::matrix_csv(M.order, M.values));
        ctx.write(std::filesystem::path("rsa") / (base + ".svg"),
                  report::heatmap_svg("Similarity, layer " + std::to_string(layer) + ", " + group, M.order, M.values));
      } catch (const Error& e) {
        unit["note"] = std::string(error_code_name(e.code())) + ": " + e.what();
      }
      units.push_back(std::move(unit));
      ++gi;
    }
    for (auto a = fitted.begin(); a != fitted.end(); ++a) {
      for (auto b = std::next(a); b != fitted.end(); ++b) {
        nlohmann::json cmp{{"layer", layer}, {"group_a", a->first}, {"group_b", b->first}};
        try {
          cmp["fisher_z"] = stats::fisher_z_compare(a->second.first, a->second.second, b->second.first, b->second.second).to_json();
        } catch (const Error& e) {
          cmp["note"] = std::string(error_code_name(e.code())) + ": " + e.what();
        }
        comparisons.push_back(std::move(cmp));
      }
    }
    series.push_back(std::move(line));
  }
  ctx.write(std::filesystem::path("rsa") / "alignment.svg",
            report::line_chart_svg("Hypothesis alignment", group_by.empty() ? "group" : group_by.front(), "alignment", series));
  const nlohmann::json rep{{"level", "prompt"},
                           {"hypothesis", hyp},
                           {"selection", selection.describe()},
                           {"pooling", rg::to_string(pooling)},
                           {"method", stats::to_string(method)},
                           {"standardize", standardize},
                           {"n_perm", n_perm},
                           {"group_by", group_by},
                           {"groups", group_names},
                           {"units", units},
                           {"comparisons", comparisons},
                           {"caveat", kFisherCaveat}};
  ctx.write_json(std::filesystem::path("rsa") / "report.json", rep);
  ctx.summary["rsa"] = rep;
}

void run_ara(Context& ctx) {
  auto& c = ctx.config;
  const auto ds = load_dataset(ctx);
  const std::string task = dataset_task(ds);
  const auto layers = resolve_layers(c.str("layers", "last"), ds);
  attnratio::AraConfig cfg;
  cfg.aggregation = attnratio::parse_aggregation(c.str("aggregation", "max"));
  std::string default_s = "s_inf";
  if (task == "persona") default_s = "context";
  if (task == "regression") default_s = "examples";
  if (task == "graph") default_s = "question";
  cfg.a = attnratio::parse_target(c.str("ara.a", "response"));
  cfg.s = attnratio::parse_target(c.str("ara.s", default_s));
  cfg.t = attnratio::parse_target(c.str("ara.t", "prompt"));
  cfg.group_by = c.list("ara.group_by", default_groups(ds, task, "ara"));
  const int bins = c.get<int>("ara.bins", 20);

  nlohmann::json studies = nlohmann::json::array();
  for (int layer : layers) {
    cfg.layer = layer;
    const auto study = attnratio::ara_study(ds, cfg);
    const std::string base = "L" + std::to_string(layer);
    ctx.write(std::filesystem::path("ara") / ("samples_" + base + ".csv"), study.samples_csv());
    ctx.write(std::filesystem::path("ara") / ("hist_" + base + ".svg"),
              report::histogram_svg("Attention ratio, layer " + std::to_string(layer), study.ratios_by_group(), bins));
    if (study.excluded > 0) ctx.warn(std::to_string(study.excluded) + " degenerate sample(s) excluded at layer " + std::to_string(layer));
    studies.push_back(study.to_json());
  }
  const nlohmann::json rep{{"studies", studies}};
  ctx.write_json(std::filesystem::path("ara") / "report.json", rep);
  ctx.summary["ara"] = rep;
}

void run_probe(Context& ctx) {
  auto& c = ctx.config;
  const auto ds = load_dataset(ctx);
  const std::string task = dataset_task(ds);
  const auto layers = resolve_layers(c.str("layers", "all"), ds);
  const auto pooling = rg::parse_pooling(c.str("pooling", "max"));
  const auto selection = rg::parse_selection(c.str("probe.selection", "all"));
  const auto labels = c.list("probe.label", {default_label(task)});
  const auto group_by = c.list("probe.group_by", default_groups(ds, task, "probe"));
  probes::ProbeConfig pc;
  pc.l2_lambda = c.get<double>("probe.l2_lambda", pc.l2_lambda);
  pc.learning_rate = c.get<double>("probe.learning_rate", pc.learning_rate);
  pc.max_iters = c.get<int>("probe.max_iters", pc.max_iters);
  pc.grad_tol = c.get<double>("probe.grad_tol", pc.grad_tol);
  pc.test_fraction = c.get<double>("probe.test_fraction", pc.test_fraction);
  pc.repetitions = c.get<int>("probe.repetitions", pc.repetitions);
  pc.seed = c.seed();
  pc.check();

  const auto groups = group_records(ds, group_by);
  std::vector<std::string> group_names;
  for (const auto& [g, v] : groups) group_names.push_back(g);
  const auto xs = group_positions(group_names);

  nlohmann::json units = nlohmann::json::array();
  for (const auto& label : labels) {
    std::vector<report::Series> series;
    report::Series baseline{"majority baseline", {}};
    for (int layer : layers) {
      report::Series line{"layer " + std::to_string(layer), {}};
      std::size_t gi = 0;
      for (const auto& [group, records] : groups) {
        nlohmann::json unit{{"label", label}, {"layer", layer}, {"group", group}, {"m", records.size()}};
        try {
          Eigen::MatrixXd X;
          std::vector<std::string> y;
          for (std::size_t i = 0; i < records.size(); ++i) {
            const auto v = rg::pool_tokens(require_embedding(ds, records[i]->id, layer), *records[i], selection, pooling);
            if (i == 0) X.resize(static_cast<Eigen::Index>(records.size()), v.vector.size());
            X.row(static_cast<Eigen::Index>(i)) = v.vector.transpose();
            const auto value = records[i]->label(label);
            if (!value) throw Error(ErrorCode::kMissingLabel, "record '" + records[i]->id + "' lacks label '" + label + "'");
            y.push_back(*value);
          }
          const auto rep = probes::monte_carlo_cv(X, y, pc);
          unit["report"] = rep.to_json();
          line.points.emplace_back(xs[gi], rep.mean);
          if (layer == layers.front()) baseline.points.emplace_back(xs[gi], rep.majority_baseline);
        } catch (const Error& e) {
          unit["note"] = std::string(error_code_name(e.code())) + ": " + e.what();
        }
        units.push_back(std::move(unit));
        ++gi;
      }
      series.push_back(std::move(line));
    }
    series.push_back(std::move(baseline));
    ctx.write(std::filesystem::path("probe") / ("accuracy_" + slug(label) + ".svg"),
              report::line_chart_svg("Probe accuracy for " + label, group_by.empty() ? "group" : group_by.front(),
                                     "accuracy", series));
  }
  const nlohmann::json rep{{"labels", labels},       {"pooling", rg::to_string(pooling)},
                           {"selection", selection.describe()}, {"group_by", group_by},
                           {"groups", group_names},  {"units", units}};
  ctx.write_json(std::filesystem::path("probe") / "report.json", rep);
  ctx.summary["probe"] = rep;
}

void run_report(Context& ctx) {
  run_rsa(ctx);
  run_ara(ctx);
  run_probe(ctx);
  ctx.write_json("summary.json", ctx.summary);
}

}  // namespace iclscope::cli
