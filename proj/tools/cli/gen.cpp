#include <algorithm>

#include "commands.hpp"
#include "iclscope/error.hpp"
#include "iclscope/rng.hpp"
#include "iclscope/synth/synth.hpp"
#include "iclscope/taskgen/graph.hpp"
#include "iclscope/taskgen/persona.hpp"
#include "iclscope/taskgen/reading.hpp"
#include "iclscope/taskgen/regression.hpp"
#include "iclscope/tensorstore/dump_io.hpp"

namespace iclscope::cli {

namespace tg = iclscope::taskgen;

namespace {

const std::vector<std::string> kTasks{"regression", "reading", "graph", "persona"};

std::vector<tg::SuiteRecord> gen_regression(Context& ctx, std::uint64_t seed) {
  auto& c = ctx.config;
  const auto n_lines = c.get<std::size_t>("regression.n_lines", 16);
  const auto per_line = c.get<std::size_t>("regression.prompts_per_line", 16);
  const auto max_perms = c.get<std::size_t>("regression.max_perms", 0);
  std::vector<tg::SuiteRecord> out;
  for (const auto& p : tg::gen_regression_suite(n_lines, per_line, seed)) {
    if (max_perms == 0) {
      out.push_back(p.to_record());
      continue;
    }
    std::size_t k = 0;
    for (const auto& v : tg::permute_icl_examples(p, max_perms, seed)) {
      auto r = v.to_record();
      r.labels["perm_of"] = p.id;
      r.labels["perm"] = std::to_string(k++);
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<tg::SuiteRecord> gen_reading(Context& ctx, std::uint64_t seed, const std::filesystem::path& data) {
  auto& c = ctx.config;
  const auto pools = tg::ReadingPools::load(data);
  const auto n_names = c.get<std::size_t>("reading.n_names", 10);
  const auto n_acts = c.get<std::size_t>("reading.n_activities", 10);
  const auto sizes = c.get<std::vector<std::size_t>>("reading.composite_sizes", {1, 2, 3});
  std::vector<tg::SuiteRecord> out;
  for (std::size_t size : sizes) {
    // Both ICL variants share a seed so their main questions coincide.
    for (bool icl : {false, true}) {
      for (const auto& p : tg::gen_reading_suite(pools, n_names, n_acts, size, icl, derive_key(seed, size))) {
        out.push_back(p.to_record());
      }
    }
  }
  return out;
}

std::vector<tg::SuiteRecord> gen_graph(Context& ctx, std::uint64_t seed, const std::filesystem::path& data) {
  auto& c = ctx.config;
  const auto fixtures = c.list("graph.fixtures", tg::kFixtureGraphs);
  const auto domains = c.list("graph.domains", {"ordRooms", "unordSpatial", "socialTies"});
  std::vector<std::string> default_conditions;
  for (auto cond : tg::kAllConditions) default_conditions.push_back(tg::to_string(cond));
  std::set<tg::Condition> conditions;
  for (const auto& name : c.list("graph.conditions", default_conditions)) conditions.insert(tg::parse_condition(name));

  std::vector<tg::SuiteRecord> out;
  for (const auto& id : fixtures) {
    const auto graph = tg::load_fixture(id, data);
    for (const auto& d : domains) {
      for (bool icl : {false, true}) {
        auto suite = tg::gen_graph_suite(graph, tg::parse_domain(d), conditions, icl, seed, data);
        if (!icl) {
          for (const auto& w : suite.warnings) ctx.warn(w + " (" + d + ")");
        }
        for (const auto& t : suite.tasks) out.push_back(t.to_record());
      }
    }
  }
  return out;
}

std::vector<tg::SuiteRecord> gen_persona(Context& ctx, std::uint64_t seed, const std::filesystem::path& data) {
  auto& c = ctx.config;
  const auto pools = tg::PersonaPools::load(data);
  const auto n = c.get<std::size_t>("persona.n_prompts", 100);
  std::vector<tg::SuiteRecord> out;
  for (const auto& name : c.list("persona.templates", {"baseline", "truthful", "deceptive"})) {
    for (bool icl : {false, true}) {
      for (const auto& p : tg::gen_persona_suite(pools, n, tg::parse_persona_template(name), icl, seed)) {
        out.push_back(p.to_record());
      }
    }
  }
  return out;
}

struct Plant {
  std::string label_key;
  std::string focus_role;
  bool by_icl = false;
};

Plant default_plant(const std::string& task) {
  if (task == "regression") return {"slope", "examples", false};
  if (task == "reading") return {"activity", "s_inf", true};
  if (task == "persona") return {"activity", "context", true};
  return {"condition", "question", false};
}

// Every k-th record so the cap keeps all conditions represented.
std::vector<tg::SuiteRecord> thin(const std::vector<tg::SuiteRecord>& records, std::size_t cap) {
  if (cap == 0 || records.size() <= cap) return records;
  std::vector<tg::SuiteRecord> sorted = records;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::vector<tg::SuiteRecord> out;
  for (std::size_t k = 0; k < cap; ++k) out.push_back(sorted[k * sorted.size() / cap]);
  return out;
}

void write_synth_dump(Context& ctx, const std::string& task, const std::vector<tg::SuiteRecord>& records,
                      std::uint64_t seed) {
  auto& c = ctx.config;
  const Plant plant = default_plant(task);
  synth::SynthDumpSpec spec;
  spec.layers = c.get<std::vector<int>>("synth.layers", {0, 1, 2});
  spec.d = c.get<std::size_t>("synth.d", 16);
  spec.heads = c.get<std::size_t>("synth.heads", 2);
  spec.signal = c.get<double>("synth.signal", 5.0);
  spec.noise = c.get<double>("synth.noise", 1.0);
  spec.label_key = c.str("synth." + task + ".label_key", plant.label_key);
  spec.focus_role = c.str("synth." + task + ".focus_role", plant.focus_role);
  spec.focus_mass = c.get<double>("synth.focus_mass", 0.5);
  if (plant.by_icl) {
    spec.focus_label = "icl";
    spec.focus_mass_by_value = {{"1", c.get<double>("synth.focus_mass_icl", 0.6)},
                                {"0", c.get<double>("synth.focus_mass_base", 0.3)}};
  }
  spec.seed = seed;
  const auto scope = c.str("synth.embedding_scope", "full");
  spec.scope = tensorstore::parse_embedding_scope(scope);

  std::vector<tensorstore::PromptRecord> skeletons;
  for (const auto& r : thin(records, c.get<std::size_t>("synth.max_records", 120))) {
    skeletons.push_back(r.to_prompt_record(true));
  }
  const auto ds = synth::synth_dataset(std::move(skeletons), spec);
  const std::filesystem::path rel = std::filesystem::path("dumps") / task;
  std::filesystem::remove_all(ctx.out / rel);
  tensorstore::write_dump(ds, ctx.out / rel);
  ctx.outputs.push_back((rel / tensorstore::kManifestName).generic_string());
}

}  // namespace

void run_gen(Context& ctx) {
  auto& c = ctx.config;
  const std::uint64_t seed = c.seed();
  const std::filesystem::path data = c.str("data_dir", tg::default_data_dir().string());
  auto tasks = c.list("task", {"all"});
  if (tasks.size() == 1 && tasks[0] == "all") tasks = kTasks;
  const bool synth_enabled = c.get<bool>("synth.enabled", true);

  nlohmann::json counts = nlohmann::json::object();
  for (const auto& task : tasks) {
    std::vector<tg::SuiteRecord> records;
    if (task == "regression") {
      records = gen_regression(ctx, seed);
    } else if (task == "reading") {
      records = gen_reading(ctx, seed, data);
    } else if (task == "graph") {
      records = gen_graph(ctx, seed, data);
    } else if (task == "persona") {
      records = gen_persona(ctx, seed, data);
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown task '" + task + "'");
    }
    ctx.write(std::filesystem::path("suites") / (task + ".jsonl"), tg::serialize_suite(records));
    counts[task] = records.size();
    if (synth_enabled) write_synth_dump(ctx, task, records, seed);
  }
  ctx.summary["records"] = counts;
}

}  // namespace iclscope::cli
