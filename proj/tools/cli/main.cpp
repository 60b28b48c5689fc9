#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "iclscope/error.hpp"

namespace {

using iclscope::cli::Context;

struct Flags {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> layers, pooling, aggregation, out, dump, task, hypothesis, suite, responses;
  std::optional<std::size_t> n_perm;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_file, "JSON config with flat dotted keys")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--layers", f.layers, "all | first | last | middle | comma-separated layer indices");
  cmd->add_option("--pooling", f.pooling, "Token pooling")->check(CLI::IsMember({"max", "mean"}));
  cmd->add_option("--aggregation", f.aggregation, "Head aggregation")->check(CLI::IsMember({"max", "mean"}));
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--dump", f.dump, "Dump directory");
  cmd->add_option("--task", f.task, "regression | reading | graph | persona | all");
  cmd->add_option("--hypothesis", f.hypothesis, "label:<key> | combined:<a>,<b> | sr");
  cmd->add_option("--n-perm", f.n_perm, "Mantel permutations");
  cmd->add_option("--set", f.sets, "Override a config key, key=value (repeatable)");
}

void apply(const Flags& f, iclscope::cli::Config& c) {
  if (!f.config_file.empty()) c.load_file(f.config_file);
  for (const auto& s : f.sets) c.set_assignment(s);
  const std::map<std::string, const std::optional<std::string>*> strings{
      {"layers", &f.layers}, {"pooling", &f.pooling}, {"aggregation", &f.aggregation}, {"out", &f.out},
      {"dump", &f.dump},     {"task", &f.task},       {"hypothesis", &f.hypothesis},   {"suite", &f.suite},
      {"responses", &f.responses}};
  for (const auto& [key, value] : strings) {
    if (*value) c.set(key, **value);
  }
  if (f.seed) c.set("seed", *f.seed);
  if (f.n_perm) c.set("n_perm", *f.n_perm);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"iclscope: prompt suites, representational and attention analyses, probes and behavioral scores"};
  app.require_subcommand(1);
  Flags flags;
  const std::map<std::string, std::pair<std::string, void (*)(Context&)>> commands{
      {"gen", {"Write prompt suites and synthetic dumps", iclscope::cli::run_gen}},
      {"validate", {"Check a dump for format and span errors", iclscope::cli::run_validate}},
      {"rsa", {"Similarity matrices, hypothesis alignment and Mantel tests", iclscope::cli::run_rsa}},
      {"ara", {"Attention ratio samples and group tests", iclscope::cli::run_ara}},
      {"probe", {"Linear probe decodability", iclscope::cli::run_probe}},
      {"score", {"Score a response file against a suite", iclscope::cli::run_score}},
      {"report", {"Run rsa, ara and probe and aggregate their outputs", iclscope::cli::run_report}},
  };
  for (const auto& [name, entry] : commands) {
    auto* cmd = app.add_subcommand(name, entry.first);
    add_common(cmd, flags);
    if (name == "score") {
      cmd->add_option("--suite", flags.suite, "Suite JSONL")->check(CLI::ExistingFile);
      cmd->add_option("--responses", flags.responses, "Responses JSONL, or 'oracle'");
    }
  }
  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  Context ctx;
  ctx.command = name;
  int status = 0;
  std::string error_line;
  try {
    apply(flags, ctx.config);
    ctx.out = ctx.config.out_dir();
    ctx.config.seed();
    commands.at(name).second(ctx);
  } catch (const iclscope::Error& e) {
    error_line = std::string(iclscope::error_code_name(e.code())) + ": " + e.what();
    status = 1;
  } catch (const std::exception& e) {
    error_line = std::string("Internal: ") + e.what();
    status = 1;
  }
  for (const auto& key : ctx.config.unused_keys()) ctx.warn("config key '" + key + "' was not used");

  nlohmann::json run{{"command", name},
                     {"config", ctx.config.resolved()},
                     {"outputs", ctx.outputs},
                     {"warnings", ctx.warnings},
                     {"summary", ctx.summary},
                     {"status", status == 0 ? "ok" : "error"}};
  if (status != 0) run["error"] = error_line;
  if (!ctx.out.empty()) {
    try {
      std::filesystem::create_directories(ctx.out);
      std::ofstream(ctx.out / "run.json") << run.dump(2) << "\n";
    } catch (const std::exception&) {
    }
  }
  if (status != 0) std::cerr << "error: " << error_line << "\n";
  return status;
}
