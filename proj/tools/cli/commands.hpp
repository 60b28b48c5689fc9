#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "iclscope/tensorstore/dataset.hpp"

namespace iclscope::cli {

// State shared by one subcommand run; collects everything run.json echoes.
struct Context {
  std::string command;
  Config config;
  std::filesystem::path out;
  std::vector<std::string> outputs;  // relative to `out`
  std::vector<std::string> warnings;
  nlohmann::json summary = nlohmann::json::object();

  void write(const std::filesystem::path& relative, const std::string& content);
  void write_json(const std::filesystem::path& relative, const nlohmann::json& j);
  void warn(const std::string& message);
};

void run_gen(Context& ctx);
void run_validate(Context& ctx);
void run_rsa(Context& ctx);
void run_ara(Context& ctx);
void run_probe(Context& ctx);
void run_score(Context& ctx);
void run_report(Context& ctx);

// Helpers shared by the analysis commands.
tensorstore::Dataset load_dataset(Context& ctx);
std::vector<int> resolve_layers(const std::string& spec, const tensorstore::Dataset& ds);
// Value of the "task" label shared by the dump's records, or "" when mixed or absent.
std::string dataset_task(const tensorstore::Dataset& ds);

}  // namespace iclscope::cli
