#include <algorithm>
#include <iostream>

#include "commands.hpp"
#include "iclscope/error.hpp"
#include "iclscope/report/report.hpp"
#include "iclscope/tensorstore/dump_io.hpp"

namespace iclscope::cli {

void Context::write(const std::filesystem::path& relative, const std::string& content) {
  report::write_text(out / relative, content);
  outputs.push_back(relative.generic_string());
}

void Context::write_json(const std::filesystem::path& relative, const nlohmann::json& j) {
  write(relative, j.dump(2) + "\n");
}

void Context::warn(const std::string& message) {
  std::cerr << "warning: " << message << "\n";
  warnings.push_back(message);
}

tensorstore::Dataset load_dataset(Context& ctx) {
  const std::string dump = ctx.config.str("dump", "");
  if (dump.empty()) throw Error(ErrorCode::kInvalidArgument, "--dump is required");
  return tensorstore::read_dump(dump);
}

std::vector<int> resolve_layers(const std::string& spec, const tensorstore::Dataset& ds) {
  const auto available = ds.layers();
  if (available.empty()) throw Error(ErrorCode::kInvalidArgument, "dump has no layers");
  if (spec.empty() || spec == "all") return available;
  std::vector<int> out;
  for (const auto& item : split(spec, ',')) {
    int layer = 0;
    if (item == "first") {
      layer = available.front();
    } else if (item == "last") {
      layer = available.back();
    } else if (item == "middle") {
      layer = available[available.size() / 2];
    } else {
      try {
        std::size_t used = 0;
        layer = std::stoi(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::kInvalidArgument, "bad layer '" + item + "'");
      }
      if (!std::binary_search(available.begin(), available.end(), layer)) {
        throw Error(ErrorCode::kInvalidArgument, "layer " + item + " is not in the dump");
      }
    }
    if (std::find(out.begin(), out.end(), layer) == out.end()) out.push_back(layer);
  }
  return out;
}

std::string dataset_task(const tensorstore::Dataset& ds) {
  std::string task;
  for (const auto& r : ds.records) {
    const auto t = r.label("task").value_or("");
    if (task.empty()) task = t;
    if (t != task) return "";
  }
  return task;
}

}  // namespace iclscope::cli
