#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iclscope/error.hpp"
#include "iclscope/tensorstore/dataset.hpp"

namespace iclscope::tensorstore {

struct Finding {
  ErrorCode code = ErrorCode::kInvariantViolation;
  std::string record_id;  // empty for dump-level findings
  std::string message;
  std::optional<int> layer;
  std::optional<std::size_t> head;
  std::optional<std::size_t> row;
  std::string file;
};

struct ValidationReport {
  std::vector<Finding> errors;
  std::vector<Finding> warnings;

  bool ok() const { return errors.empty(); }
  nlohmann::json to_json() const;
};

inline constexpr double kAttentionRowTolerance = 1e-3;

// Checks every type invariant of an in-memory dataset.
ValidationReport validate_dataset(const Dataset& dataset);

// File-level checks (manifest, blobs, sizes) followed by validate_dataset.
// Never throws; every finding lands in the report.
ValidationReport validate_dump(const std::filesystem::path& dir);

std::string describe(const Finding& finding, bool with_code = true);

}  // namespace iclscope::tensorstore
