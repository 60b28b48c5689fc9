#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "iclscope/tensorstore/dataset.hpp"

namespace iclscope::taskgen {

using tensorstore::Interval;
using SegmentMap = std::map<std::string, std::vector<Interval>>;

// One line of a suite file. `answer` holds whatever the task's scorer needs.
struct SuiteRecord {
  std::string id;
  std::string task;
  std::string prompt_text;
  SegmentMap segments;
  std::map<std::string, std::string> labels;
  nlohmann::json answer;
  std::string oracle_response;  // a correct response, used for synthetic dumps

  nlohmann::json to_json() const;
  static SuiteRecord from_json(const nlohmann::json& j);

  // Prompt-only skeleton for synth or extractor consumers.
  tensorstore::PromptRecord to_prompt_record(bool with_oracle_response) const;
};

std::string serialize_suite(const std::vector<SuiteRecord>& records);
void write_suite(const std::filesystem::path& path, const std::vector<SuiteRecord>& records);
std::vector<SuiteRecord> read_suite(const std::filesystem::path& path);

// Responses file: JSON lines of {record_id, response_text}.
std::map<std::string, std::string> read_responses(const std::filesystem::path& path);

// Appends text while tracking code point offsets so spans are exact.
class TextBuilder {
 public:
  std::size_t position() const { return length_; }
  TextBuilder& append(std::string_view piece);
  // Appends and records the piece's interval under `role`.
  Interval mark(const std::string& role, std::string_view piece);
  void add_span(const std::string& role, Interval span) { segments_[role].push_back(span); }

  const std::string& text() const { return text_; }
  const SegmentMap& segments() const { return segments_; }

 private:
  std::string text_;
  std::size_t length_ = 0;
  SegmentMap segments_;
};

// Data directory holding graph fixtures and name pools. The ICLSCOPE_DATA_DIR
// environment variable overrides the build-time default.
std::filesystem::path default_data_dir();

nlohmann::json load_json_file(const std::filesystem::path& path);

std::string format_fixed(double value, int decimals);

}  // namespace iclscope::taskgen
