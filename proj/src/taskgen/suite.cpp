#include "iclscope/taskgen/suite.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "iclscope/error.hpp"
#include "iclscope/text.hpp"

#ifndef ICLSCOPE_DEFAULT_DATA_DIR
#define ICLSCOPE_DEFAULT_DATA_DIR "data"
#endif

namespace iclscope::taskgen {

nlohmann::json SuiteRecord::to_json() const {
  nlohmann::json segs = nlohmann::json::object();
  for (const auto& [role, spans] : segments) {
    auto& arr = segs[role] = nlohmann::json::array();
    for (const auto& s : spans) arr.push_back({s.start, s.end});
  }
  return {{"id", id},           {"task", task},     {"prompt_text", prompt_text}, {"segments", segs},
          {"labels", labels},   {"answer", answer}, {"oracle_response", oracle_response}};
}

SuiteRecord SuiteRecord::from_json(const nlohmann::json& j) {
  try {
    SuiteRecord r;
    r.id = j.at("id").get<std::string>();
    r.task = j.at("task").get<std::string>();
    r.prompt_text = j.at("prompt_text").get<std::string>();
    for (const auto& [role, spans] : j.at("segments").items()) {
      auto& out = r.segments[role];
      for (const auto& s : spans) out.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
    }
    r.labels = j.at("labels").get<std::map<std::string, std::string>>();
    r.answer = j.value("answer", nlohmann::json::object());
    r.oracle_response = j.value("oracle_response", std::string());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("malformed suite record: ") + e.what());
  }
}

tensorstore::PromptRecord SuiteRecord::to_prompt_record(bool with_oracle_response) const {
  tensorstore::PromptRecord r;
  r.id = id;
  r.prompt_text = prompt_text;
  r.response_text = with_oracle_response ? oracle_response : std::string();
  r.segments = segments;
  r.labels = labels;
  r.labels["task"] = task;
  return r;
}

std::string serialize_suite(const std::vector<SuiteRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.to_json().dump();
    out += '\n';
  }
  return out;
}

void write_suite(const std::filesystem::path& path, const std::vector<SuiteRecord>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  f << serialize_suite(records);
  if (!f) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

namespace {

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::vector<nlohmann::json> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kInvalidArgument,
                  path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<SuiteRecord> read_suite(const std::filesystem::path& path) {
  std::vector<SuiteRecord> out;
  for (const auto& j : read_jsonl(path)) out.push_back(SuiteRecord::from_json(j));
  return out;
}

std::map<std::string, std::string> read_responses(const std::filesystem::path& path) {
  std::map<std::string, std::string> out;
  for (const auto& j : read_jsonl(path)) {
    try {
      const auto id = j.at("record_id").get<std::string>();
      if (!out.emplace(id, j.at("response_text").get<std::string>()).second) {
        throw Error(ErrorCode::kDuplicateRecord, "duplicate response for record '" + id + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument, std::string("malformed response line: ") + e.what());
    }
  }
  return out;
}

TextBuilder& TextBuilder::append(std::string_view piece) {
  text_.append(piece);
  length_ += text::codepoint_length(piece);
  return *this;
}

Interval TextBuilder::mark(const std::string& role, std::string_view piece) {
  const std::size_t start = length_;
  append(piece);
  const Interval span{start, length_};
  segments_[role].push_back(span);
  return span;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("ICLSCOPE_DATA_DIR"); env && *env) return env;
  return ICLSCOPE_DEFAULT_DATA_DIR;
}

nlohmann::json load_json_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
  }
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s = buf;
  if (s.starts_with("-") && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

}  // namespace iclscope::taskgen
