#include "config.hpp"

#include "iclscope/error.hpp"
#include "iclscope/taskgen/suite.hpp"

namespace iclscope::cli {

void Config::load_file(const std::filesystem::path& path) {
  const auto j = taskgen::load_json_file(path);
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, path.string() + ": config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      throw Error(ErrorCode::kInvalidArgument,
                  path.string() + ": nested objects are not allowed, use dotted keys (" + key + ")");
    }
    values_[key] = value;
  }
}

void Config::set(const std::string& key, nlohmann::json value) { values_[key] = std::move(value); }

void Config::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorCode::kInvalidArgument, "expected key=value, got '" + assignment + "'");
  }
  const std::string raw = assignment.substr(eq + 1);
  auto parsed = nlohmann::json::parse(raw, nullptr, false);
  set(assignment.substr(0, eq), parsed.is_discarded() ? nlohmann::json(raw) : parsed);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<std::string> Config::list(const std::string& key, const std::vector<std::string>& fallback) {
  if (!values_.count(key)) {
    resolved_[key] = fallback;
    return fallback;
  }
  const auto& v = values_.at(key);
  std::vector<std::string> out;
  if (v.is_string()) {
    out = split(v.get<std::string>(), ',');
  } else if (v.is_array()) {
    for (const auto& e : v) out.push_back(e.is_string() ? e.get<std::string>() : e.dump());
  } else if (v.is_number() || v.is_boolean()) {
    out.push_back(v.dump());
  } else {
    throw_type_error(key, v);
  }
  resolved_[key] = out;
  return out;
}

nlohmann::json Config::resolved() const {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [k, v] : values_) out[k] = v;
  for (const auto& [k, v] : resolved_) out[k] = v;
  return out;
}

std::vector<std::string> Config::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) {
    if (!resolved_.count(k)) out.push_back(k);
  }
  return out;
}

void Config::throw_type_error(const std::string& key, const nlohmann::json& v) {
  throw Error(ErrorCode::kInvalidArgument, "config key '" + key + "' has the wrong type: " + v.dump());
}

}  // namespace iclscope::cli
