#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace iclscope::cli {

// Flat dotted-key configuration. Every key read through `get` is recorded with its
// effective value so run.json echoes the fully resolved configuration.
class Config {
 public:
  void load_file(const std::filesystem::path& path);
  void set(const std::string& key, nlohmann::json value);
  // Parses "key=value"; the value is JSON when it parses, otherwise a string.
  void set_assignment(const std::string& assignment);

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  template <typename T>
  T get(const std::string& key, const T& fallback) {
    nlohmann::json v = values_.count(key) ? values_.at(key) : nlohmann::json(fallback);
    try {
      T out = v.get<T>();
      resolved_[key] = v;
      return out;
    } catch (const nlohmann::json::exception&) {
      throw_type_error(key, v);
    }
  }

  std::string str(const std::string& key, const std::string& fallback) { return get<std::string>(key, fallback); }
  // Strings or lists of strings; a string is split on commas.
  std::vector<std::string> list(const std::string& key, const std::vector<std::string>& fallback);
  std::uint64_t seed() { return get<std::uint64_t>("seed", 0); }
  std::filesystem::path out_dir() { return str("out", "out"); }

  nlohmann::json resolved() const;
  std::vector<std::string> unused_keys() const;

 private:
  [[noreturn]] static void throw_type_error(const std::string& key, const nlohmann::json& v);

  std::map<std::string, nlohmann::json> values_;
  std::map<std::string, nlohmann::json> resolved_;
};

std::vector<std::string> split(const std::string& text, char sep);

}  // namespace iclscope::cli
