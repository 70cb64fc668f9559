// config.hpp - flat key = value run configuration
//
//   # comment
//   delays = [0, 1, 2]
//   gamma  = 0.6
//
// Every key has a default (see config_keys()). Later assignments win, so CLI
// overrides are applied with set() after the file is loaded.

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cbwcs/harness.hpp"

namespace cbwcs {

struct ConfigKey {
  std::string_view name;
  std::string_view default_value;
  std::string_view help;
};

/// All recognised keys in documentation order.
const std::vector<ConfigKey>& config_keys();

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class KeyValueConfig {
 public:
  /// Starts with every key at its default.
  KeyValueConfig();

  /// Parses `text`; `origin` only labels error messages.
  void merge_text(std::string_view text, std::string_view origin = "<text>");
  void merge_file(const std::filesystem::path& path);
  /// Single override. Unknown keys throw ConfigError.
  void set(std::string_view key, std::string_view value);
  /// "key=value" form used by the CLI.
  void set_assignment(std::string_view assignment);

  const std::string& get(std::string_view key) const;
  /// True once the key was assigned by a file or an override.
  bool is_set(std::string_view key) const;
  const std::map<std::string, std::string, std::less<>>& values() const { return values_; }

  SimConfig to_sim_config() const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
  std::map<std::string, bool, std::less<>> explicit_;
};

/// "[a, b, c]" or "a, b, c"; an empty string or "[]" gives an empty list.
std::vector<std::string> parse_list(std::string_view s);
double parse_double(std::string_view s, std::string_view key);
long long parse_int(std::string_view s, std::string_view key);
bool parse_bool(std::string_view s, std::string_view key);

}  // namespace cbwcs
