#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vibron {

// Config parse/validation failure with the offending source position.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, int column, const std::string& message)
      : std::runtime_error("config line " + std::to_string(line) +
                           (column > 0 ? ":" + std::to_string(column) : "") +
                           ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// One `key = value` entry; lists keep their bracketed items split.
struct ConfigEntry {
  std::string key;
  std::string raw;  // value text as written (inner items for lists)
  bool is_list = false;
  std::vector<std::string> items;
  int line = 0;

  double as_double() const;
  long long as_int() const;
  const std::string& as_string() const { return raw; }
  bool as_bool() const;
  std::vector<double> as_double_list() const;
};

struct ConfigSection {
  std::string name;
  std::vector<ConfigEntry> entries;
  int line = 0;

  const ConfigEntry* find(const std::string& key) const;
};

// Parsed run configuration: ordered sections of ordered key-value entries.
// '#' starts a comment; values are scalars or inline lists [a, b, c];
// duplicate keys within a section and duplicate section names are errors.
struct RunConfig {
  std::vector<ConfigSection> sections;

  const ConfigSection* find(const std::string& name) const;
  ConfigSection& get_or_create(const std::string& name);

  // last-wins override "section.key=value" (used by --set flags)
  void set(const std::string& dotted_key, const std::string& value);

  bool equivalent(const RunConfig& other) const;  // ignores line numbers
};

RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);
std::string serialize_config(const RunConfig& config);

}  // namespace vibron
