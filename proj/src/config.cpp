#include "vibron/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace vibron {

namespace {

std::string trim(const std::string& text) {
  std::size_t begin = 0, end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin])))
    ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1])))
    --end;
  return text.substr(begin, end - begin);
}

double parse_double(const std::string& raw, int line) {
  const std::string value = trim(raw);
  double out = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc{} || res.ptr != last)
    throw ConfigError(line, 0, "expected a number, got '" + value + "'");
  return out;
}

}  // namespace

double ConfigEntry::as_double() const {
  if (is_list)
    throw ConfigError(line, 0, "key '" + key + "' expects a scalar, got a list");
  return parse_double(raw, line);
}

long long ConfigEntry::as_int() const {
  const double value = as_double();
  const auto rounded = static_cast<long long>(value);
  if (static_cast<double>(rounded) != value)
    throw ConfigError(line, 0, "key '" + key + "' expects an integer");
  return rounded;
}

bool ConfigEntry::as_bool() const {
  if (raw == "true" || raw == "yes" || raw == "1") return true;
  if (raw == "false" || raw == "no" || raw == "0") return false;
  throw ConfigError(line, 0, "key '" + key + "' expects true or false");
}

std::vector<double> ConfigEntry::as_double_list() const {
  if (!is_list)
    throw ConfigError(line, 0,
                      "key '" + key + "' expects an inline list [a, b, c]");
  std::vector<double> values;
  values.reserve(items.size());
  for (const auto& item : items) values.push_back(parse_double(item, line));
  return values;
}

const ConfigEntry* ConfigSection::find(const std::string& key) const {
  for (const auto& entry : entries)
    if (entry.key == key) return &entry;
  return nullptr;
}

const ConfigSection* RunConfig::find(const std::string& name) const {
  for (const auto& section : sections)
    if (section.name == name) return &section;
  return nullptr;
}

ConfigSection& RunConfig::get_or_create(const std::string& name) {
  for (auto& section : sections)
    if (section.name == name) return section;
  sections.push_back({name, {}, 0});
  return sections.back();
}

void RunConfig::set(const std::string& dotted_key, const std::string& value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == dotted_key.size())
    throw ConfigError(0, 0, "--set expects section.key=value, got '" +
                                dotted_key + "'");
  ConfigSection& section = get_or_create(dotted_key.substr(0, dot));
  const std::string key = dotted_key.substr(dot + 1);

  ConfigEntry entry;
  entry.key = key;
  entry.line = 0;
  std::string trimmed = trim(value);
  if (trimmed.size() >= 2 && trimmed.front() == '[' && trimmed.back() == ']') {
    entry.is_list = true;
    std::istringstream items(trimmed.substr(1, trimmed.size() - 2));
    std::string item;
    while (std::getline(items, item, ',')) entry.items.push_back(trim(item));
    entry.raw = trim(trimmed.substr(1, trimmed.size() - 2));
  } else {
    entry.raw = trimmed;
  }

  for (auto& existing : section.entries)
    if (existing.key == key) {
      existing = entry;
      return;
    }
  section.entries.push_back(std::move(entry));
}

bool RunConfig::equivalent(const RunConfig& other) const {
  if (sections.size() != other.sections.size()) return false;
  for (std::size_t s = 0; s < sections.size(); ++s) {
    const auto& a = sections[s];
    const auto& b = other.sections[s];
    if (a.name != b.name || a.entries.size() != b.entries.size()) return false;
    for (std::size_t e = 0; e < a.entries.size(); ++e) {
      const auto& ea = a.entries[e];
      const auto& eb = b.entries[e];
      if (ea.key != eb.key || ea.is_list != eb.is_list || ea.raw != eb.raw ||
          ea.items != eb.items)
        return false;
    }
  }
  return true;
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  ConfigSection* current = nullptr;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;

    if (content.front() == '[' && content.back() == ']') {
      const std::string name = trim(content.substr(1, content.size() - 2));
      if (name.empty())
        throw ConfigError(line_no, 1, "empty section name");
      if (config.find(name))
        throw ConfigError(line_no, 1, "duplicate section [" + name + "]");
      config.sections.push_back({name, {}, line_no});
      current = &config.sections.back();
      continue;
    }

    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line_no, 1,
                        "expected 'key = value' or a [section] header");
    if (!current)
      throw ConfigError(line_no, 1, "key outside of any section");

    ConfigEntry entry;
    entry.key = trim(content.substr(0, eq));
    entry.line = line_no;
    if (entry.key.empty())
      throw ConfigError(line_no, 1, "empty key");
    if (current->find(entry.key))
      throw ConfigError(line_no, 1,
                        "duplicate key '" + entry.key + "' in section [" +
                            current->name + "]");

    std::string value = trim(content.substr(eq + 1));
    if (!value.empty() && value.front() == '[') {
      if (value.back() != ']')
        throw ConfigError(line_no, static_cast<int>(eq + 2),
                          "unterminated inline list");
      entry.is_list = true;
      const std::string inner = value.substr(1, value.size() - 2);
      std::istringstream items(inner);
      std::string item;
      while (std::getline(items, item, ','))
        entry.items.push_back(trim(item));
      entry.raw = trim(inner);
    } else {
      entry.raw = value;
    }
    current->entries.push_back(std::move(entry));
  }
  return config;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& section : config.sections) {
    if (!out.empty()) out += '\n';
    out += "[" + section.name + "]\n";
    for (const auto& entry : section.entries) {
      out += entry.key + " = ";
      if (entry.is_list) {
        out += '[';
        for (std::size_t i = 0; i < entry.items.size(); ++i) {
          if (i) out += ", ";
          out += entry.items[i];
        }
        out += ']';
      } else {
        out += entry.raw;
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace vibron
