#pragma once

// Flat key/value experiment configuration.
//
//   # comment
//   task = capacity
//   group = R2
//   [geometry]
//   inner = 1          -> key "geometry.inner"
//
// Keys are [a-z0-9_.]; values run to the end of the line (trimmed). Later
// assignments override earlier ones. Environment variables CARNOT_<KEY>, with
// '.' written as "__" and letters upper-cased, override file values.

#include "carnot/common.hpp"
#include "carnot/format.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace carnot
{

inline constexpr std::string_view kEnvPrefix = "CARNOT_";

class Config
{
 public:
  static Config parse(std::string_view text)
  {
    Config cfg;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      const std::string s = trim(line);
      if (s.empty() || s[0] == '#' || s[0] == ';') continue;
      if (s.front() == '[') {
        if (s.back() != ']') fail(ErrorCode::config, "line " + std::to_string(number) + ": unterminated section");
        section = trim(s.substr(1, s.size() - 2));
        if (!section.empty()) check_key(section, number);
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) fail(ErrorCode::config, "line " + std::to_string(number) + ": expected key = value");
      std::string key = trim(s.substr(0, eq));
      check_key(key, number);
      if (!section.empty()) key = section + "." + key;
      cfg.set(key, trim(s.substr(eq + 1)));
    }
    return cfg;
  }

  static Config load(const std::string& path)
  {
    std::ifstream f(path);
    if (!f) fail(ErrorCode::config, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
  }

  // Top-level keys first, then one [section] per dotted prefix, keys sorted.
  std::string serialize() const
  {
    std::ostringstream out;
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
    for (const auto& [k, v] : values_) {
      const auto dot = k.find('.');
      if (dot == std::string::npos) {
        out << k << " = " << v << '\n';
      } else {
        sections[k.substr(0, dot)].emplace_back(k.substr(dot + 1), v);
      }
    }
    for (const auto& [name, entries] : sections) {
      out << "\n[" << name << "]\n";
      for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
    }
    return out.str();
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get(const std::string& key, const std::string& fallback) const
  {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::string require_string(const std::string& key) const
  {
    auto it = values_.find(key);
    if (it == values_.end()) fail(ErrorCode::config, "missing config key '" + key + "'");
    return it->second;
  }

  double get_double(const std::string& key, double fallback) const
  {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return parse_double(it->second);
    } catch (const Error&) {
      fail(ErrorCode::config, "config key '" + key + "' is not a number: '" + it->second + "'");
    }
  }

  long long get_int(const std::string& key, long long fallback) const
  {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return parse_integer(it->second);
    } catch (const Error&) {
      fail(ErrorCode::config, "config key '" + key + "' is not an integer: '" + it->second + "'");
    }
  }

  bool get_bool(const std::string& key, bool fallback) const
  {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    fail(ErrorCode::config, "config key '" + key + "' is not a boolean: '" + v + "'");
  }

  // Items of a list value separated by `sep`, trimmed, empties dropped.
  std::vector<std::string> get_list(const std::string& key, char sep, const std::vector<std::string>& fallback = {}) const
  {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(it->second);
    while (std::getline(in, item, sep)) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback = {}) const
  {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const auto& s : get_list(key, ',')) {
      try {
        out.push_back(parse_double(s));
      } catch (const Error&) {
        fail(ErrorCode::config, "config key '" + key + "' has a non-numeric item '" + s + "'");
      }
    }
    return out;
  }

  static std::string env_name(const std::string& key)
  {
    std::string out(kEnvPrefix);
    for (char c : key) {
      if (c == '.') {
        out += "__";
      } else {
        out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      }
    }
    return out;
  }

  static std::string key_from_env(std::string_view name)
  {
    std::string out;
    name.remove_prefix(kEnvPrefix.size());
    for (std::size_t i = 0; i < name.size(); ++i) {
      if (name[i] == '_' && i + 1 < name.size() && name[i + 1] == '_') {
        out += '.';
        ++i;
      } else {
        out += static_cast<char>(std::tolower(static_cast<unsigned char>(name[i])));
      }
    }
    return out;
  }

  // Applies CARNOT_* variables from an environment block (envp style).
  void apply_environment(char** envp)
  {
    if (!envp) return;
    for (char** e = envp; *e; ++e) {
      const std::string_view entry(*e);
      if (entry.substr(0, kEnvPrefix.size()) != kEnvPrefix) continue;
      const auto eq = entry.find('=');
      if (eq == std::string_view::npos) continue;
      const std::string key = key_from_env(entry.substr(0, eq));
      if (key.empty()) continue;
      set(key, std::string(entry.substr(eq + 1)));
    }
  }

  friend bool operator==(const Config& a, const Config& b) { return a.values_ == b.values_; }

 private:
  static std::string trim(const std::string& s)
  {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  static void check_key(const std::string& key, int line)
  {
    if (key.empty()) fail(ErrorCode::config, "line " + std::to_string(line) + ": empty key");
    for (char c : key)
      if (!(std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_' ||
            c == '.'))
        fail(ErrorCode::config, "line " + std::to_string(line) + ": bad key '" + key + "'");
  }

  std::map<std::string, std::string> values_;
};

}  // namespace carnot
