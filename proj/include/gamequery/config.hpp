#pragma once

/// Flat key = value configuration files.
///
/// Grammar, one entry per line:
///   - blank lines and lines whose first non-space character is '#' are
///     ignored;
///   - otherwise the line must contain '=': the trimmed left part is the
///     key, the trimmed right part the value (the value may be empty);
///   - a repeated key overwrites the earlier value (command-line overrides
///     reuse this rule).

#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gq {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim_copy(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

class Config {
 public:
  static Config parse(std::istream& in) {
    Config cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string t = detail::trim_copy(line);
      if (t.empty() || t[0] == '#') continue;
      std::size_t eq = t.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": expected 'key = value', got '" + t + "'");
      }
      std::string key = detail::trim_copy(t.substr(0, eq));
      std::string value = detail::trim_copy(t.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
      }
      cfg.values_[key] = value;
    }
    return cfg;
  }

  static Config parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse(in);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  const std::string& get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
  }

  std::string get_or(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  long long get_int(const std::string& key) const {
    const std::string& v = get(key);
    try {
      std::size_t used = 0;
      long long out = std::stoll(v, &used);
      if (used != v.size()) throw std::invalid_argument{""};
      return out;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not an integer: '" + v + "'");
    }
  }

  long long get_int_or(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
  }

  double get_double(const std::string& key) const {
    const std::string& v = get(key);
    try {
      std::size_t used = 0;
      double out = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument{""};
      return out;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' is not a number: '" + v + "'");
    }
  }

  double get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace gq
