#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace bmline {

/// Flat key=value configuration file. '#' starts a comment; blank lines
/// ignored; keys are single tokens; values are everything after '='.
class Config {
 public:
  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
  }

  static Config parse_text(const std::string& text, const std::string& origin = "<text>") {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                    ": expected key=value, got '" + line + "'");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": empty key");
      if (cfg.values_.count(key))
        throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                                    key + "'");
      cfg.values_[key] = value;
    }
    return cfg;
  }

  bool has(const std::string& key) const {
    touched_.insert(key);
    return values_.count(key) != 0;
  }

  std::string get_string(const std::string& key) const {
    touched_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end())
      throw std::invalid_argument(origin_ + ": missing required key '" + key + "'");
    return it->second;
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    touched_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key) const { return to_double(key, get_string(key)); }

  double get_double(const std::string& key, double fallback) const {
    touched_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? fallback : to_double(key, it->second);
  }

  long long get_int(const std::string& key, long long fallback) const {
    touched_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      std::size_t pos = 0;
      long long v = std::stoll(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw std::invalid_argument(origin_ + ": key '" + key + "' is not an integer: '" +
                                  it->second + "'");
    }
  }

  bool get_bool(const std::string& key, bool fallback) const {
    touched_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw std::invalid_argument(origin_ + ": key '" + key + "' is not a boolean: '" + it->second +
                                "'");
  }

  /// comma-separated doubles
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback = {}) const {
    touched_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::istringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (tok.empty()) continue;
      out.push_back(to_double(key, tok));
    }
    return out;
  }

  /// Every key must have been looked up; anything else is unknown.
  void reject_unknown_keys() const {
    std::vector<std::string> unknown;
    for (const auto& [k, v] : values_)
      if (!touched_.count(k)) unknown.push_back(k);
    if (!unknown.empty()) {
      std::string msg = origin_ + ": unknown keys:";
      for (const auto& k : unknown) msg += " '" + k + "'";
      throw std::invalid_argument(msg);
    }
  }

  const std::string& origin() const { return origin_; }

 private:
  static std::string trim(std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
  }

  double to_double(const std::string& key, const std::string& text) const {
    try {
      std::size_t pos = 0;
      double v = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw std::invalid_argument(origin_ + ": key '" + key + "' is not a number: '" + text + "'");
    }
  }

  std::string origin_;
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> touched_;
};

}  // namespace bmline
