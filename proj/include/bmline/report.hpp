#pragma once

#include <cstdio>
#include <string>
#include <variant>
#include <vector>

namespace bmline {

/// Deterministic shortest-roundtrip formatting used for every number the
/// artifact writes (CSV, snapshots, reports).
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Ordered key-value block; every summary number is emitted machine-readable.
class Report {
 public:
  void put(const std::string& key, double value) { items_.emplace_back(key, Value(value)); }
  void put(const std::string& key, bool value) { items_.emplace_back(key, Value(value)); }
  void put(const std::string& key, const std::string& value) { items_.emplace_back(key, Value(value)); }
  void put(const std::string& key, const char* value) { items_.emplace_back(key, Value(std::string(value))); }
  void put_int(const std::string& key, long long value) { items_.emplace_back(key, Value(value)); }

  bool has(const std::string& key) const {
    for (const auto& [k, v] : items_)
      if (k == key) return true;
    return false;
  }

  double get_double(const std::string& key) const {
    for (const auto& [k, v] : items_)
      if (k == key) return std::get<double>(v);
    throw std::invalid_argument("Report: no numeric key '" + key + "'");
  }

  bool get_bool(const std::string& key) const {
    for (const auto& [k, v] : items_)
      if (k == key) return std::get<bool>(v);
    throw std::invalid_argument("Report: no boolean key '" + key + "'");
  }

  std::string to_text() const {
    std::string out;
    for (const auto& [k, v] : items_) {
      out += k;
      out += " = ";
      out += value_str(v);
      out += '\n';
    }
    return out;
  }

 private:
  using Value = std::variant<double, bool, std::string, long long>;

  static std::string value_str(const Value& v) {
    if (std::holds_alternative<double>(v)) return format_double(std::get<double>(v));
    if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
    if (std::holds_alternative<long long>(v)) return std::to_string(std::get<long long>(v));
    return std::get<std::string>(v);
  }

  std::vector<std::pair<std::string, Value>> items_;
};

/// Value of a potential functional, its numerically measured time-rate
/// extremum, and the bound it must satisfy.
struct FunctionalReport {
  std::string name;
  double value = 0.0;          // functional value (context-dependent reference point)
  double measured_max = 0.0;   // worst measured rate/violation over the run
  double bound = 0.0;          // the bound the measurement must stay below
  bool holds = false;

  Report to_report() const {
    Report r;
    r.put("name", name);
    r.put("value", value);
    r.put("max_violation", measured_max);
    r.put("tol", bound);
    r.put("holds", holds);
    return r;
  }
};

}  // namespace bmline
