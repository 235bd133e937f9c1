#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace uavris {

// Raised for malformed files, unknown keys, bad values. The CLI maps this
// to exit code 1 (validation error) as opposed to runtime failures (2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat UTF-8 key=value config. '#' starts a comment, blank lines ignored,
// duplicate keys rejected. Ranges/lists are comma-separated values.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  const std::string& get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;

  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;

  std::uint64_t get_u64(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

  // "lo,hi" pairs, e.g. building_wh_range=4,12
  std::pair<double, double> get_range(const std::string& key) const;
  std::pair<double, double> get_range(const std::string& key,
                                      std::pair<double, double> fallback) const;

  std::vector<std::string> get_list(const std::string& key) const;

  void set(const std::string& key, const std::string& value);

  // Throws ConfigError naming the first key not in `known`.
  void ensure_known_keys(const std::set<std::string>& known) const;

  const std::map<std::string, std::string>& values() const { return values_; }

  std::string to_string() const;

 private:
  double parse_double(const std::string& key, const std::string& raw) const;

  std::map<std::string, std::string> values_;
};

}  // namespace uavris
