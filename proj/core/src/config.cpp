#include "uavris/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace uavris {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        " is not key=value: '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + " has empty key");
    if (cfg.values_.count(key))
      throw ConfigError("duplicate config key: " + key);
    cfg.values_[key] = value;
  }
  return cfg;
}

const std::string& KeyValueConfig::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::parse_double(const std::string& key,
                                    const std::string& raw) const {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(raw.c_str(), &end);
  if (end == raw.c_str() || *end != '\0' || errno == ERANGE)
    throw ConfigError("config key '" + key + "' has non-numeric value '" + raw + "'");
  return v;
}

double KeyValueConfig::get_double(const std::string& key) const {
  return parse_double(key, get_string(key));
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long KeyValueConfig::get_int(const std::string& key) const {
  const std::string& raw = get_string(key);
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(raw.c_str(), &end, 10);
  if (end == raw.c_str() || *end != '\0' || errno == ERANGE)
    throw ConfigError("config key '" + key + "' has non-integer value '" + raw + "'");
  return v;
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key) const {
  const std::string& raw = get_string(key);
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw.c_str(), &end, 10);
  if (end == raw.c_str() || *end != '\0' || errno == ERANGE)
    throw ConfigError("config key '" + key + "' has non-u64 value '" + raw + "'");
  return v;
}

std::uint64_t KeyValueConfig::get_u64(const std::string& key,
                                      std::uint64_t fallback) const {
  return has(key) ? get_u64(key) : fallback;
}

std::pair<double, double> KeyValueConfig::get_range(const std::string& key) const {
  const std::string& raw = get_string(key);
  const auto comma = raw.find(',');
  if (comma == std::string::npos)
    throw ConfigError("config key '" + key + "' expects 'lo,hi', got '" + raw + "'");
  const double lo = parse_double(key, trim(raw.substr(0, comma)));
  const double hi = parse_double(key, trim(raw.substr(comma + 1)));
  if (lo > hi)
    throw ConfigError("config key '" + key + "' has lo > hi: '" + raw + "'");
  return {lo, hi};
}

std::pair<double, double> KeyValueConfig::get_range(
    const std::string& key, std::pair<double, double> fallback) const {
  return has(key) ? get_range(key) : fallback;
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key) const {
  const std::string& raw = get_string(key);
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(raw);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

void KeyValueConfig::ensure_known_keys(const std::set<std::string>& known) const {
  for (const auto& [key, _] : values_)
    if (!known.count(key)) throw ConfigError("unknown config key: " + key);
}

std::string KeyValueConfig::to_string() const {
  std::ostringstream out;
  for (const auto& [key, value] : values_) out << key << "=" << value << "\n";
  return out.str();
}

}  // namespace uavris
