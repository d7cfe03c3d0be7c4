#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace plumesearch {

// Sectioned key/value config text:
//   [section]
//   key = value        # comment
// Unknown keys are tolerated; typed getters fall back to defaults.
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;
  std::vector<std::string> sections_with_prefix(const std::string& prefix) const;

  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& section, const std::string& key,
                                      const std::vector<double>& fallback) const;

  const std::string& origin() const { return origin_; }

 private:
  std::string raw(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& what) const;

  std::string origin_;
  std::map<std::string, std::map<std::string, std::string>> values_;
};

}  // namespace plumesearch
