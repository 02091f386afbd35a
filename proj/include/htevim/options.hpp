#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace htevim {

// Flat key-value configuration shared by the config file, the CLI and the C
// API. Keys are dotted lowercase strings; values are parsed on access.
class Options {
 public:
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  // Comma-separated list value.
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& fallback) const;

  // Parses "key = value" lines; '#' starts a comment. Later keys override
  // earlier ones. Throws std::runtime_error with a line number on bad syntax.
  void load_file(const std::string& path);

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace htevim
