#include "htevim/options.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

namespace htevim {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

void Options::set(const std::string& key, const std::string& value) {
  entries_[trim(key)] = trim(value);
}

bool Options::has(const std::string& key) const {
  return entries_.count(key) > 0;
}

std::string Options::get_string(const std::string& key,
                                const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double Options::get_double(const std::string& key, double fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("option '" + key + "': not a number: " + it->second);
  }
}

int Options::get_int(const std::string& key, int fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    size_t pos = 0;
    const int v = std::stoi(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("option '" + key + "': not an integer: " + it->second);
  }
}

bool Options::get_bool(const std::string& key, bool fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string v = lower(it->second);
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::runtime_error("option '" + key + "': not a boolean: " + it->second);
}

std::uint64_t Options::get_u64(const std::string& key, std::uint64_t fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    size_t pos = 0;
    const unsigned long long v = std::stoull(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("option '" + key + "': not an unsigned integer: " +
                             it->second);
  }
}

std::vector<std::string> Options::get_list(
    const std::string& key, const std::vector<std::string>& fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<std::string> out;
  std::string cur;
  for (char c : it->second) {
    if (c == ',') {
      if (!trim(cur).empty()) out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

void Options::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty())
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": empty key");
    set(key, t.substr(eq + 1));
  }
}

}  // namespace htevim
