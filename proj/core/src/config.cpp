#include "heatlab/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace heatlab {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

LabConfig LabConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  require(is.good(), "cannot open config file: " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_string(ss.str(), path.string());
}

LabConfig LabConfig::parse_string(const std::string& text, const std::string& origin) {
  LabConfig cfg;
  cfg.origin_ = origin;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    auto where = [&] { return origin + ":" + std::to_string(lineno) + ": "; };
    if (t.front() == '[') {
      require(t.back() == ']' && t.size() > 2, where() + "malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      require(!section.empty(), where() + "empty section name");
      continue;
    }
    std::size_t eq = t.find('=');
    require(eq != std::string::npos, where() + "expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    require(!key.empty(), where() + "empty key");
    std::string full = section.empty() ? key : section + "." + key;
    require(cfg.values_.count(full) == 0, where() + "duplicate key '" + full + "'");
    cfg.values_[full] = val;
  }
  return cfg;
}

std::string LabConfig::get_str(const std::string& key) const {
  auto it = values_.find(key);
  require(it != values_.end(), origin_ + ": missing required key '" + key + "'");
  return it->second;
}

std::string LabConfig::get_str(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double LabConfig::get_real(const std::string& key) const {
  std::string s = get_str(key);
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    require(pos == s.size(), "");
    return v;
  } catch (...) {
    throw config_error(origin_ + ": key '" + key + "' is not a real number: '" + s + "'");
  }
}

double LabConfig::get_real(const std::string& key, double fallback) const {
  return has(key) ? get_real(key) : fallback;
}

std::int64_t LabConfig::get_int(const std::string& key) const {
  std::string s = get_str(key);
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && p == s.data() + s.size(),
          origin_ + ": key '" + key + "' is not an integer: '" + s + "'");
  return v;
}

std::int64_t LabConfig::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::vector<double> LabConfig::get_reals(const std::string& key) const {
  std::string s = get_str(key);
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    require(!tok.empty(), origin_ + ": empty element in list '" + key + "'");
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      require(pos == tok.size(), "");
    } catch (...) {
      throw config_error(origin_ + ": bad real '" + tok + "' in list '" + key + "'");
    }
  }
  require(!out.empty(), origin_ + ": empty list for key '" + key + "'");
  return out;
}

}  // namespace heatlab
