#include "wheq/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace wheq {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

} // namespace

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": key outside any section");
    cfg.kv[section + "." + key] = value;
  }
  return cfg;
}

RunConfig RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::emit() const {
  std::ostringstream out;
  std::string current;
  for (const auto& [dk, value] : kv) {
    std::size_t dot = dk.find('.');
    std::string section = dk.substr(0, dot);
    std::string key = dk.substr(dot + 1);
    if (section != current) {
      if (!current.empty()) out << "\n";
      out << "[" << section << "]\n";
      current = section;
    }
    out << key << " = " << value << "\n";
  }
  return out.str();
}

void RunConfig::set(const std::string& dotted_key, const std::string& value) {
  if (dotted_key.find('.') == std::string::npos)
    throw ConfigError("config key must be section.key: " + dotted_key);
  kv[dotted_key] = value;
}

bool RunConfig::has(const std::string& dotted_key) const { return kv.count(dotted_key) > 0; }

std::string RunConfig::get(const std::string& dotted_key, const std::string& fallback) const {
  auto it = kv.find(dotted_key);
  return it == kv.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& dotted_key, double fallback) const {
  auto it = kv.find(dotted_key);
  if (it == kv.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config value for " + dotted_key + " is not a number: " + it->second);
  }
}

int RunConfig::get_int(const std::string& dotted_key, int fallback) const {
  auto it = kv.find(dotted_key);
  if (it == kv.end()) return fallback;
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw ConfigError("config value for " + dotted_key + " is not an integer: " + it->second);
  }
}

std::vector<double> RunConfig::get_doubles(const std::string& dotted_key) const {
  std::vector<double> out;
  auto it = kv.find(dotted_key);
  if (it == kv.end()) return out;
  std::istringstream in(it->second);
  double v;
  while (in >> v) out.push_back(v);
  return out;
}

double Descriptor::param(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

Descriptor parse_descriptor(const std::string& text) {
  Descriptor d;
  std::istringstream in(text);
  if (!(in >> d.name)) throw ConfigError("empty coefficient descriptor");
  std::string tok;
  while (in >> tok) {
    std::size_t eq = tok.find('=');
    if (eq == std::string::npos)
      throw ConfigError("descriptor parameter must be key=value: " + tok);
    std::string key = tok.substr(0, eq);
    try {
      d.params[key] = std::stod(tok.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("descriptor parameter is not numeric: " + tok);
    }
  }
  return d;
}

} // namespace wheq
