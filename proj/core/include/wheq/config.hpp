#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace wheq {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat sectioned key = value text. No expressions; coefficient functions are
// picked from a named registry with numeric parameters. The canonical emitted
// form sorts sections and keys, so parse(emit(parse(text))) == parse(text).
struct RunConfig {
  std::map<std::string, std::string> kv; // "section.key" -> value

  static RunConfig parse(const std::string& text);
  static RunConfig load_file(const std::string& path);
  std::string emit() const;

  void set(const std::string& dotted_key, const std::string& value);
  bool has(const std::string& dotted_key) const;
  std::string get(const std::string& dotted_key, const std::string& fallback = "") const;
  double get_double(const std::string& dotted_key, double fallback) const;
  int get_int(const std::string& dotted_key, int fallback) const;
  std::vector<double> get_doubles(const std::string& dotted_key) const; // whitespace-split

  bool operator==(const RunConfig& o) const { return kv == o.kv; }
};

// "name k=v k=v ..." descriptor into (name, numeric params). Non-numeric
// values are rejected.
struct Descriptor {
  std::string name;
  std::map<std::string, double> params;
  double param(const std::string& key, double fallback) const;
};
Descriptor parse_descriptor(const std::string& text);

} // namespace wheq
