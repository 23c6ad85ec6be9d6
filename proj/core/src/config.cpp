#include "parakernel/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace parakernel {

namespace {

enum class KeyType { String, Double, Int, UInt64 };

struct KeySchema {
  const char* key;
  KeyType type;
};

struct SectionSchema {
  const char* name;  // exact name, or prefix ending in '.' for families
  std::vector<KeySchema> keys;
};

const std::vector<SectionSchema>& schema() {
  static const std::vector<SectionSchema> s = {
      {"run",
       {{"seed", KeyType::UInt64}, {"out_dir", KeyType::String}}},
      {"geometry",
       {{"kind", KeyType::String},
        {"N", KeyType::Int},
        {"beta", KeyType::Double},
        {"blend_radius", KeyType::Double},
        {"grid.decades", KeyType::Double},
        {"grid.per_decade", KeyType::Int}}},
      {"potential.",
       {{"kind", KeyType::String},
        {"center", KeyType::Double},
        {"width", KeyType::Double},
        {"amplitude", KeyType::Double},
        {"exponent", KeyType::Double},
        {"coupling", KeyType::Double},
        {"inner", KeyType::String},
        {"terms", KeyType::String}}},
      {"profile",
       {{"potential", KeyType::String},
        {"r_max", KeyType::Double},
        {"tol", KeyType::Double}}},
      {"classify",
       {{"potential", KeyType::String},
        {"r_max", KeyType::Double},
        {"tol", KeyType::Double},
        {"flux_threshold", KeyType::Double},
        {"growth_threshold", KeyType::Double}}},
      {"coupling",
       {{"w1", KeyType::String},
        {"w2", KeyType::String},
        {"q", KeyType::String},
        {"c_lo", KeyType::Double},
        {"c_hi", KeyType::Double},
        {"tol", KeyType::Double}}},
      {"green",
       {{"q", KeyType::String},
        {"r_min", KeyType::Double},
        {"r_max", KeyType::Double},
        {"per_decade", KeyType::Int}}},
      {"kato",
       {{"potential", KeyType::String}, {"r_max", KeyType::Double}}},
      {"heat",
       {{"potential", KeyType::String},
        {"r_min", KeyType::Double},
        {"r_max", KeyType::Double},
        {"per_decade", KeyType::Int},
        {"t_max", KeyType::Double},
        {"theta", KeyType::Double},
        {"dt", KeyType::Double},
        {"guard_multiple", KeyType::Double},
        {"delta_width_cells", KeyType::Double},
        {"record_count", KeyType::Int},
        {"record_t_min", KeyType::Double}}},
      {"bounds",
       {{"envelope", KeyType::String},
        {"band_limit", KeyType::Double},
        {"exponent_lo", KeyType::Double},
        {"exponent_hi", KeyType::Double},
        {"r_factor", KeyType::Double},
        {"t_min", KeyType::Double},
        {"t_max", KeyType::Double}}},
      {"montecarlo",
       {{"potential", KeyType::String},
        {"q", KeyType::String},
        {"x0", KeyType::Double},
        {"horizon", KeyType::Double},
        {"dt", KeyType::Double},
        {"paths", KeyType::Int}}},
  };
  return s;
}

const SectionSchema* findSectionSchema(const std::string& name) {
  for (const auto& s : schema()) {
    const std::string sname = s.name;
    if (!sname.empty() && sname.back() == '.') {
      if (name.size() > sname.size() && name.compare(0, sname.size(), sname) == 0) {
        return &s;
      }
    } else if (name == sname) {
      return &s;
    }
  }
  return nullptr;
}

const KeySchema* findKeySchema(const SectionSchema& s, const std::string& key) {
  for (const auto& k : s.keys) {
    if (key == k.key) return &k;
  }
  return nullptr;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

void validateTyped(const std::string& section, const std::string& key,
                   const std::string& value, int line) {
  const SectionSchema* ss = findSectionSchema(section);
  if (!ss) throw ConfigError("unknown section [" + section + "]", line);
  const KeySchema* ks = findKeySchema(*ss, key);
  if (!ks) {
    throw ConfigError("unknown key '" + key + "' in section [" + section + "]",
                      line);
  }
  const char* c = value.c_str();
  char* end = nullptr;
  switch (ks->type) {
    case KeyType::String:
      if (value.empty()) {
        throw ConfigError("empty value for '" + key + "'", line);
      }
      break;
    case KeyType::Double: {
      std::strtod(c, &end);
      if (end == c || *end != '\0') {
        throw ConfigError("value of '" + key + "' must be a number, got '" +
                          value + "'", line);
      }
      break;
    }
    case KeyType::Int: {
      std::strtol(c, &end, 10);
      if (end == c || *end != '\0') {
        throw ConfigError("value of '" + key + "' must be an integer, got '" +
                          value + "'", line);
      }
      break;
    }
    case KeyType::UInt64: {
      if (!value.empty() && value[0] == '-') {
        throw ConfigError("value of '" + key + "' must be nonnegative", line);
      }
      std::strtoull(c, &end, 10);
      if (end == c || *end != '\0') {
        throw ConfigError("value of '" + key + "' must be an unsigned integer",
                          line);
      }
      break;
    }
  }
}

}  // namespace

bool RunConfig::hasSection(const std::string& name) const {
  return sections_.count(name) > 0;
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key) > 0;
}

std::string RunConfig::getString(const std::string& section, const std::string& key,
                                 const std::string& fallback) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return fallback;
  auto kt = it->second.find(key);
  return kt == it->second.end() ? fallback : kt->second.value;
}

double RunConfig::getDouble(const std::string& section, const std::string& key,
                            double fallback) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return fallback;
  auto kt = it->second.find(key);
  if (kt == it->second.end()) return fallback;
  return std::strtod(kt->second.value.c_str(), nullptr);
}

int RunConfig::getInt(const std::string& section, const std::string& key,
                      int fallback) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return fallback;
  auto kt = it->second.find(key);
  if (kt == it->second.end()) return fallback;
  return static_cast<int>(std::strtol(kt->second.value.c_str(), nullptr, 10));
}

std::uint64_t RunConfig::getUInt64(const std::string& section,
                                   const std::string& key,
                                   std::uint64_t fallback) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return fallback;
  auto kt = it->second.find(key);
  if (kt == it->second.end()) return fallback;
  return std::strtoull(kt->second.value.c_str(), nullptr, 10);
}

const RunConfig::Section& RunConfig::section(const std::string& name) const {
  auto it = sections_.find(name);
  if (it == sections_.end()) {
    throw ConfigError("missing required section [" + name + "]");
  }
  return it->second;
}

std::vector<std::string> RunConfig::sectionNames(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [name, _] : sections_) {
    if (name.size() > prefix.size() && name.compare(0, prefix.size(), prefix) == 0) {
      out.push_back(name);
    }
  }
  return out;
}

void RunConfig::set(const std::string& section, const std::string& key,
                    const std::string& value, int line) {
  validateTyped(section, key, value, line);
  sections_[section][key] = Entry{value, line};
}

RunConfig parseConfig(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string current;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("malformed section header '" + line + "'", lineNo);
      }
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty()) throw ConfigError("empty section name", lineNo);
      if (!findSectionSchema(current)) {
        throw ConfigError("unknown section [" + current + "]", lineNo);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected 'key = value', got '" + line + "'", lineNo);
    }
    if (current.empty()) {
      throw ConfigError("key outside of any section", lineNo);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", lineNo);
    if (cfg.has(current, key)) {
      throw ConfigError("duplicate key '" + key + "' in section [" + current + "]",
                        lineNo);
    }
    cfg.set(current, key, value, lineNo);
  }
  return cfg;
}

RunConfig parseConfigFile(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parseConfig(ss.str());
}

std::string serializeConfig(const RunConfig& cfg) {
  std::string out;
  for (const auto& [name, section] : cfg.sections()) {
    out += "[" + name + "]\n";
    for (const auto& [key, entry] : section) {
      out += key + " = " + entry.value + "\n";
    }
    out += "\n";
  }
  return out;
}

void applyOverride(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("--set expects section.key=value, got '" + assignment + "'");
  }
  const std::string path = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const auto dot = path.rfind('.');
  if (dot == std::string::npos) {
    throw ConfigError("--set expects section.key=value, got '" + assignment + "'");
  }
  std::string section = path.substr(0, dot);
  std::string key = path.substr(dot + 1);
  // Keys may themselves be dotted (grid.per_decade): prefer a schema section
  // match on the longest prefix.
  while (!findSectionSchema(section)) {
    const auto d2 = section.rfind('.');
    if (d2 == std::string::npos) break;
    key = section.substr(d2 + 1) + "." + key;
    section = section.substr(0, d2);
  }
  cfg.set(section, key, value);
}

}  // namespace parakernel
