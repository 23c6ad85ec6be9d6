#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "parakernel/errors.hpp"

namespace parakernel {

/// Strict sectioned key=value configuration. Sections in brackets, comments
/// with '#', values typed by a fixed key schema. Unknown sections or keys,
/// duplicate keys, and type mismatches are ConfigErrors carrying line numbers.
class RunConfig {
 public:
  struct Entry {
    std::string value;
    int line = -1;
  };
  using Section = std::map<std::string, Entry>;

  bool hasSection(const std::string& name) const;
  bool has(const std::string& section, const std::string& key) const;

  std::string getString(const std::string& section, const std::string& key,
                        const std::string& fallback) const;
  double getDouble(const std::string& section, const std::string& key,
                   double fallback) const;
  int getInt(const std::string& section, const std::string& key, int fallback) const;
  std::uint64_t getUInt64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;

  /// Requires the section to exist (config error naming it otherwise).
  const Section& section(const std::string& name) const;
  const std::map<std::string, Section>& sections() const { return sections_; }
  std::vector<std::string> sectionNames(const std::string& prefix) const;

  void set(const std::string& section, const std::string& key,
           const std::string& value, int line = -1);

 private:
  std::map<std::string, Section> sections_;
};

RunConfig parseConfig(const std::string& text);
RunConfig parseConfigFile(const std::string& path);

/// Normalized text form: sections and keys in sorted order, "key = value"
/// lines. parse(serialize(parse(t))) preserves all values.
std::string serializeConfig(const RunConfig& cfg);

/// Applies one "section.key=value" override with schema validation.
void applyOverride(RunConfig& cfg, const std::string& assignment);

}  // namespace parakernel
