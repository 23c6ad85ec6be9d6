#include "parakernel/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "parakernel/errors.hpp"

namespace parakernel {

namespace {

std::string escapeField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

std::string formatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void CsvTable::addRow(std::vector<Cell> row) {
  if (row.size() != header_.size()) {
    throw DomainError("CSV row width does not match the header");
  }
  rows_.push_back(std::move(row));
}

std::string CsvTable::serialize(std::uint64_t seed) const {
  std::string out = "# seed=" + std::to_string(seed) + "\n";
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) out += ",";
    out += escapeField(header_[i]);
  }
  out += "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      if (const auto* d = std::get_if<double>(&row[i])) {
        out += formatDouble(*d);
      } else if (const auto* n = std::get_if<std::int64_t>(&row[i])) {
        out += std::to_string(*n);
      } else {
        out += escapeField(std::get<std::string>(row[i]));
      }
    }
    out += "\n";
  }
  return out;
}

void emitCSV(const CsvTable& table, const std::string& path, std::uint64_t seed) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::filesystem::create_directories(p.parent_path());
  }
  std::ofstream f(p, std::ios::binary);
  if (!f) throw NumericError("cannot open " + path + " for writing");
  f << table.serialize(seed);
}

}  // namespace parakernel
