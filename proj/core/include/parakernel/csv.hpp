#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace parakernel {

/// Table destined for an RFC-4180-compatible CSV artifact: '.' decimal
/// separator, '\n' newlines, 17-significant-digit doubles, one leading
/// comment line carrying the run seed.
class CsvTable {
 public:
  using Cell = std::variant<double, std::int64_t, std::string>;

  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void addRow(std::vector<Cell> row);
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rowCount() const { return rows_.size(); }

  std::string serialize(std::uint64_t seed) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

/// Writes the table to `path`, creating parent directories.
void emitCSV(const CsvTable& table, const std::string& path, std::uint64_t seed);

std::string formatDouble(double v);

}  // namespace parakernel
