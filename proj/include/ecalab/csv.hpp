#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace ecalab {

using CsvCell = std::variant<std::int64_t, double, std::string>;

/// Header row plus homogeneous rows. Doubles are written with 17 significant digits so a
/// write/parse round trip is exact.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;

  void validate() const;
  std::size_t column(const std::string& name) const;
};

std::string format_double(double value);
std::string to_csv_string(const CsvTable& table);
void emit_csv(const CsvTable& table, const std::string& path);

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

double cell_as_double(const CsvCell& cell);

}  // namespace ecalab
