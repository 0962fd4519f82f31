#pragma once

#include <string>
#include <vector>

namespace tdcache {

// Shortest round-trip text of x with '.' as decimal separator, independent of
// the process locale. Infinities print as "inf" and "-inf", NaN as "nan".
std::string format_number(double x);
// Fixed significant digits, locale independent.
std::string format_number(double x, int significant);

// Header plus rows; every cell is already formatted.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace tdcache
