#pragma once

#include <string>
#include <vector>

namespace cosshell {

// Numeric CSV with a single header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Throws InvalidConfig when the column is missing.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

// 17 significant digits; round-trips doubles exactly.
std::string format_number(double x);

// Joins already formatted cells with commas and a trailing LF.
std::string csv_line(const std::vector<std::string>& cells);
std::string csv_line(const std::vector<double>& values);

// Writes bytes verbatim (LF line endings on every platform).
void write_text_file(const std::string& path, const std::string& content);

}  // namespace cosshell
