#include "cosshell/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cosshell/error.hpp"

namespace cosshell {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  return out;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return k;
  }
  throw Error(ErrorCode::InvalidConfig, "csv column '" + name + "' missing");
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  CsvTable t;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (t.header.empty()) {
      t.header = split(line);
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw Error(ErrorCode::InvalidConfig, "ragged row in " + path);
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(c, &used));
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidConfig, "non-numeric cell '" + c + "' in " + path);
      }
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw Error(ErrorCode::InvalidConfig, "empty csv " + path);
  return t;
}

std::string format_number(double x) {
  if (x == 0.0) return "0";  // folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) out += ',';
    out += cells[k];
  }
  out += '\n';
  return out;
}

std::string csv_line(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  return csv_line(cells);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

}  // namespace cosshell
