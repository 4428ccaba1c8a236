#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "survc/errors.hpp"

namespace survc {

/// Parsed CSV: one header row plus rows of string cells (comma separated,
/// no quoting — the formats here are purely numeric/identifier columns).
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_index(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j)
      if (header[j] == name) return j;
    throw data_error("column '" + name + "' not found in CSV header");
  }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cells.push_back(cur);
  return cells;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open file: " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw data_error("empty file: " + path.string());
  table.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != table.header.size())
      throw data_error("row " + std::to_string(table.rows.size() + 1) + " of " +
                       path.string() + " has " + std::to_string(cells.size()) +
                       " cells, expected " + std::to_string(table.header.size()));
    table.rows.push_back(std::move(cells));
  }
  return table;
}

/// Parse one cell as a finite double; errors carry 1-based row and column name.
inline double parse_cell(const std::string& cell, std::size_t row,
                         const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value))
    throw data_error("unparsable value '" + cell + "' in row " +
                     std::to_string(row) + ", column '" + column + "'");
  return value;
}

/// Shortest decimal form that round-trips the exact double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back = 0.0;
  std::from_chars(buf, buf + std::string_view(buf).size(), back);
  if (back == v) {
    for (int prec = 1; prec < 17; ++prec) {
      char shorter[40];
      std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
      std::from_chars(shorter, shorter + std::string_view(shorter).size(), back);
      if (back == v) return shorter;
    }
  }
  return buf;
}

/// Write a file atomically: temp file in the same directory, then rename.
inline void atomic_write(const std::filesystem::path& path,
                         const std::string& contents) {
  namespace fs = std::filesystem;
  fs::path dir = path.parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cannot write file: " + tmp.string());
    out << contents;
    if (!out) throw data_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace survc
