#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace predlab {

// Deterministic CSV tables: shortest round-trip formatting for reals, UTF-8,
// decimal dot, one optional '#' metadata line above the header row.
struct CsvCell {
  std::variant<int64_t, double, std::string> value;

  CsvCell(int64_t v) : value(v) {}
  CsvCell(int v) : value(static_cast<int64_t>(v)) {}
  CsvCell(size_t v) : value(static_cast<int64_t>(v)) {}
  CsvCell(double v) : value(v) {}
  CsvCell(std::string v) : value(std::move(v)) {}
  CsvCell(const char* v) : value(std::string(v)) {}
};

struct Table {
  std::string name;
  std::string meta;  // rendered as "# meta" above the header when nonempty
  std::vector<std::string> columns;
  std::vector<std::vector<CsvCell>> rows;

  void add_row(std::vector<CsvCell> cells);
};

std::string format_double(double v);  // shortest exact decimal form
std::string render_csv(const Table& t);
void write_csv_file(const Table& t, const std::string& path);

}  // namespace predlab
