#include "core/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "core/errors.hpp"

namespace predlab {

void Table::add_row(std::vector<CsvCell> cells) {
  if (cells.size() != columns.size())
    fail(Errc::internal, "csv row arity mismatch in table " + name);
  rows.push_back(std::move(cells));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {
std::string escape(const std::string& s) {
  bool needs = s.find_first_of(",\"\n") != std::string::npos;
  if (!needs) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

std::string cell_text(const CsvCell& c) {
  if (std::holds_alternative<int64_t>(c.value)) return std::to_string(std::get<int64_t>(c.value));
  if (std::holds_alternative<double>(c.value)) return format_double(std::get<double>(c.value));
  return escape(std::get<std::string>(c.value));
}
}  // namespace

std::string render_csv(const Table& t) {
  std::string out;
  if (!t.meta.empty()) out += "# " + t.meta + "\n";
  for (size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ",";
    out += escape(t.columns[i]);
  }
  out += "\n";
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += cell_text(row[i]);
    }
    out += "\n";
  }
  return out;
}

void write_csv_file(const Table& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot open for writing: " + path);
  out << render_csv(t);
  if (!out) fail(Errc::io_error, "write failed: " + path);
}

}  // namespace predlab
