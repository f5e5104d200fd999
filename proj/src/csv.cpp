#include "lvb/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <system_error>

namespace lvb::csv {

std::string format(double value) {
  if (std::isnan(value)) return {};
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::general, 17);
  if (res.ec != std::errc{}) throw std::runtime_error("csv::format: to_chars failed");
  return std::string(buf, res.ptr);
}

void Writer::header(const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out_ << ',';
    out_ << names[i];
  }
  out_ << '\n';
}

void Writer::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ << ',';
    out_ << format(values[i]);
  }
  out_ << '\n';
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::out_of_range("csv: no column named " + std::string(name));
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

Table parse(std::string_view text) {
  Table table;
  bool first = true;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty()) continue;
    const auto cells = split(line);
    if (first) {
      for (auto c : cells) table.header.emplace_back(c);
      first = false;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw std::runtime_error("csv: row width differs from header");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto c : cells) {
      if (c.empty()) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      const std::string cell(c);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end != cell.c_str() + cell.size()) {
        throw std::runtime_error("csv: not a number: " + cell);
      }
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace lvb::csv
