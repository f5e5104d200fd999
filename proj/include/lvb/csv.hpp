#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace lvb::csv {

// 17 significant digits in %g style, so strtod gives back the same double.
// NaN becomes an empty cell.
std::string format(double value);

// Comma-separated rows with LF line endings.
class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;  // empty cells parse as NaN

  // Index of a column, or throws std::out_of_range.
  std::size_t column(std::string_view name) const;
};

Table parse(std::string_view text);

}  // namespace lvb::csv
