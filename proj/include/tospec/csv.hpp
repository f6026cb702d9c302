#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tospec::csv {

/// Fixed, locale-independent rendering with `precision` significant digits.
std::string format(double value, int precision = 17);

std::vector<std::string> split(std::string_view line, char sep = ',');

/// Writes one comma-separated row of numbers.
void write_row(std::ostream& os, const std::vector<double>& values, int precision);

void write_header(std::ostream& os, const std::vector<std::string>& columns);

}  // namespace tospec::csv
