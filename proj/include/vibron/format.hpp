#pragma once

#include <string>
#include <vector>

namespace vibron {

// Locale-independent float formatting used for every CSV/report number:
// shortest general form with 9 significant digits, '.' decimal separator.
std::string format_g9(double value);

// One CSV line from already-formatted cells (no quoting; cells must not
// contain commas or newlines).
std::string csv_line(const std::vector<std::string>& cells);

}  // namespace vibron
