#include "vibron/format.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace vibron {

std::string format_g9(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) value = 0.0;  // normalize -0
  char buf[48];
  auto res = std::to_chars(buf, buf + sizeof(buf), value,
                           std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  return line;
}

}  // namespace vibron
