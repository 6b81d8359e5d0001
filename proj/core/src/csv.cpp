#include "hybridbn/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>

namespace hbn {

std::string format_number(double v) {
  // %.6g semantics without locale dependence: general format at 6
  // significant digits, trailing zeros trimmed by to_chars.
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace hbn
