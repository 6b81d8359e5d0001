#pragma once

#include <string>

namespace hbn {

/// Locale-independent shortest-faithful formatting at 6 significant digits
/// (printf %.6g semantics, via std::to_chars).
std::string format_number(double v);

/// Quotes a CSV field when it contains a comma, quote, or newline.
std::string csv_field(const std::string& s);

}  // namespace hbn
