#pragma once

#include <string>
#include <string_view>

namespace fbgain {

/// Shortest general-format text with at most `precision` significant digits
/// (1..17). Locale independent; "inf"/"-inf"/"nan" for non-finite values.
std::string format_number(double value, int precision);

/// Parses text produced by format_number. Throws std::invalid_argument.
double parse_number(std::string_view text);

}  // namespace fbgain
