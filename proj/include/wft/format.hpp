#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wft {

/// Shortest round-trip-safe rendering at 17 significant digits, independent
/// of the process locale.
std::string format_number(double v);

std::string format_array(std::span<const double> values);

/// Split a comma/whitespace separated line of decimals. Uses from_chars, so
/// parsing is locale independent too.
std::vector<double> parse_numbers(std::string_view text);

}  // namespace wft
