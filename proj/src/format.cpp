#include "wft/format.hpp"

#include <charconv>
#include <cmath>

#include "wft/errors.hpp"

namespace wft {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0) v = 0;  // drop the sign of -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_array(std::span<const double> values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_number(values[i]);
  }
  out += ']';
  return out;
}

std::vector<double> parse_numbers(std::string_view text) {
  std::vector<double> out;
  std::size_t i = 0;
  const auto sep = [](char c) {
    return c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ';';
  };
  while (i < text.size()) {
    while (i < text.size() && sep(text[i])) ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && !sep(text[j])) ++j;
    const char* first = text.data() + i;
    if (*first == '+') ++first;
    double v = 0;
    auto res = std::from_chars(first, text.data() + j, v);
    if (res.ec != std::errc() || res.ptr != text.data() + j)
      throw InvalidArgument("not a number: '" + std::string(text.substr(i, j - i)) + "'");
    out.push_back(v);
    i = j;
  }
  return out;
}

}  // namespace wft
