#include "wft/golden.hpp"

#include <cmath>
#include <sstream>

#include "wft/errors.hpp"
#include "wft/format.hpp"

namespace wft {

namespace golden_data {
extern const std::string_view pair_derivative;
extern const std::string_view gamma_pair;
extern const std::string_view triple;
}  // namespace golden_data

std::string_view golden_source(GoldenTable table) {
  switch (table) {
    case GoldenTable::pair_derivative: return golden_data::pair_derivative;
    case GoldenTable::gamma_pair: return golden_data::gamma_pair;
    case GoldenTable::triple: return golden_data::triple;
  }
  return {};
}

std::vector<GoldenEntry> golden_entries(GoldenTable table) {
  return parse_golden(table, golden_source(table));
}

std::vector<GoldenEntry> parse_golden(GoldenTable table, std::string_view text) {
  const std::size_t cols = table == GoldenTable::triple ? 3 : 2;
  std::vector<GoldenEntry> out;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {  // column names
      header = false;
      continue;
    }
    const auto v = parse_numbers(line);
    if (v.size() != cols) throw Error("malformed reference row: " + line);
    GoldenEntry e{};
    e.index[0] = std::lround(v[0]);
    e.index[1] = cols == 3 ? std::lround(v[1]) : 0;
    e.value = v.back();
    out.push_back(e);
  }
  return out;
}

namespace {

// 1e-05 -> "1e-5"; anything that is not a power of ten falls back to 17 digits
std::string tolerance_text(double t) {
  const double e = std::round(std::log10(t));
  if (std::abs(t - std::pow(10.0, e)) <= 1e-15 * t) return "1e" + std::to_string(long(e));
  return format_number(t);
}

}  // namespace

std::string VerifyReport::summary() const {
  std::ostringstream os;
  if (relative)
    os << passed << "/" << checked << " entries within tolerance";
  else
    os << passed << "/" << checked << " within " << tolerance_text(tolerance);
  os << " (max abs deviation " << format_number(max_abs) << ", max rel deviation "
     << format_number(max_rel) << ")";
  return os.str();
}

VerifyReport verify_table(GoldenTable which, const BaseTable& computed) {
  return verify_table(which, computed, golden_entries(which));
}

VerifyReport verify_table(GoldenTable which, const BaseTable& computed,
                          const std::vector<GoldenEntry>& reference) {
  VerifyReport r;
  const bool triple = which == GoldenTable::triple;
  if (computed.rank() != (triple ? 2 : 1))
    throw InvalidArgument("table rank does not match the reference table");
  r.relative = which == GoldenTable::pair_derivative;
  r.tolerance = r.relative ? 5e-4 : (triple ? 1e-5 : 1e-6);
  for (const auto& e : reference) {
    const double c = triple ? computed.at(e.index[0], e.index[1]) : computed.at(e.index[0]);
    const double err = std::abs(c - e.value);
    const double rel = e.value != 0 ? err / std::abs(e.value) : 0.0;
    r.max_abs = std::max(r.max_abs, err);
    // the printed Gamma_00 is rounding noise; its size is far below the tolerance
    if (std::abs(e.value) > 1e-12) r.max_rel = std::max(r.max_rel, rel);
    ++r.checked;
    if (r.relative ? err <= r.tolerance * std::abs(e.value) : err <= r.tolerance) ++r.passed;
  }
  return r;
}

}  // namespace wft
