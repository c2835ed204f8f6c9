#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "wft/conncoef.hpp"

namespace wft {

/// Published reference value of a K=3 base-table entry.
struct GoldenEntry {
  std::array<long, 2> index;  // second slot unused for pair tables
  double value;
};

enum class GoldenTable { pair_derivative, gamma_pair, triple };

std::vector<GoldenEntry> golden_entries(GoldenTable table);
/// Same CSV layout as the embedded copies: '#' comments, one header row.
std::vector<GoldenEntry> parse_golden(GoldenTable table, std::string_view text);
std::string_view golden_source(GoldenTable table);

struct VerifyReport {
  std::size_t checked = 0;
  std::size_t passed = 0;
  double max_abs = 0;
  double max_rel = 0;
  bool relative = false;  // tolerance is relative (pair) or absolute
  double tolerance = 0;
  std::string summary() const;
  bool ok() const noexcept { return checked > 0 && checked == passed; }
};

/// pair: 5e-4 relative; gamma: 1e-6 absolute (printed Gamma_00 compared
/// against 0); triple: 1e-5 absolute.
VerifyReport verify_table(GoldenTable which, const BaseTable& computed);
VerifyReport verify_table(GoldenTable which, const BaseTable& computed,
                          const std::vector<GoldenEntry>& reference);

}  // namespace wft
