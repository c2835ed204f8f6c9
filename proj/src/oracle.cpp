#include <cmath>
#include <limits>

#include "wft/errors.hpp"
#include "wft/refine.hpp"

namespace wft {

Oracle::Oracle(FilterBank fb, int level) : fb_(std::move(fb)), level_(level) {
  if (level < 0) throw InvalidArgument("oracle level must be non-negative");
}

const DyadicSamples& Oracle::samples(BasisKind kind, int deriv, int level) {
  for (const auto& s : cache_)
    if (s.kind == kind && s.deriv == deriv && s.level == level) return s;
  DyadicSamples s = refine_to_level(fb_, deriv, level);
  if (kind == BasisKind::wavelet) s = wavelet_samples(fb_, s);
  cache_.push_back(std::move(s));
  return cache_.back();
}

double Oracle::integrate(const std::vector<OracleFactor>& factors) {
  if (factors.empty()) throw InvalidArgument("oracle integrand needs at least one factor");
  const long span = fb_.support_length();
  // integer grid x = i / 2^J; factor support [n 2^{J-k}, (n+span) 2^{J-k}]
  long lo = std::numeric_limits<long>::min();
  long hi = std::numeric_limits<long>::max();
  for (const auto& f : factors) {
    if (f.scale > level_)
      throw InvalidArgument("oracle level " + std::to_string(level_) +
                            " cannot resolve scale " + std::to_string(f.scale));
    const long unit = 1L << (level_ - f.scale);
    lo = std::max(lo, f.translation * unit);
    hi = std::min(hi, (f.translation + span) * unit);
  }
  if (lo >= hi) return 0.0;

  struct Prepared {
    const DyadicSamples* s;
    long unit;
    long offset;
    double amp;
    int power;
  };
  std::vector<Prepared> prep;
  prep.reserve(factors.size());
  for (const auto& f : factors) {
    // 2^k x - n at x = i/2^J is grid index i - n 2^{J-k} at level J-k
    const int lev = level_ - f.scale;
    const auto& s = samples(f.kind, f.deriv, lev);
    const long unit = 1L << lev;
    const double amp = std::pow(2.0, 0.5 * f.scale + f.scale * f.deriv);
    prep.push_back({&s, unit, f.translation * unit, amp, f.power});
  }
  const double dx = std::ldexp(1.0, -level_);
  double sum = 0;
  for (long i = lo; i < hi; ++i) {
    double v = 1.0;
    const double x = static_cast<double>(i) * dx;
    for (const auto& p : prep) {
      v *= p.amp * p.s->at(i - p.offset);
      for (int q = 0; q < p.power; ++q) v *= x;
    }
    sum += v;
  }
  return sum * dx;
}

double oracle_integral(const FilterBank& fb, const std::vector<OracleFactor>& factors,
                       int level) {
  Oracle o(fb, level);
  return o.integrate(factors);
}

}  // namespace wft
