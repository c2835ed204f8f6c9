#include "wft/filters.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wft/errors.hpp"
#include "wft/format.hpp"

namespace wft {

namespace {

std::vector<double> closed_form(int K) {
  switch (K) {
    case 1: {
      const double a = 1.0 / std::sqrt(2.0);
      return {a, a};
    }
    case 2: {
      const double r3 = std::sqrt(3.0);
      const double d = 4.0 * std::sqrt(2.0);
      return {(1 + r3) / d, (3 + r3) / d, (3 - r3) / d, (1 - r3) / d};
    }
    case 3: {
      const double r10 = std::sqrt(10.0);
      const double q = std::sqrt(5.0 + 2.0 * r10);
      const double d = 16.0 * std::sqrt(2.0);
      return {(1 + r10 + q) / d,          (5 + r10 + 3 * q) / d,
              (10 - 2 * r10 + 2 * q) / d, (10 - 2 * r10 - 2 * q) / d,
              (5 + r10 - 3 * q) / d,      (1 + r10 - q) / d};
    }
    default:
      throw UnsupportedOrder(K);
  }
}

}  // namespace

FilterBank::FilterBank(std::vector<double> h, bool reversed)
    : h_(std::move(h)), g_(mirror_filter(h_)), reversed_(reversed) {}

FilterBank FilterBank::daubechies(int K, bool reverse) {
  auto h = closed_form(K);
  if (reverse) std::reverse(h.begin(), h.end());
  return FilterBank(std::move(h), reverse);
}

FilterBank FilterBank::from_lowpass(std::vector<double> h) {
  if (h.empty() || h.size() % 2 != 0)
    throw InvalidArgument("low-pass filter must have a positive even number of taps");
  FilterBank fb(std::move(h));
  const auto r = filter_residuals(fb);
  if (r.sum_rule > 1e-12 || r.orthonormality > 1e-12 || r.vanishing_moments > 1e-10)
    throw InvalidArgument("filter violates the Daubechies identities (sum " +
                          format_number(r.sum_rule) + ", orthonormality " +
                          format_number(r.orthonormality) + ", moments " +
                          format_number(r.vanishing_moments) + ")");
  return fb;
}

FilterBank FilterBank::unchecked(std::vector<double> h) {
  if (h.empty() || h.size() % 2 != 0)
    throw InvalidArgument("low-pass filter must have a positive even number of taps");
  return FilterBank(std::move(h));
}

std::string FilterBank::to_json() const {
  std::ostringstream os;
  os << "{\"K\":" << order() << ",\"h\":" << format_array(h_)
     << ",\"g\":" << format_array(g_) << "}";
  return os.str();
}

std::string FilterBank::to_csv() const {
  std::string out = "h";
  for (double v : h_) out += "," + format_number(v);
  out += "\ng";
  for (double v : g_) out += "," + format_number(v);
  out += "\n";
  return out;
}

std::vector<double> mirror_filter(std::span<const double> h) {
  if (h.size() % 2 != 0) throw InvalidArgument("mirror filter needs an even number of taps");
  const std::size_t L = h.size();
  std::vector<double> g(L);
  for (std::size_t n = 0; n < L; ++n) g[n] = (n % 2 == 0 ? 1.0 : -1.0) * h[L - 1 - n];
  return g;
}

FilterResiduals filter_residuals(const FilterBank& fb) {
  FilterResiduals r;
  const int L = fb.taps();
  const int K = fb.order();
  double sum = 0;
  for (int n = 0; n < L; ++n) sum += fb.h(n);
  r.sum_rule = std::abs(sum - std::sqrt(2.0));
  for (int m = -(K - 1); m <= K - 1; ++m) {
    double acc = 0;
    for (int n = 0; n < L; ++n) acc += fb.h(n) * fb.h(n - 2 * m);
    r.orthonormality = std::max(r.orthonormality, std::abs(acc - (m == 0 ? 1.0 : 0.0)));
  }
  for (int m = 0; m < K; ++m) {
    double acc = 0;
    for (int n = 0; n < L; ++n) acc += std::pow(static_cast<double>(n), m) * fb.g(n);
    r.vanishing_moments = std::max(r.vanishing_moments, std::abs(acc));
  }
  for (int n = 0; n < L; ++n) {
    const double expect = (n % 2 == 0 ? 1.0 : -1.0) * fb.h(L - 1 - n);
    r.mirror = std::max(r.mirror, std::abs(fb.g(n) - expect));
  }
  return r;
}

BandedOperator::BandedOperator(BandKind kind, const FilterBank& fb) : kind_(kind) {
  const auto src = (kind == BandKind::H || kind == BandKind::Ht) ? fb.lowpass() : fb.highpass();
  taps_.assign(src.begin(), src.end());
}

double BandedOperator::entry(long row, long col) const noexcept {
  const long L = static_cast<long>(taps_.size());
  const long i = (kind_ == BandKind::H || kind_ == BandKind::G) ? col - 2 * row : row - 2 * col;
  return (i >= 0 && i < L) ? taps_[static_cast<std::size_t>(i)] : 0.0;
}

IndexedSequence BandedOperator::apply(const IndexedSequence& x, Boundary boundary) const {
  const long L = static_cast<long>(taps_.size());
  const long n_in = static_cast<long>(x.values.size());
  const bool down = kind_ == BandKind::H || kind_ == BandKind::G;
  IndexedSequence y;

  if (boundary == Boundary::periodic) {
    // the long side of the operator is the periodic window
    const long N = down ? n_in : 2 * n_in;
    if (N < L)
      throw InvalidArgument("periodic window of length " + std::to_string(N) +
                            " is shorter than the filter (" + std::to_string(L) + " taps)");
    if (down && n_in % 2 != 0)
      throw InvalidArgument("periodic downsampling needs an even window length");
    y.first = down ? x.first / 2 : 2 * x.first;
    const auto wrap = [N](long i) { return ((i % N) + N) % N; };
    if (down) {
      y.values.assign(static_cast<std::size_t>(N / 2), 0.0);
      for (long n = 0; n < N / 2; ++n) {
        double acc = 0;
        for (long t = 0; t < L; ++t) acc += taps_[t] * x.values[wrap(2 * n + t)];
        y.values[n] = acc;
      }
    } else {
      y.values.assign(static_cast<std::size_t>(N), 0.0);
      for (long n = 0; n < n_in; ++n)
        for (long t = 0; t < L; ++t) y.values[wrap(2 * n + t)] += taps_[t] * x.values[n];
    }
    return y;
  }

  if (n_in == 0) return y;
  if (down) {
    // rows n with some 0 <= m - 2n < L, m in [first, last)
    const long lo = static_cast<long>(std::floor((x.first - (L - 1)) / 2.0));
    const long hi = static_cast<long>(std::floor((x.last() - 1) / 2.0));
    y.first = lo;
    y.values.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
    for (long n = lo; n <= hi; ++n) {
      double acc = 0;
      for (long t = 0; t < L; ++t) acc += taps_[t] * x.at(2 * n + t);
      y.values[n - lo] = acc;
    }
  } else {
    y.first = 2 * x.first;
    y.values.assign(static_cast<std::size_t>(2 * (n_in - 1) + L), 0.0);
    for (long n = 0; n < n_in; ++n)
      for (long t = 0; t < L; ++t) y.values[2 * n + t] += taps_[t] * x.values[n];
  }
  return y;
}

}  // namespace wft
