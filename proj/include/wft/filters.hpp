#pragma once

#include <span>
#include <string>
#include <vector>

namespace wft {

/// Low-pass / high-pass coefficient pair of a Daubechies-K wavelet.
///
/// h has 2K taps indexed 0..2K-1 and g_n = (-1)^n h_{2K-1-n}. Accessors with
/// an integer tap index return 0 outside the support, so callers can write
/// banded sums without bounds checks.
class FilterBank {
 public:
  /// Closed-form coefficients for K in {1,2,3}. `reverse` selects the
  /// order-reversed solution h_n -> h_{2K-1-n}.
  static FilterBank daubechies(int K, bool reverse = false);

  /// Validates the filter identities and throws InvalidArgument on failure.
  static FilterBank from_lowpass(std::vector<double> h);

  /// No validation; used to build perturbed filters for negative controls.
  static FilterBank unchecked(std::vector<double> h);

  int order() const noexcept { return static_cast<int>(h_.size() / 2); }
  int taps() const noexcept { return static_cast<int>(h_.size()); }
  /// Support of the scaling function and wavelet is [0, support_length()].
  int support_length() const noexcept { return taps() - 1; }

  std::span<const double> lowpass() const noexcept { return h_; }
  std::span<const double> highpass() const noexcept { return g_; }
  double h(long n) const noexcept {
    return (n >= 0 && n < taps()) ? h_[static_cast<std::size_t>(n)] : 0.0;
  }
  double g(long n) const noexcept {
    return (n >= 0 && n < taps()) ? g_[static_cast<std::size_t>(n)] : 0.0;
  }

  bool reversed() const noexcept { return reversed_; }

  /// {"K":3,"h":[...],"g":[...]} with 17 significant digits.
  std::string to_json() const;
  /// Two rows "h,..." and "g,...".
  std::string to_csv() const;

 private:
  explicit FilterBank(std::vector<double> h, bool reversed = false);

  std::vector<double> h_;
  std::vector<double> g_;
  bool reversed_ = false;
};

/// g_n = (-1)^n h_{L-1-n}. Throws InvalidArgument for odd length.
std::vector<double> mirror_filter(std::span<const double> h);

/// Worst-case violation of each defining identity.
struct FilterResiduals {
  double sum_rule = 0;          // |sum h - sqrt 2|
  double orthonormality = 0;    // max_m |sum_n h_n h_{n-2m} - delta_m0|
  double vanishing_moments = 0; // max_{m<K} |sum_n n^m g_n|
  double mirror = 0;            // max_n |g_n - (-1)^n h_{2K-1-n}|
};

FilterResiduals filter_residuals(const FilterBank& fb);

enum class BandKind { H, G, Ht, Gt };
enum class Boundary { periodic, zero };

/// Coefficient sequence living on the integer window [first, first+size).
struct IndexedSequence {
  long first = 0;
  std::vector<double> values;

  double at(long n) const noexcept {
    const long i = n - first;
    return (i >= 0 && i < static_cast<long>(values.size()))
               ? values[static_cast<std::size_t>(i)]
               : 0.0;
  }
  long last() const noexcept { return first + static_cast<long>(values.size()); }
};

/// Infinite banded matrices H_{nm} = h_{m-2n}, G_{nm} = g_{m-2n} and their
/// transposes.
class BandedOperator {
 public:
  BandedOperator(BandKind kind, const FilterBank& fb);

  BandKind kind() const noexcept { return kind_; }
  double entry(long row, long col) const noexcept;

  /// Periodic mode: indices wrap modulo the input length (H/G halve the
  /// length, Ht/Gt double it). Zero mode: input is zero outside its window
  /// and every output index touched by the band is returned.
  IndexedSequence apply(const IndexedSequence& x, Boundary boundary) const;

 private:
  BandKind kind_;
  std::vector<double> taps_;
};

}  // namespace wft
