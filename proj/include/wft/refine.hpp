#pragma once

#include <string>
#include <deque>
#include <vector>

#include <Eigen/Dense>

#include "wft/filters.hpp"

namespace wft {

enum class BasisKind { scaling, wavelet };

std::string to_string(BasisKind kind);
BasisKind parse_basis_kind(const std::string& name);

/// Values of s, w or a first derivative at the points m / 2^level,
/// m = 0 .. (2K-1) 2^level, covering the whole support.
struct DyadicSamples {
  int K = 0;
  int deriv = 0;
  int level = 0;
  BasisKind kind = BasisKind::scaling;
  std::vector<double> values;

  double step() const noexcept { return 1.0 / static_cast<double>(1L << level); }
  long points_per_unit() const noexcept { return 1L << level; }
  double x(std::size_t i) const noexcept { return static_cast<double>(i) * step(); }
  /// Value at grid index m (x = m / 2^level); zero outside the support.
  double at(long m) const noexcept {
    return (m >= 0 && m < static_cast<long>(values.size()))
               ? values[static_cast<std::size_t>(m)]
               : 0.0;
  }
  /// Columns x,value at 17 significant digits.
  std::string to_csv() const;
};

/// M_{nm} = sqrt(2) h_{2n-m}, n,m = 0..2K-1. Its eigenvectors with
/// eigenvalue 2^{-d} carry the integer samples of the d-th derivative.
Eigen::MatrixXd refinement_matrix(const FilterBank& fb);

/// Highest derivative order with a continuous representative.
int max_derivative(int K) noexcept;

/// d-th derivative of s at x = 0..2K-1.
///
/// d = 0 is normalized by sum_n s(n) = 1, d = 1 by sum_n n s'(x-n) = 1,
/// i.e. sum_j j s'(j) = -1. Throws RegularityError if the derivative does
/// not exist or the eigenspace is not one-dimensional.
std::vector<double> integer_values(const FilterBank& fb, int deriv);

/// Refine integer values level by level with s(x) = sqrt2 sum h_l s(2x-l)
/// (an extra factor 2 per derivative). Coarse values are copied, never
/// recomputed.
DyadicSamples refine_to_level(const FilterBank& fb, int deriv, int level);

/// w^(d)(x) = sqrt2 2^d sum g_n s^(d)(2x-n) on the same grid as the input.
DyadicSamples wavelet_samples(const FilterBank& fb, const DyadicSamples& scaling);

/// One factor of an oracle integrand: d-th derivative of
/// 2^{k/2} f(2^k x - n), multiplied by x^power.
struct OracleFactor {
  BasisKind kind = BasisKind::scaling;
  int scale = 0;
  long translation = 0;
  int deriv = 0;
  int power = 0;
};

/// Brute-force Riemann sum of a product of basis functions on the dyadic grid
/// of spacing 2^{-level}. First-order accurate; independent of the
/// connection-coefficient linear systems. Sample tables are cached per
/// (kind, deriv, level), so one instance can evaluate many integrals.
class Oracle {
 public:
  Oracle(FilterBank fb, int level);

  int level() const noexcept { return level_; }
  double integrate(const std::vector<OracleFactor>& factors);

 private:
  const DyadicSamples& samples(BasisKind kind, int deriv, int level);

  FilterBank fb_;
  int level_;
  std::deque<DyadicSamples> cache_;
};

double oracle_integral(const FilterBank& fb, const std::vector<OracleFactor>& factors,
                       int level);

}  // namespace wft
