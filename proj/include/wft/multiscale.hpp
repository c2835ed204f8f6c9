#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wft/conncoef.hpp"
#include "wft/filters.hpp"

namespace wft {

/// Periodic multilevel decomposition. details[i] is the detail band at level
/// -(i+1); approx is the coarse band at level -levels. Detail coefficients
/// keep the translation index they have at analysis time.
struct Pyramid {
  int K = 0;
  std::vector<double> approx;
  std::vector<std::vector<double>> details;

  int levels() const noexcept { return static_cast<int>(details.size()); }
  std::size_t size() const noexcept;
  /// {"K":..,"levels":L,"approx":{"-L":[...]},"details":{"-1":[...],...}}
  std::string to_json() const;
  static Pyramid from_json(const std::string& text);
};

Pyramid dwt_analyze(std::span<const double> signal, const FilterBank& fb, int levels);
std::vector<double> dwt_synthesize(const Pyramid& pyramid, const FilterBank& fb);

struct ScaleIdentityReport {
  double orthonormality_residual = 0;
  /// Empty when the filter has no derivative (K < 3).
  std::optional<double> derivative_residual;
};

/// Checks delta_mn = sum_j h_{j-2m} h_{j-2n} and
/// D^k_mn = sum_{l,j} h_{l-2m} h_{j-2n} D^{k+1}_lj over the support window.
/// `pair` supplies D_0m; it may come from a different filter bank, which is
/// how a perturbed filter is detected.
ScaleIdentityReport scale_identity_check(const FilterBank& fb, int k,
                                         const BaseTable* pair = nullptr);

/// Product of three one-dimensional coefficients.
constexpr double tensor3(double cx, double cy, double cz) noexcept { return cx * cy * cz; }

/// The seven products of scaling functions and wavelets spanning the detail
/// complement of the scale-2^-k tensor basis. Labels follow the usual
/// ordering: 1 = (s,s,w), 2 = (s,w,s), 3 = (w,s,s), 4 = (s,w,w),
/// 5 = (w,w,s), 6 = (w,s,w), 7 = (w,w,w).
struct GeneralizedWaveletType {
  int label;
  std::array<BasisKind, 3> axes;
};

const std::array<GeneralizedWaveletType, 7>& generalized_wavelet_types();

/// 3D basis element: one 1D factor per axis.
struct Basis3 {
  std::array<Factor, 3> axes;
};

/// int grad f . grad g d^3x, assembled axis by axis with tensor3.
double laplacian3(ConnectionEngine& engine, const Basis3& f, const Basis3& g);
/// int f g d^3x.
double overlap3(ConnectionEngine& engine, const Basis3& f, const Basis3& g);

}  // namespace wft
