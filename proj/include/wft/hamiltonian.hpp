#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wft/conncoef.hpp"
#include "wft/filters.hpp"
#include "wft/refine.hpp"

namespace wft {

enum class BlockKind { ss, sw, ww };
std::string to_string(BlockKind kind);

/// Derivative-overlap matrix between two families of basis functions on a
/// periodic volume of N scale-2^-k cells.
///
/// ss: rows/cols are scale-k scaling functions. sw: rows scale-k scaling
/// functions, cols scale-l wavelets. ww: rows scale-j wavelets, cols
/// scale-l wavelets with j <= l. A family at scale l has N 2^{l-k} members.
struct CouplingBlock {
  BlockKind kind = BlockKind::ss;
  int row_scale = 0;
  int col_scale = 0;
  int volume = 0;
  Eigen::MatrixXd matrix;
};

/// Periodic translation count of a family: N 2^{scale-k}.
long family_size(long N, int coarse_scale, int scale);

/// Every ss, sw and ww block for scaling functions at scale k and wavelets at
/// scales k..l_max (l_max < k means coarse only). Requires K = 3 and
/// N >= 2(2K-1).
std::vector<CouplingBlock> coupling_blocks(ConnectionEngine& engine, int k, int l_max,
                                           long N);

/// Segment of the combined coarse+fine index set.
struct IndexSegment {
  BasisKind kind;
  int scale;
  long offset;
  long size;
};

/// Single-particle matrix D + mu^2 I over scaling functions at scale k
/// followed by wavelets at scales k..l_max.
struct QuadraticForm {
  double mu = 0;
  int coarse_scale = 0;
  long volume = 0;
  std::vector<IndexSegment> segments;
  Eigen::MatrixXd matrix;

  long coarse_size() const noexcept { return segments.empty() ? 0 : segments.front().size; }
  /// aa, ab, bb blocks, split after the coarse segment.
  Eigen::MatrixXd block_aa() const;
  Eigen::MatrixXd block_ab() const;
  Eigen::MatrixXd block_bb() const;
};

QuadraticForm quadratic_form(double mu, const std::vector<CouplingBlock>& blocks);

/// mu^2 + 2^{2k} sum_m D_0m cos(p m), p = 2 pi r / N, r = 0..N-1.
std::vector<double> circulant_spectrum(const BaseTable& pair, double mu, int k, long N);

/// Dense symmetric eigenvalues, ascending.
std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& m);

/// One-dimensional coefficient matrices of the Poincare generators at scale k.
///
/// translation: B_mn = int s^k_m (s^k_n)' (periodic, circulant).
/// boost_overlap: F_nm = int s^k_n x s^k_m, boost_gradient: G_nm = int
/// (s^k_n)' x (s^k_m)' and rotation: X_nm = int s^k_n x (s^k_m)' are
/// x-weighted and therefore built on the open window n,m = 0..N-1.
struct GeneratorCoefficients {
  int scale = 0;
  long volume = 0;
  Eigen::MatrixXd translation;
  Eigen::MatrixXd boost_overlap;
  Eigen::MatrixXd boost_gradient;
  Eigen::MatrixXd rotation;
};

GeneratorCoefficients generator_matrices(ConnectionEngine& engine, int k, long N);

/// Sparse entry of P^{kkk}_{mnj}.
struct MomentumEntry {
  long m, n, j;
  double value;
};

/// P^{kkk}_{mnj} = -2^{-k/2} int s^k_m s^k_n (s^k_j)' on a periodic volume of
/// N cells; only nonzero entries are returned, sorted by (m, n, j).
std::vector<MomentumEntry> partition_momentum_coefficients(ConnectionEngine& engine, int k,
                                                           long N);

struct GammaConfig {
  int product_depth = 30;     ///< factors in the truncated infinite product
  double p_max = 65536.0;     ///< momentum cutoff in units of 2^scale
  double panel_width = 6.283185307179586;  ///< Gauss-Legendre panel, same units
  double tolerance = 1e-6;    ///< relative change allowed between p_max/4 and p_max
};

struct GammaResult {
  double mu = 0;
  BasisKind kind = BasisKind::scaling;
  int scale = 0;
  double field_variance = 0;     ///< A = <0|Phi^2|0>
  double momentum_variance = 0;  ///< B = <0|Pi^2|0>
  double gamma_star = 0;         ///< sqrt(B/A)
  double discriminant = 0;       ///< 1 - 4AB
  double residual_density = 0;   ///< (gamma A + B/gamma - 1)/2 at gamma_star
  double tail_change = 0;        ///< quadrature convergence diagnostic
};

/// |m0(xi)|^2 with m0(xi) = 2^{-1/2} sum_n h_n e^{-i n xi}.
double lowpass_power(const FilterBank& fb, double xi);
/// |s^(p)|^2 by the truncated product of |m0(p/2^j)|^2.
double scaling_spectrum(const FilterBank& fb, double p, int depth = 30);
/// |w^(p)|^2 = |m1(p/2)|^2 |s^(p/2)|^2.
double wavelet_spectrum(const FilterBank& fb, double p, int depth = 30);

/// Vacuum variances of the field smeared with one basis function of the
/// given kind and scale, and the resulting mode normalization.
GammaResult gamma_coefficients(const FilterBank& fb, double mu, BasisKind kind, int scale,
                               const GammaConfig& config = {});

enum class FlowVariant { fixed_generator, wegner };
std::string to_string(FlowVariant v);
FlowVariant parse_flow_variant(const std::string& name);

struct FlowOptions {
  FlowVariant variant = FlowVariant::wegner;
  double lambda_max = 1.0;
  double rtol = 1e-9;
  double atol = 1e-12;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  /// Stop once the off-block norm falls below target_ratio times its initial
  /// value (0 disables).
  double target_ratio = 0.0;
  long max_steps = 2'000'000;
};

struct FlowSample {
  double lambda;
  double off_block_norm;
  double min_eigen_drift;
  double max_eigen_drift;
};

/// Symmetric matrix split as coarse (first `split` indices) + fine.
struct FlowState {
  Eigen::MatrixXd matrix;
  long split = 0;
  double lambda = 0;
  std::vector<FlowSample> history;

  double off_block_norm() const;
  double asymmetry() const;
  /// `lambda,off_block_norm,min_eig_drift,max_eig_drift` rows.
  std::string history_csv() const;
};

/// Integrates dH/dlambda = [H,[H,G]] with an adaptive Dormand-Prince 5(4)
/// stepper. G is the block-diagonal part of H(0) (fixed_generator) or of the
/// current H (wegner). In the Wegner variant a step that increases the
/// off-block norm is rejected and retried with a smaller step.
FlowState wegner_flow(const Eigen::MatrixXd& initial, long split, const FlowOptions& opt);

struct OkuboOptions {
  int max_iterations = 500;
  double tolerance = 1e-13;
  double gap_tolerance = 1e-10;
};

struct OkuboResult {
  Eigen::MatrixXd A;        ///< maps the coarse block into the fine block
  Eigen::MatrixXd U;        ///< orthogonal block diagonalizer
  Eigen::MatrixXd H_block;  ///< U H U^T
  int iterations = 0;
  std::vector<double> residual_history;
  double off_block_norm = 0;
};

/// Solves A H_a - H_c A + H_I^T - A H_I A = 0 by freezing the quadratic term
/// and solving a Sylvester equation per iteration, then forms the unitary
///   U = [[(I+A^T A)^{-1/2}, -A^T (I+A A^T)^{-1/2}],
///        [A (I+A^T A)^{-1/2},    (I+A A^T)^{-1/2}]].
/// H_I is the coarse-to-fine coupling block (n_a x n_c).
OkuboResult okubo_block(const Eigen::MatrixXd& H_a, const Eigen::MatrixXd& H_c,
                        const Eigen::MatrixXd& H_I, const OkuboOptions& opt = {});

/// Dense CSV and coordinate-format exports.
std::string matrix_csv(const Eigen::MatrixXd& m);
std::string matrix_coo(const Eigen::MatrixXd& m, double drop = 0.0);

}  // namespace wft
