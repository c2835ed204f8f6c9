#pragma once

#include <array>
#include <compare>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "wft/filters.hpp"
#include "wft/refine.hpp"

namespace wft {

/// Moments <x^m>_s = int x^m s(x) dx and <x^m>_w for m = 0..m_max.
struct Moments {
  std::vector<double> scaling;
  std::vector<double> wavelet;
};

Moments moments(const FilterBank& fb, int m_max);

/// Coefficient b_n of x = sum_n b_n s(x-n); b_n = n + <x>_s.
double translated_first_moment(const FilterBank& fb, long n);

/// Integrand pattern of a base table: derivative order of each scale-0
/// scaling-function factor (ascending) and the power of x.
///
/// A table with derivative orders (d_1,...,d_n) and power q stores
///   T(t_2,...,t_n) = int s^(d_1)(x) s^(d_2)(x-t_2) ... s^(d_n)(x-t_n) x^q dx
/// for every translation tuple whose supports overlap.
struct TableShape {
  std::vector<int> derivs;
  int power = 0;

  TableShape() = default;
  TableShape(std::vector<int> d, int q);

  std::size_t arity() const noexcept { return derivs.size(); }
  int total_derivative() const noexcept;
  std::string name() const;
  auto operator<=>(const TableShape&) const = default;
};

/// Named tables used throughout the Hamiltonian assembly.
namespace shapes {
inline TableShape overlap() { return {{0, 0}, 0}; }          // delta_0m
inline TableShape gamma_pair() { return {{0, 1}, 0}; }       // Gamma_0n
inline TableShape pair_derivative() { return {{1, 1}, 0}; }  // D_0m
inline TableShape triple_derivative() { return {{0, 1, 1}, 0}; }  // D_0lm
inline TableShape triple_gradient() { return {{0, 0, 1}, 0}; }    // I_0mn
inline TableShape triple_overlap() { return {{0, 0, 0}, 0}; }
inline TableShape weighted_overlap() { return {{0, 0}, 1}; }     // F_0m
inline TableShape weighted_gradient() { return {{0, 1}, 1}; }    // int s x s'(x-m)
inline TableShape weighted_derivative() { return {{1, 1}, 1}; }  // G_0m
}  // namespace shapes

/// Finite table of connection coefficients with the leftmost factor pinned
/// at translation 0.
///
/// Indices range over the closed window |t_i| <= 2K-2 with |t_i - t_j| <=
/// 2K-2. Entries in the window are stored explicitly (zeros included);
/// lookups outside return 0.
class BaseTable {
 public:
  BaseTable(int K, TableShape shape);

  int order() const noexcept { return K_; }
  const TableShape& shape() const noexcept { return shape_; }
  int window() const noexcept { return window_; }
  /// Number of translation indices (arity - 1).
  int rank() const noexcept { return static_cast<int>(shape_.arity()) - 1; }

  double at(std::span<const long> t) const noexcept;
  double at(long t) const noexcept;
  double at(long l, long m) const noexcept;
  double& ref(std::span<const long> t);

  /// All in-window index tuples in lexicographic order.
  const std::vector<std::array<long, 2>>& indices() const noexcept { return indices_; }
  bool in_window(std::span<const long> t) const noexcept;

  std::string to_csv() const;
  std::string to_json() const;

 private:
  std::size_t offset(std::span<const long> t) const noexcept;

  int K_;
  TableShape shape_;
  int window_;
  std::vector<double> values_;
  std::vector<std::array<long, 2>> indices_;
};

/// One factor of a connection integral: d-th derivative of the basis function
/// 2^{k/2} f(2^k x - n) with f the scaling function or mother wavelet.
struct Factor {
  BasisKind kind = BasisKind::scaling;
  int scale = 0;
  long translation = 0;
  int deriv = 0;
  auto operator<=>(const Factor&) const = default;
};

/// int prod_i f_i(x) x^power dx.
struct ConnQuery {
  std::vector<Factor> factors;
  int power = 0;
  auto operator<=>(const ConnQuery&) const = default;
};

/// Owns a filter bank, the base tables derived from it, and a memo of
/// evaluated queries.
///
/// Tables are built on first use. Lookups take a shared lock; insertion takes
/// the exclusive lock, so concurrent evaluate() calls are safe.
class ConnectionEngine {
 public:
  explicit ConnectionEngine(FilterBank fb);

  const FilterBank& filters() const noexcept { return fb_; }
  int order() const noexcept { return fb_.order(); }

  const BaseTable& table(const TableShape& shape);
  const Moments& moment_table();

  /// Exact value of the connection integral described by `q`.
  ///
  /// Supports up to three factors, derivative order <= 1 per factor, total
  /// derivative order <= 2 and power <= 1 at arbitrary scales. Throws
  /// UnsupportedConfiguration otherwise.
  double evaluate(const ConnQuery& q);

  std::size_t memo_size() const;

 private:
  std::unique_ptr<BaseTable> build(const TableShape& shape);
  double compute(const ConnQuery& q);

  FilterBank fb_;
  mutable std::shared_mutex mutex_;       // memo_
  mutable std::recursive_mutex build_mutex_;  // tables_, held while a table pulls its sub-tables
  std::map<TableShape, std::unique_ptr<BaseTable>> tables_;
  std::map<ConnQuery, double> memo_;
  std::once_flag moments_once_;
  Moments moments_;
};

double general_connection(ConnectionEngine& engine, const ConnQuery& q);

/// Support check: true when the common support of all factors has zero
/// measure, in which case the integral vanishes identically.
bool disjoint_supports(int K, std::span<const Factor> factors);

/// Solve the refinement system for one table shape. Sub-tables (one factor
/// fewer, or one power lower) are taken from `deps`. Throws DegenerateSystem
/// if the stacked equations do not pin down every unknown or are
/// inconsistent.
BaseTable solve_base_table(const FilterBank& fb, const TableShape& shape,
                           ConnectionEngine& deps);

/// Gamma_0n = int s(x) s'(x-n) dx.
BaseTable gamma_pair_table(const FilterBank& fb);
/// D_0lm = int s(x) s'(x-l) s'(x-m) dx.
BaseTable triple_table(const FilterBank& fb);
/// D_0m = int s'(x) s'(x-m) dx, from the partition-of-unity contraction
/// D_0,m-l = sum_n D_0,l-n,m-n.
BaseTable pair_derivative_table(const BaseTable& triple);
/// int s^(d1)(x) x^q s^(d2)(x-m) dx for q in {0,1}.
BaseTable weighted_pair_table(const FilterBank& fb, int d1, int d2, int q);

}  // namespace wft
