#include "wft/refine.hpp"

#include <cmath>

#include "wft/errors.hpp"
#include "wft/format.hpp"

namespace wft {

std::string to_string(BasisKind kind) {
  return kind == BasisKind::scaling ? "scaling" : "wavelet";
}

BasisKind parse_basis_kind(const std::string& name) {
  if (name == "scaling" || name == "s") return BasisKind::scaling;
  if (name == "wavelet" || name == "w") return BasisKind::wavelet;
  throw InvalidArgument("unknown basis kind '" + name + "' (expected scaling or wavelet)");
}

std::string DyadicSamples::to_csv() const {
  std::string out = "x,value\n";
  out.reserve(values.size() * 44);
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += format_number(x(i));
    out += ',';
    out += format_number(values[i]);
    out += '\n';
  }
  return out;
}

Eigen::MatrixXd refinement_matrix(const FilterBank& fb) {
  const int L = fb.taps();
  Eigen::MatrixXd M(L, L);
  for (int n = 0; n < L; ++n)
    for (int m = 0; m < L; ++m) M(n, m) = std::sqrt(2.0) * fb.h(2 * n - m);
  return M;
}

int max_derivative(int K) noexcept { return K >= 3 ? 1 : 0; }

std::vector<double> integer_values(const FilterBank& fb, int deriv) {
  const int K = fb.order();
  const int L = fb.taps();
  if (deriv < 0) throw InvalidArgument("derivative order must be non-negative");
  if (deriv > max_derivative(K)) throw RegularityError(K, deriv);

  if (K == 1) return {1.0, 0.0};  // Haar: indicator of [0,1)

  const double lambda = std::ldexp(1.0, -deriv);
  const Eigen::MatrixXd A =
      refinement_matrix(fb) - lambda * Eigen::MatrixXd::Identity(L, L);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = 1e-10 * std::max(1.0, sv(0));
  int nullity = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) < tol) ++nullity;
  if (nullity != 1) throw RegularityError(K, deriv);

  Eigen::VectorXd v = svd.matrixV().col(L - 1);
  double norm = 0;
  for (int n = 0; n < L; ++n) norm += deriv == 0 ? v(n) : -n * v(n);
  if (std::abs(norm) < 1e-12) throw RegularityError(K, deriv);
  v /= norm;
  std::vector<double> out(v.data(), v.data() + L);
  if (deriv == 0) out.front() = out.back() = 0.0;  // continuity at the support ends
  return out;
}

DyadicSamples refine_to_level(const FilterBank& fb, int deriv, int level) {
  if (level < 0) throw InvalidArgument("refinement level must be non-negative");
  if (level > 24) throw InvalidArgument("refinement level above 24 is not supported");
  const int L = fb.taps();
  DyadicSamples out;
  out.K = fb.order();
  out.deriv = deriv;
  out.level = 0;
  out.values = integer_values(fb, deriv);
  const double fac = std::sqrt(2.0) * std::ldexp(1.0, deriv);

  std::vector<double> next;
  for (int j = 1; j <= level; ++j) {
    const long n = static_cast<long>(L - 1) * (1L << j) + 1;
    const long half = 1L << (j - 1);
    const auto& cur = out.values;
    const long nc = static_cast<long>(cur.size());
    next.assign(static_cast<std::size_t>(n), 0.0);
    for (long m = 0; m < n; m += 2) next[m] = cur[m / 2];
    for (long m = 1; m < n; m += 2) {
      double acc = 0;
      for (int l = 0; l < L; ++l) {
        const long idx = m - l * half;
        if (idx >= 0 && idx < nc) acc += fb.h(l) * cur[idx];
      }
      next[m] = fac * acc;
    }
    out.values.swap(next);
    out.level = j;
  }
  return out;
}

DyadicSamples wavelet_samples(const FilterBank& fb, const DyadicSamples& scaling) {
  if (scaling.kind != BasisKind::scaling)
    throw InvalidArgument("wavelet samples need scaling-function samples as input");
  if (scaling.K != fb.order())
    throw InvalidArgument("sample order does not match the filter bank");
  DyadicSamples out = scaling;
  out.kind = BasisKind::wavelet;
  const long unit = scaling.points_per_unit();
  const double fac = std::sqrt(2.0) * std::ldexp(1.0, scaling.deriv);
  for (std::size_t m = 0; m < out.values.size(); ++m) {
    double acc = 0;
    for (int l = 0; l < fb.taps(); ++l) acc += fb.g(l) * scaling.at(2 * static_cast<long>(m) - l * unit);
    out.values[m] = fac * acc;
  }
  return out;
}

}  // namespace wft
