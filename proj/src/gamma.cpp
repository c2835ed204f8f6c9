#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "wft/errors.hpp"
#include "wft/format.hpp"
#include "wft/hamiltonian.hpp"

namespace wft {

namespace {

// |sum_n f_n e^{-i n xi}|^2 / 2 as a cosine series of the autocorrelation
struct PowerSeries {
  std::vector<double> a;  // a[k] = sum_n f_n f_{n+k}

  explicit PowerSeries(std::span<const double> f) : a(f.size(), 0.0) {
    for (std::size_t k = 0; k < f.size(); ++k)
      for (std::size_t n = 0; n + k < f.size(); ++n) a[k] += f[n] * f[n + k];
  }
  double operator()(double xi) const {
    // cos(k xi) by the Chebyshev recurrence, one cosine per call
    const double c = std::cos(xi);
    double prev = 1.0, cur = c, v = 0.5 * a[0];
    for (std::size_t k = 1; k < a.size(); ++k) {
      v += a[k] * cur;
      const double next = 2 * c * cur - prev;
      prev = cur;
      cur = next;
    }
    return v;
  }
};

double product_spectrum(const PowerSeries& m0, double p, int depth) {
  double v = 1.0;
  for (int j = 1; j <= depth; ++j) {
    const double xi = std::ldexp(p, -j);
    if (std::abs(xi) < 1e-7) break;  // |m0|^2 = 1 - O(xi^2K) from here on
    v *= m0(xi);
  }
  return v;
}

}  // namespace

double lowpass_power(const FilterBank& fb, double xi) { return PowerSeries(fb.lowpass())(xi); }

double scaling_spectrum(const FilterBank& fb, double p, int depth) {
  return product_spectrum(PowerSeries(fb.lowpass()), p, depth);
}

double wavelet_spectrum(const FilterBank& fb, double p, int depth) {
  return PowerSeries(fb.highpass())(0.5 * p) * scaling_spectrum(fb, 0.5 * p, depth);
}

GammaResult gamma_coefficients(const FilterBank& fb, double mu, BasisKind kind, int scale,
                               const GammaConfig& cfg) {
  if (!(mu > 0) || !std::isfinite(mu))
    throw DomainError("mass must be positive and finite, got " + format_number(mu) +
                      " (the field variance diverges at zero mass)");
  if (cfg.product_depth < 1 || !(cfg.p_max > 0) || !(cfg.panel_width > 0))
    throw InvalidArgument("gamma quadrature settings must be positive");
  const PowerSeries m0(fb.lowpass()), m1(fb.highpass());
  const int depth = cfg.product_depth;
  const auto spectrum = [&](double u) {
    return kind == BasisKind::scaling ? product_spectrum(m0, u, depth)
                                      : m1(0.5 * u) * product_spectrum(m0, 0.5 * u, depth);
  };

  // p = 2^k u turns the scale-k integrals into scale-0 ones with mass mu / 2^k
  const double nu = std::ldexp(mu, -scale);
  using GL = boost::math::quadrature::gauss<double, 10>;
  const long panels = std::max(1L, static_cast<long>(std::ceil(cfg.p_max / cfg.panel_width)));
  const long quarter = std::max(1L, panels / 4);
  double a = 0, b = 0, a_q = 0, b_q = 0;
  const auto& xs = GL::abscissa();
  const auto& ws = GL::weights();
  // both integrands share the spectrum, so one pass over the nodes
  auto node = [&](double u, double w) {
    const double sp = spectrum(u), om = std::hypot(nu, u);
    a += w * sp / (2 * om);
    b += w * sp * om / 2;
  };
  auto panel = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const double w = ws[j] * h;
      if (xs[j] == 0) {
        node(mid, w);
      } else {
        node(mid - h * xs[j], w);
        node(mid + h * xs[j], w);
      }
    }
  };
  for (long i = 0; i < panels; ++i) {
    const double lo = i * cfg.panel_width, hi = lo + cfg.panel_width;
    if (i == 0 && nu < hi) {
      // 1/omega varies on the scale nu near u = 0: grade the first panel
      double edge = nu;
      panel(0, edge);
      for (; 2 * edge < hi; edge *= 2) panel(edge, 2 * edge);
      panel(edge, hi);
    } else {
      panel(lo, hi);
    }
    if (i + 1 == quarter) {
      a_q = a;
      b_q = b;
    }
  }
  // even integrands: full line = 2 x half line, then 1/(2 pi)
  const double pi = std::acos(-1.0);
  GammaResult r;
  r.mu = mu;
  r.kind = kind;
  r.scale = scale;
  r.field_variance = std::ldexp(a / pi, -scale);
  r.momentum_variance = std::ldexp(b / pi, scale);
  r.tail_change = std::max(std::abs(a - a_q) / a, std::abs(b - b_q) / b);
  if (!(r.tail_change < cfg.tolerance) || !std::isfinite(a) || !std::isfinite(b))
    throw ConvergenceError("gamma quadrature did not converge: relative change " +
                               format_number(r.tail_change) + " between cutoffs " +
                               format_number(quarter * cfg.panel_width) + " and " +
                               format_number(panels * cfg.panel_width),
                           {a_q, a, b_q, b});
  r.gamma_star = std::sqrt(r.momentum_variance / r.field_variance);
  r.discriminant = 1 - 4 * r.field_variance * r.momentum_variance;
  r.residual_density =
      0.5 * (r.gamma_star * r.field_variance + r.momentum_variance / r.gamma_star - 1);
  return r;
}

}  // namespace wft
