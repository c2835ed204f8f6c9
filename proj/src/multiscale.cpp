#include "wft/multiscale.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "wft/errors.hpp"
#include "wft/format.hpp"

namespace wft {

namespace {

// y_n = sum_m f_{m-2n} x_m with m taken mod N. Works for any even N,
// including windows shorter than the filter (the taps then fold over).
std::vector<double> periodic_down(std::span<const double> x, std::span<const double> f) {
  const long N = static_cast<long>(x.size());
  std::vector<double> y(static_cast<std::size_t>(N / 2), 0.0);
  for (long n = 0; n < N / 2; ++n) {
    double acc = 0;
    for (std::size_t t = 0; t < f.size(); ++t) acc += f[t] * x[(2 * n + long(t)) % N];
    y[n] = acc;
  }
  return y;
}

void periodic_up(std::span<const double> c, std::span<const double> f, std::vector<double>& out) {
  const long N = static_cast<long>(out.size());
  for (std::size_t n = 0; n < c.size(); ++n)
    for (std::size_t t = 0; t < f.size(); ++t) out[(2 * long(n) + long(t)) % N] += f[t] * c[n];
}

}  // namespace

std::size_t Pyramid::size() const noexcept {
  std::size_t n = approx.size();
  for (const auto& d : details) n += d.size();
  return n;
}

std::string Pyramid::to_json() const {
  std::ostringstream os;
  os << "{\"K\":" << K << ",\"levels\":" << levels() << ",\"approx\":{\"" << -levels()
     << "\":" << format_array(approx) << "},\"details\":{";
  for (int i = 0; i < levels(); ++i)
    os << (i ? "," : "") << "\"" << -(i + 1) << "\":" << format_array(details[i]);
  os << "}}";
  return os.str();
}

Pyramid Pyramid::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("pyramid JSON: ") + e.what());
  }
  try {
    Pyramid p;
    p.K = j.at("K").get<int>();
    const int L = j.at("levels").get<int>();
    if (L < 0) throw InvalidArgument("pyramid JSON: negative level count");
    p.approx = j.at("approx").at(std::to_string(-L)).get<std::vector<double>>();
    for (int i = 1; i <= L; ++i)
      p.details.push_back(j.at("details").at(std::to_string(-i)).get<std::vector<double>>());
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("pyramid JSON: ") + e.what());
  }
}

Pyramid dwt_analyze(std::span<const double> signal, const FilterBank& fb, int levels) {
  if (levels < 0) throw InvalidArgument("level count must be non-negative");
  const std::size_t N = signal.size();
  if (N == 0) throw InvalidArgument("empty signal");
  if (levels > 30 || N % (std::size_t{1} << levels) != 0)
    throw InvalidArgument("signal length " + std::to_string(N) + " is not divisible by 2^" +
                          std::to_string(levels));
  Pyramid p;
  p.K = fb.order();
  p.approx.assign(signal.begin(), signal.end());
  for (int l = 0; l < levels; ++l) {
    auto d = periodic_down(p.approx, fb.highpass());
    p.approx = periodic_down(p.approx, fb.lowpass());
    p.details.push_back(std::move(d));
  }
  return p;
}

std::vector<double> dwt_synthesize(const Pyramid& pyramid, const FilterBank& fb) {
  if (pyramid.K != fb.order())
    throw InvalidArgument("pyramid was built with K=" + std::to_string(pyramid.K) +
                          ", filter bank has K=" + std::to_string(fb.order()));
  std::vector<double> a = pyramid.approx;
  for (int l = pyramid.levels() - 1; l >= 0; --l) {
    const auto& d = pyramid.details[l];
    if (d.size() != a.size())
      throw InvalidArgument("pyramid shape mismatch at level " + std::to_string(-(l + 1)) +
                            ": " + std::to_string(d.size()) + " details vs " +
                            std::to_string(a.size()) + " approximation coefficients");
    std::vector<double> out(2 * a.size(), 0.0);
    periodic_up(a, fb.lowpass(), out);
    periodic_up(d, fb.highpass(), out);
    a = std::move(out);
  }
  return a;
}

ScaleIdentityReport scale_identity_check(const FilterBank& fb, int k, const BaseTable* pair) {
  ScaleIdentityReport r;
  const long W = 2L * fb.order() - 2;
  for (long m = -W; m <= W; ++m)
    for (long n = -W; n <= W; ++n) {
      double acc = 0;
      for (long j = 2 * std::min(m, n); j < 2 * std::max(m, n) + fb.taps(); ++j)
        acc += fb.h(j - 2 * m) * fb.h(j - 2 * n);
      r.orthonormality_residual =
          std::max(r.orthonormality_residual, std::abs(acc - (m == n ? 1.0 : 0.0)));
    }

  std::optional<BaseTable> own;
  if (!pair) {
    if (max_derivative(fb.order()) < 1) return r;
    ConnectionEngine e(fb);
    own.emplace(e.table(shapes::pair_derivative()));
    pair = &*own;
  }
  const double sk = std::ldexp(1.0, 2 * k), sk1 = std::ldexp(1.0, 2 * (k + 1));
  double worst = 0;
  for (long m = -W; m <= W; ++m)
    for (long n = -W; n <= W; ++n) {
      double acc = 0;
      for (long l = 2 * m; l < 2 * m + fb.taps(); ++l)
        for (long j = 2 * n; j < 2 * n + fb.taps(); ++j)
          acc += fb.h(l - 2 * m) * fb.h(j - 2 * n) * sk1 * pair->at(j - l);
      worst = std::max(worst, std::abs(acc - sk * pair->at(n - m)) / sk);
    }
  r.derivative_residual = worst;
  return r;
}

const std::array<GeneralizedWaveletType, 7>& generalized_wavelet_types() {
  using B = BasisKind;
  static const std::array<GeneralizedWaveletType, 7> types{{
      {1, {B::scaling, B::scaling, B::wavelet}},
      {2, {B::scaling, B::wavelet, B::scaling}},
      {3, {B::wavelet, B::scaling, B::scaling}},
      {4, {B::scaling, B::wavelet, B::wavelet}},
      {5, {B::wavelet, B::wavelet, B::scaling}},
      {6, {B::wavelet, B::scaling, B::wavelet}},
      {7, {B::wavelet, B::wavelet, B::wavelet}},
  }};
  return types;
}

namespace {

double axis_integral(ConnectionEngine& e, Factor a, Factor b, int deriv) {
  a.deriv = deriv;
  b.deriv = deriv;
  return e.evaluate({{a, b}, 0});
}

}  // namespace

double laplacian3(ConnectionEngine& engine, const Basis3& f, const Basis3& g) {
  std::array<double, 3> ov{}, dd{};
  for (int a = 0; a < 3; ++a) {
    ov[a] = axis_integral(engine, f.axes[a], g.axes[a], 0);
    dd[a] = axis_integral(engine, f.axes[a], g.axes[a], 1);
  }
  return tensor3(dd[0], ov[1], ov[2]) + tensor3(ov[0], dd[1], ov[2]) +
         tensor3(ov[0], ov[1], dd[2]);
}

double overlap3(ConnectionEngine& engine, const Basis3& f, const Basis3& g) {
  return tensor3(axis_integral(engine, f.axes[0], g.axes[0], 0),
                 axis_integral(engine, f.axes[1], g.axes[1], 0),
                 axis_integral(engine, f.axes[2], g.axes[2], 0));
}

}  // namespace wft
