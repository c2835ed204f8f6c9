#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "wft/errors.hpp"
#include "wft/multiscale.hpp"
#include "wft/refine.hpp"

using namespace wft;

namespace {

constexpr BasisKind S = BasisKind::scaling;
constexpr BasisKind Wv = BasisKind::wavelet;

std::vector<double> random_signal(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

double energy(std::span<const double> v) {
  return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("pyramid: constants, impulses, energy, round trip") {
  for (int K = 1; K <= 3; ++K)
    for (std::size_t N : {16u, 64u, 256u})
      for (int L = 1; L <= 3; ++L) {
        CAPTURE(K);
        CAPTURE(N);
        CAPTURE(L);
        const auto fb = FilterBank::daubechies(K);

        const std::vector<double> ones(N, 1.0);
        const auto pc = dwt_analyze(ones, fb, L);
        CHECK(pc.levels() == L);
        CHECK(pc.approx.size() == N >> L);
        double dmax = 0;
        for (const auto& d : pc.details) dmax = std::max(dmax, *std::max_element(d.begin(), d.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }));
        CHECK(std::abs(dmax) < 1e-12);
        for (double a : pc.approx) CHECK(std::abs(a - std::pow(2.0, L / 2.0)) < 1e-12);

        std::vector<double> imp(N, 0.0);
        imp[N / 3] = 1.0;
        const auto pi = dwt_analyze(imp, fb, L);
        double e = energy(pi.approx);
        for (const auto& d : pi.details) e += energy(d);
        CHECK(std::abs(e - 1) < 1e-12);

        const auto x = random_signal(N, unsigned(N + 7 * K + L));
        const auto p = dwt_analyze(x, fb, L);
        double ep = energy(p.approx);
        for (const auto& d : p.details) ep += energy(d);
        CHECK(std::abs(ep - energy(x)) < 1e-12 * energy(x));
        CHECK(p.size() == N);
        CHECK(max_abs_diff(dwt_synthesize(p, fb), x) < 1e-12);
      }
}

TEST_CASE("pyramid with no levels is the identity") {
  const auto x = random_signal(10, 3);
  const auto fb = FilterBank::daubechies(2);
  const auto p = dwt_analyze(x, fb, 0);
  CHECK(p.approx == x);
  CHECK(p.details.empty());
  CHECK(dwt_synthesize(p, fb) == x);
}

TEST_CASE("pyramid errors") {
  const auto fb = FilterBank::daubechies(3);
  const auto x = random_signal(24, 1);
  CHECK_THROWS_AS(dwt_analyze(x, fb, 4), InvalidArgument);
  CHECK_THROWS_AS(dwt_analyze(x, fb, -1), InvalidArgument);
  CHECK_THROWS_AS(dwt_analyze(std::vector<double>{}, fb, 1), InvalidArgument);
  try {
    dwt_analyze(x, fb, 4);
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("24") != std::string::npos);
  }
  auto p = dwt_analyze(x, fb, 2);
  CHECK_THROWS_AS(dwt_synthesize(p, FilterBank::daubechies(2)), InvalidArgument);
  p.details[1].pop_back();
  CHECK_THROWS_AS(dwt_synthesize(p, fb), InvalidArgument);
}

TEST_CASE("pyramid JSON round trip") {
  const auto fb = FilterBank::daubechies(3);
  const auto x = random_signal(32, 5);
  const auto p = dwt_analyze(x, fb, 3);
  const auto text = p.to_json();
  CHECK(text.find("\"approx\":{\"-3\":") != std::string::npos);
  CHECK(text.find("\"-1\":") != std::string::npos);
  const auto q = Pyramid::from_json(text);
  CHECK(q.K == 3);
  CHECK(q.approx == p.approx);
  CHECK(q.details == p.details);
  CHECK(max_abs_diff(dwt_synthesize(q, fb), x) < 1e-12);
  CHECK_THROWS_AS(Pyramid::from_json("{\"K\":3"), InvalidArgument);
  CHECK_THROWS_AS(Pyramid::from_json("{\"K\":3,\"levels\":1,\"approx\":{}}"), InvalidArgument);
}

TEST_CASE("scale identities") {
  const auto fb = FilterBank::daubechies(3);
  for (int k : {0, 2}) {
    const auto r = scale_identity_check(fb, k);
    CHECK(r.orthonormality_residual < 1e-12);
    REQUIRE(r.derivative_residual.has_value());
    CHECK(*r.derivative_residual < 1e-10);
  }
  const auto r2 = scale_identity_check(FilterBank::daubechies(2), 0);
  CHECK(r2.orthonormality_residual < 1e-12);
  CHECK_FALSE(r2.derivative_residual.has_value());

  // a pair table from the wrong filter breaks the identity
  auto h = std::vector<double>(fb.lowpass().begin(), fb.lowpass().end());
  h[1] += 1e-2;
  h[4] -= 1e-2;
  const auto bent = FilterBank::unchecked(h);
  ConnectionEngine e(fb);
  const auto& D = e.table(shapes::pair_derivative());
  const auto rb = scale_identity_check(bent, 0, &D);
  CHECK(rb.orthonormality_residual > 1e-3);
  CHECK(*rb.derivative_residual > 1e-3);
}

TEST_CASE("tensor products and generalized wavelet labels") {
  CHECK(tensor3(2, 3, 4) == 24);
  const auto& t = generalized_wavelet_types();
  int wavelet_axes = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(t[i].label == int(i) + 1);
    for (auto k : t[i].axes) wavelet_axes += k == Wv;
    CHECK(std::count(t[i].axes.begin(), t[i].axes.end(), Wv) >= 1);
  }
  CHECK(wavelet_axes == 12);
  CHECK(t[0].axes == std::array<BasisKind, 3>{S, S, Wv});
  CHECK(t[6].axes == std::array<BasisKind, 3>{Wv, Wv, Wv});
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j) CHECK(t[i].axes != t[j].axes);
}

TEST_CASE("3D overlaps are orthonormal") {
  ConnectionEngine e(FilterBank::daubechies(3));
  std::vector<Basis3> basis;
  for (const auto& t : generalized_wavelet_types())
    for (long n : {0L, 1L}) basis.push_back({{{{t.axes[0], 0, n, 0}, {t.axes[1], 0, 0, 0}, {t.axes[2], 0, -n, 0}}}});
  basis.push_back({{{{S, 0, 0, 0}, {S, 0, 0, 0}, {S, 0, 0, 0}}}});
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < basis.size(); ++j)
      CHECK(std::abs(overlap3(e, basis[i], basis[j]) - (i == j ? 1.0 : 0.0)) < 1e-12);
}

TEST_CASE("3D Laplacian matrix elements") {
  const auto fb = FilterBank::daubechies(3);
  ConnectionEngine e(fb);
  const std::vector<std::pair<Basis3, Basis3>> pairs = {
      {{{{{S, 0, 0, 0}, {S, 0, 0, 0}, {S, 0, 0, 0}}}}, {{{{S, 0, 0, 0}, {S, 0, 0, 0}, {S, 0, 0, 0}}}}},
      {{{{{S, 0, 0, 0}, {S, 0, 1, 0}, {Wv, 0, 0, 0}}}}, {{{{S, 0, 1, 0}, {S, 0, 1, 0}, {Wv, 0, 0, 0}}}}},
      {{{{{Wv, 0, 0, 0}, {Wv, 0, 0, 0}, {S, 0, 0, 0}}}}, {{{{Wv, 0, 0, 0}, {Wv, 0, 0, 0}, {S, 0, 0, 0}}}}},
      {{{{{S, 0, 0, 0}, {Wv, 0, 0, 0}, {S, 0, 2, 0}}}}, {{{{S, 0, -1, 0}, {Wv, 0, 0, 0}, {S, 0, 2, 0}}}}},
  };

  // Exact values against 1D Riemann sums fine enough to resolve s'.
  Oracle fine(fb, 18);
  auto riemann = [&](Factor a, Factor b, int d) {
    return fine.integrate({{a.kind, 0, a.translation, d, 0}, {b.kind, 0, b.translation, d, 0}});
  };
  for (const auto& [f, g] : pairs) {
    const double exact = laplacian3(e, f, g);
    std::array<double, 3> ov{}, dd{};
    for (int a = 0; a < 3; ++a) {
      ov[a] = riemann(f.axes[a], g.axes[a], 0);
      dd[a] = riemann(f.axes[a], g.axes[a], 1);
    }
    const double approx = tensor3(dd[0], ov[1], ov[2]) + tensor3(ov[0], dd[1], ov[2]) +
                          tensor3(ov[0], ov[1], dd[2]);
    CAPTURE(exact);
    CAPTURE(approx);
    CHECK(std::abs(exact - approx) <= std::max(1e-3, 1e-3 * std::abs(exact)));
  }

  // Direct 3D point sum on a coarse grid equals the tensor assembly of the
  // same 1D sums, so the factorization is exact at the discrete level too.
  const int J = 5;
  const long unit = 1L << J;
  auto samples = [&](BasisKind kind, int d) {
    auto s = refine_to_level(fb, d, J);
    return kind == S ? s : wavelet_samples(fb, s);
  };
  const DyadicSamples tab[2][2] = {{samples(S, 0), samples(S, 1)}, {samples(Wv, 0), samples(Wv, 1)}};
  auto val = [&](const Factor& f, int d, long i) {
    return tab[f.kind == Wv][d].at(i - f.translation * unit);
  };
  const double h = 1.0 / unit;
  for (const auto& [f, g] : pairs) {
    std::array<double, 3> ov{}, dd{};
    for (int a = 0; a < 3; ++a)
      for (long i = -4 * unit; i <= 8 * unit; ++i) {
        ov[a] += val(f.axes[a], 0, i) * val(g.axes[a], 0, i) * h;
        dd[a] += val(f.axes[a], 1, i) * val(g.axes[a], 1, i) * h;
      }
    const double assembled = tensor3(dd[0], ov[1], ov[2]) + tensor3(ov[0], dd[1], ov[2]) +
                             tensor3(ov[0], ov[1], dd[2]);
    double brute = 0;
    const long lo = -2 * unit, hi = 8 * unit;
    for (long x = lo; x <= hi; ++x) {
      const double fx0 = val(f.axes[0], 0, x), gx0 = val(g.axes[0], 0, x);
      const double fx1 = val(f.axes[0], 1, x), gx1 = val(g.axes[0], 1, x);
      if (fx0 == 0 && fx1 == 0) continue;
      for (long y = lo; y <= hi; ++y) {
        const double fy0 = val(f.axes[1], 0, y), gy0 = val(g.axes[1], 0, y);
        const double fy1 = val(f.axes[1], 1, y), gy1 = val(g.axes[1], 1, y);
        if (fy0 == 0 && fy1 == 0) continue;
        for (long z = lo; z <= hi; ++z) {
          const double fz0 = val(f.axes[2], 0, z), gz0 = val(g.axes[2], 0, z);
          const double fz1 = val(f.axes[2], 1, z), gz1 = val(g.axes[2], 1, z);
          brute += (fx1 * fy0 * fz0) * (gx1 * gy0 * gz0) + (fx0 * fy1 * fz0) * (gx0 * gy1 * gz0) +
                   (fx0 * fy0 * fz1) * (gx0 * gy0 * gz1);
        }
      }
    }
    brute *= h * h * h;
    CHECK(std::abs(brute - assembled) < 1e-11 * std::max(1.0, std::abs(assembled)));
  }
}

TEST_CASE("3D Laplacian symmetry and the constant mode") {
  ConnectionEngine e(FilterBank::daubechies(3));
  const Basis3 a{{{{S, 0, 0, 0}, {Wv, 0, 1, 0}, {S, 0, 2, 0}}}};
  const Basis3 b{{{{S, 0, 1, 0}, {Wv, 0, 0, 0}, {S, 0, 2, 0}}}};
  CHECK(std::abs(laplacian3(e, a, b) - laplacian3(e, b, a)) < 1e-12);
  CHECK(laplacian3(e, a, a) > 0);
  // sum over translations along every axis of sss annihilates the gradient
  double acc = 0;
  const Basis3 c{{{{S, 0, 0, 0}, {S, 0, 0, 0}, {S, 0, 0, 0}}}};
  for (long i = -4; i <= 4; ++i)
    for (long j = -4; j <= 4; ++j)
      for (long k = -4; k <= 4; ++k) acc += laplacian3(e, c, {{{{S, 0, i, 0}, {S, 0, j, 0}, {S, 0, k, 0}}}});
  CHECK(std::abs(acc) < 1e-11);
}
