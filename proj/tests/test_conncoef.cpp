#include <doctest.h>

#include <cmath>
#include <future>
#include <random>

#include <json.hpp>

#include "wft/conncoef.hpp"
#include "wft/errors.hpp"
#include "wft/golden.hpp"

using namespace wft;

namespace {

constexpr BasisKind S = BasisKind::scaling;
constexpr BasisKind Wv = BasisKind::wavelet;

const FilterBank& k3() {
  static const FilterBank fb = FilterBank::daubechies(3);
  return fb;
}

ConnectionEngine& engine() {
  static ConnectionEngine e(k3());
  return e;
}

Oracle& oracle14() {
  static Oracle o(k3(), 14);
  return o;
}

double oracle_of(const ConnQuery& q) {
  std::vector<OracleFactor> f;
  for (std::size_t i = 0; i < q.factors.size(); ++i) {
    const auto& a = q.factors[i];
    f.push_back({a.kind, a.scale, a.translation, a.deriv, i == 0 ? q.power : 0});
  }
  return oracle14().integrate(f);
}

bool oracle_close(double exact, double approx) {
  return std::abs(exact - approx) <= std::max(1e-3, 1e-3 * std::abs(exact));
}

// base-table entry as a scale-0 query
ConnQuery table_query(const BaseTable& t, const std::array<long, 2>& ix) {
  ConnQuery q;
  q.power = t.shape().power;
  const auto& d = t.shape().derivs;
  q.factors.push_back({S, 0, 0, d[0]});
  for (int i = 1; i < int(d.size()); ++i) q.factors.push_back({S, 0, ix[i - 1], d[i]});
  return q;
}

}  // namespace

TEST_CASE("moments") {
  const auto m = moments(k3(), 4);
  CHECK(m.scaling[0] == 1.0);
  double lh = 0;
  for (int l = 0; l < 6; ++l) lh += l * k3().h(l);
  CHECK(std::abs(m.scaling[1] - lh / std::sqrt(2.0)) < 1e-15);
  for (int p = 0; p < 3; ++p) CHECK(std::abs(m.wavelet[p]) < 1e-12);
  CHECK(std::abs(m.wavelet[3]) > 1e-3);
  for (int p = 1; p <= 3; ++p) {
    CAPTURE(p);
    CHECK(oracle_close(m.scaling[p], oracle14().integrate({{S, 0, 0, 0, p}})));
    CHECK(oracle_close(m.wavelet[p], oracle14().integrate({{Wv, 0, 0, 0, p}})));
  }
  // K=2 has two vanishing wavelet moments
  const auto m2 = moments(FilterBank::daubechies(2), 2);
  CHECK(std::abs(m2.wavelet[1]) < 1e-12);
  CHECK(std::abs(m2.wavelet[2]) > 1e-3);
}

TEST_CASE("translated first moment reproduces x") {
  const double b0 = translated_first_moment(k3(), 0);
  CHECK(std::abs(b0 - moments(k3(), 1).scaling[1]) < 1e-15);
  CHECK(translated_first_moment(k3(), 4) - translated_first_moment(k3(), 3) == doctest::Approx(1.0).epsilon(1e-15));
  const int J = 10;
  const long unit = 1L << J;
  const auto s = refine_to_level(k3(), 0, J);
  double err = 0;
  for (long i = 0; i < 2 * unit; ++i) {
    double acc = 0;
    for (long n = -6; n <= 3; ++n) acc += translated_first_moment(k3(), n) * s.at(i - n * unit);
    err = std::max(err, std::abs(acc - double(i) / unit));
  }
  CHECK(err < 1e-9);
}

TEST_CASE("gamma pair table") {
  const auto g = gamma_pair_table(k3());
  CHECK(std::abs(g.at(1) - 0.7452055) < 1e-6);
  CHECK(std::abs(g.at(-4) + 3.424658e-4) < 1e-9);
  CHECK(std::abs(g.at(0)) < 1e-12);
  double mom = 0;
  for (long n = -4; n <= 4; ++n) {
    CHECK(std::abs(g.at(-n) + g.at(n)) < 1e-12);
    mom += n * g.at(n);
  }
  CHECK(std::abs(mom - 1) < 1e-12);
  CHECK(g.at(5) == 0.0);
  CHECK(g.at(-7) == 0.0);
  CHECK(g.indices().size() == 9);
}

TEST_CASE("triple table") {
  const auto t = triple_table(k3());
  const auto g = gamma_pair_table(k3());
  CHECK(t.indices().size() == 61);
  CHECK(std::abs(t.at(0, 0) - 2.364229) < 1e-5);
  CHECK(std::abs(t.at(-4, -4) - 4.056756e-5) < 1e-10);
  CHECK(std::abs(t.at(1, 2) - 1.758631e-1) < 1e-6);
  CHECK(std::abs(t.at(2, 1) - 1.758631e-1) < 1e-6);
  for (long l = -4; l <= 4; ++l) {
    double row = 0, moment = 0;
    for (long m = -4; m <= 4; ++m) {
      CHECK(std::abs(t.at(l, m) - t.at(m, l)) < 1e-12);
      row += t.at(l, m);
      moment += m * t.at(m, l);
    }
    CHECK(std::abs(row) < 1e-12);
    CHECK(std::abs(moment - g.at(l)) < 1e-12);
  }
  CHECK(t.at(4, -1) == 0.0);  // |l - m| > 4
  CHECK(t.at(5, 5) == 0.0);
}

TEST_CASE("pair derivative table") {
  const auto D = pair_derivative_table(triple_table(k3()));
  CHECK(std::abs(D.at(0) - 5.268) <= 5e-4 * 5.268);
  double sum = 0, m1 = 0, m2 = 0;
  for (long m = -4; m <= 4; ++m) {
    CHECK(std::abs(D.at(m) - D.at(-m)) < 1e-12);
    sum += D.at(m);
    m1 += m * D.at(m);
    m2 += m * m * D.at(m);
  }
  CHECK(std::abs(sum) < 1e-12);
  CHECK(std::abs(m1) < 1e-12);
  CHECK(std::abs(m2 + 2) < 1e-6);
  CHECK_THROWS_AS(pair_derivative_table(gamma_pair_table(k3())), InvalidArgument);
}

TEST_CASE("reference tables") {
  const auto t = triple_table(k3());
  const auto rp = verify_table(GoldenTable::pair_derivative, pair_derivative_table(t));
  const auto rg = verify_table(GoldenTable::gamma_pair, gamma_pair_table(k3()));
  const auto rt = verify_table(GoldenTable::triple, t);
  CHECK(rp.checked == 9);
  CHECK(rg.checked == 9);
  CHECK(rt.checked == 61);
  CHECK(rp.ok());
  CHECK(rg.ok());
  CHECK(rt.ok());
  CHECK(rp.summary().rfind("9/9 entries within tolerance", 0) == 0);
  CHECK(rg.summary().rfind("9/9 within 1e-6", 0) == 0);
  CHECK(rt.summary().rfind("61/61 within 1e-5", 0) == 0);

  auto bad = golden_entries(GoldenTable::gamma_pair);
  bad[2].value += 1e-4;
  const auto rb = verify_table(GoldenTable::gamma_pair, gamma_pair_table(k3()), bad);
  CHECK_FALSE(rb.ok());
  CHECK(rb.passed == 8);
}

TEST_CASE("weighted pair tables") {
  const auto F = weighted_pair_table(k3(), 0, 0, 1);
  const auto G = weighted_pair_table(k3(), 1, 1, 1);
  const auto m = moments(k3(), 1);
  double fsum = 0;
  for (long n = -4; n <= 4; ++n) {
    CHECK(std::abs(F.at(n) - F.at(-n)) < 1e-12);
    fsum += F.at(n);
  }
  CHECK(std::abs(fsum - m.scaling[1]) < 1e-12);
  // int s x s is not the first moment: the weight sees s twice
  CHECK(std::abs(F.at(0) - m.scaling[1]) > 0.1);
  for (long n = -4; n <= 4; ++n) {
    CAPTURE(n);
    CHECK(oracle_close(F.at(n), oracle14().integrate({{S, 0, 0, 0, 1}, {S, 0, n, 0, 0}})));
    CHECK(oracle_close(G.at(n), oracle14().integrate({{S, 0, 0, 1, 1}, {S, 0, n, 1, 0}})));
  }
  CHECK_THROWS_AS(weighted_pair_table(k3(), 1, 0, 1), InvalidArgument);
  CHECK_THROWS_AS(weighted_pair_table(k3(), 0, 0, 2), UnsupportedConfiguration);
  CHECK_THROWS_AS(weighted_pair_table(FilterBank::daubechies(2), 1, 1, 1), RegularityError);

  // translation identities
  auto& e = engine();
  const double s5xs5 = e.evaluate({{{S, 0, 5, 0}, {S, 0, 5, 0}}, 1});
  CHECK(std::abs(s5xs5 - (F.at(0) + 5)) < 1e-12);
  const auto D = e.table(shapes::pair_derivative());
  for (long n : {-3L, 0L, 7L})
    for (long t = -4; t <= 4; ++t) {
      const double v = e.evaluate({{{S, 0, n, 1}, {S, 0, n + t, 1}}, 1});
      CHECK(std::abs(v - (G.at(t) + n * D.at(t))) < 1e-11);
    }
}

TEST_CASE("oracle agreement for every base-table entry") {
  auto& e = engine();
  for (const auto& shape :
       {shapes::gamma_pair(), shapes::pair_derivative(), shapes::triple_derivative(),
        shapes::triple_gradient(), shapes::triple_overlap(), shapes::weighted_overlap(),
        shapes::weighted_gradient(), shapes::weighted_derivative(), TableShape({0, 1, 1}, 1)}) {
    CAPTURE(shape.name());
    const auto& t = e.table(shape);
    double worst = 0;
    for (const auto& ix : t.indices()) {
      const double exact = t.at(std::span<const long>(ix.data(), t.rank()));
      const double approx = oracle_of(table_query(t, ix));
      worst = std::max(worst, std::abs(exact - approx) / std::max(1e-3, 1e-3 * std::abs(exact)));
    }
    MESSAGE(shape.name() << ": worst oracle deviation / tolerance = " << worst);
    CHECK(worst <= 1.0);
  }
}

TEST_CASE("general connection basics") {
  auto& e = engine();
  for (long m = -6; m <= 6; ++m)
    for (long n = -6; n <= 6; ++n) {
      const double v = e.evaluate({{{S, 0, m, 0}, {S, 0, n, 0}}, 0});
      CHECK(std::abs(v - (m == n ? 1.0 : 0.0)) < 1e-12);
    }
  // orthonormality across scales and against wavelets
  CHECK(std::abs(e.evaluate({{{S, 0, 1, 0}, {Wv, 0, 2, 0}}, 0})) < 1e-12);
  CHECK(std::abs(e.evaluate({{{Wv, 1, 3, 0}, {Wv, 2, 7, 0}}, 0})) < 1e-12);
  CHECK(std::abs(e.evaluate({{{Wv, 2, 7, 0}, {Wv, 2, 7, 0}}, 0}) - 1) < 1e-12);
  CHECK(std::abs(e.evaluate({{{S, 1, 0, 0}}, 0}) - std::pow(2.0, -0.5)) < 1e-14);
}

TEST_CASE("s' against w' at the next scale: banded route and oracle") {
  const auto D = engine().table(shapes::pair_derivative());
  const BandedOperator H(BandKind::H, k3()), G(BandKind::G, k3());
  Oracle fine(k3(), 18);
  for (long m : {-2L, 0L, 1L})
    for (long n : {-1L, 0L, 1L, 3L}) {
      CAPTURE(m);
      CAPTURE(n);
      // 2^{2 2} sum (H H)_{m, i} G_{n, j} D_{0, j - i} with i, j at scale 2
      double banded = 0;
      for (long a = -30; a <= 30; ++a)
        for (long i = -60; i <= 60; ++i) {
          const double hh = H.entry(m, a) * H.entry(a, i);
          if (hh == 0) continue;
          for (long j = 2 * n; j < 2 * n + 6; ++j) banded += hh * G.entry(n, j) * D.at(j - i);
        }
      banded *= 16;
      const ConnQuery q{{{S, 0, m, 1}, {Wv, 1, n, 1}}, 0};
      const double v = engine().evaluate(q);
      CHECK(std::abs(v - banded) < 1e-10);
      // the scale-1 derivative factor converges slowly, so sample finer
      const double o = fine.integrate({{S, 0, m, 1, 0}, {Wv, 1, n, 1, 0}});
      CAPTURE(v);
      CAPTURE(o);
      CHECK(oracle_close(v, o));
    }
}

TEST_CASE("disjoint supports give exact zeros without computing") {
  ConnectionEngine e(k3());
  const std::size_t before = e.memo_size();
  CHECK(e.evaluate({{{S, 0, 0, 1}, {S, 0, 5, 1}}, 0}) == 0.0);
  CHECK(e.evaluate({{{S, 0, 0, 1}, {S, 0, -9, 0}, {S, 0, 2, 1}}, 1}) == 0.0);
  CHECK(e.evaluate({{{S, 0, 0, 0}, {Wv, 3, 40, 1}}, 0}) == 0.0);  // w^3_40 lives on [5, 5.625]
  CHECK(e.memo_size() == before);
  const Factor touching[2] = {{S, 0, 0, 0}, {S, 0, 5, 0}};
  CHECK(disjoint_supports(3, touching));
  const Factor overlapping[2] = {{S, 0, 0, 0}, {S, 1, 9, 0}};
  CHECK_FALSE(disjoint_supports(3, overlapping));
}

TEST_CASE("scale covariance") {
  auto& e = engine();
  const std::vector<ConnQuery> qs = {
      {{{S, 0, 0, 1}, {S, 0, 2, 1}}, 0},
      {{{S, 0, 0, 0}, {S, 0, 1, 1}, {S, 0, -1, 1}}, 0},
      {{{S, 1, 0, 0}, {Wv, 1, 1, 1}, {S, 1, 2, 1}}, 0},
      {{{S, 0, 1, 0}, {S, 0, 2, 0}, {S, 0, 0, 1}}, 0},
      {{{S, 0, 0, 1}, {Wv, 0, 1, 1}}, 0},
      {{{S, 0, 0, 0}, {S, 0, 1, 0}}, 1},
      {{{S, 2, 3, 1}, {S, 2, 4, 1}}, 1},
      {{{S, 0, 1, 0}, {Wv, 1, 1, 0}, {S, 0, 0, 1}}, 1},
  };
  for (const auto& q : qs) {
    ConnQuery up = q;
    int total = 0;
    for (auto& f : up.factors) {
      ++f.scale;
      total += f.deriv;
    }
    const double expected = std::pow(2.0, 0.5 * q.factors.size() - 1 + total - q.power);
    const double a = e.evaluate(q), b = e.evaluate(up);
    CAPTURE(a);
    CHECK(std::abs(b - expected * a) <= 1e-12 * std::abs(b) + 1e-15);
  }
}

TEST_CASE("translation invariance and factor permutations") {
  auto& e = engine();
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> t(-3, 3), kind(0, 1), d(0, 1), sc(0, 2);
  int tested = 0;
  for (int trial = 0; trial < 200; ++trial) {
    ConnQuery q;
    const int n = 2 + trial % 2;
    int total = 0;
    for (int i = 0; i < n; ++i) {
      const int dd = total < 2 ? d(rng) : 0;
      total += dd;
      q.factors.push_back({kind(rng) ? S : Wv, sc(rng), t(rng), dd});
    }
    q.power = trial % 3 == 0 ? 1 : 0;
    const double v = e.evaluate(q);
    if (v == 0) continue;
    ++tested;
    // shift every factor by one unit length
    ConnQuery shifted = q;
    for (auto& f : shifted.factors) f.translation += 1L << f.scale;
    const double vs = e.evaluate(shifted);
    if (q.power == 0) {
      CHECK(std::abs(vs - v) < 1e-12 * std::max(1.0, std::abs(v)));
    } else {
      ConnQuery q0 = q;
      q0.power = 0;
      CHECK(std::abs(vs - (v + e.evaluate(q0))) < 1e-11 * std::max(1.0, std::abs(vs)));
    }
    ConnQuery perm = q;
    std::reverse(perm.factors.begin(), perm.factors.end());
    CHECK(std::abs(e.evaluate(perm) - v) < 1e-12 * std::max(1.0, std::abs(v)));
  }
  CHECK(tested > 50);
}

TEST_CASE("unsupported configurations") {
  auto& e = engine();
  CHECK_THROWS_AS(e.evaluate({{}, 0}), UnsupportedConfiguration);
  CHECK_THROWS_AS(e.evaluate({{{S, 0, 0, 0}, {S, 0, 0, 0}, {S, 0, 0, 0}, {S, 0, 0, 0}}, 0}), UnsupportedConfiguration);
  CHECK_THROWS_AS(e.evaluate({{{S, 0, 0, 2}, {S, 0, 0, 0}}, 0}), UnsupportedConfiguration);
  CHECK_THROWS_AS(e.evaluate({{{S, 0, 0, 1}, {S, 0, 0, 1}, {S, 0, 0, 1}}, 0}), UnsupportedConfiguration);
  CHECK_THROWS_AS(e.evaluate({{{S, 0, 0, 0}, {S, 0, 0, 0}}, 2}), UnsupportedConfiguration);
  try {
    e.evaluate({{{S, 0, 0, 2}}, 0});
  } catch (const UnsupportedConfiguration& x) {
    CHECK(std::string(x.what()).find("supported:") != std::string::npos);
  }
  ConnectionEngine e2(FilterBank::daubechies(2));
  CHECK_THROWS_AS(e2.evaluate({{{S, 0, 0, 1}, {S, 0, 0, 0}}, 0}), RegularityError);
  CHECK(std::abs(e2.evaluate({{{S, 0, 0, 0}, {S, 0, 0, 0}, {S, 0, 1, 0}}, 1}) -
                 oracle_integral(FilterBank::daubechies(2), {{S, 0, 0, 0, 1}, {S, 0, 0, 0, 0}, {S, 0, 1, 0, 0}}, 14)) < 1e-3);
}

TEST_CASE("inconsistent refinement system is reported") {
  auto h = std::vector<double>(k3().lowpass().begin(), k3().lowpass().end());
  h[0] += 1e-3;
  h[5] -= 1e-3;
  ConnectionEngine bad(FilterBank::unchecked(h));
  CHECK_THROWS_AS(bad.table(shapes::weighted_overlap()), DegenerateSystem);
}

TEST_CASE("concurrent evaluation matches serial evaluation") {
  ConnectionEngine shared(k3());
  std::vector<ConnQuery> qs;
  for (long m = -4; m <= 4; ++m)
    for (long n = -4; n <= 4; ++n) qs.push_back({{{S, 1, 0, 1}, {Wv, 2, m, 1}, {S, 1, n, 0}}, 0});
  std::vector<double> serial;
  {
    ConnectionEngine e(k3());
    for (const auto& q : qs) serial.push_back(e.evaluate(q));
  }
  std::vector<std::future<std::vector<double>>> jobs;
  for (int t = 0; t < 4; ++t)
    jobs.push_back(std::async(std::launch::async, [&] {
      std::vector<double> out;
      for (const auto& q : qs) out.push_back(shared.evaluate(q));
      return out;
    }));
  for (auto& j : jobs) CHECK(j.get() == serial);
}

TEST_CASE("table export") {
  const auto g = gamma_pair_table(k3());
  const auto csv = g.to_csv();
  CHECK(csv.rfind("m,value\n-4,", 0) == 0);
  const auto j = nlohmann::json::parse(triple_table(k3()).to_json());
  CHECK(j["table"] == "triple");
  CHECK(j["entries"].size() == 61);
  CHECK(j["entries"][0]["index"][0] == -4);
}
