#include <cmath>
#include <map>
#include <tuple>

#include "wft/errors.hpp"
#include "wft/hamiltonian.hpp"

namespace wft {

GeneratorCoefficients generator_matrices(ConnectionEngine& engine, int k, long N) {
  const int K = engine.order();
  if (K != 3) throw RegularityError(K, 1);
  if (N < 2 * (2 * K - 1))
    throw InvalidArgument("periodic volume N=" + std::to_string(N) + " is below the minimum " +
                          std::to_string(2 * (2 * K - 1)));
  const BaseTable& gam = engine.table(shapes::gamma_pair());
  const BaseTable& D = engine.table(shapes::pair_derivative());
  const BaseTable& F = engine.table(shapes::weighted_overlap());
  const BaseTable& G = engine.table(shapes::weighted_derivative());
  const BaseTable& X = engine.table(shapes::weighted_gradient());

  GeneratorCoefficients out;
  out.scale = k;
  out.volume = N;
  out.translation = Eigen::MatrixXd::Zero(N, N);
  out.boost_overlap = Eigen::MatrixXd::Zero(N, N);
  out.boost_gradient = Eigen::MatrixXd::Zero(N, N);
  out.rotation = Eigen::MatrixXd::Zero(N, N);

  const double up = std::ldexp(1.0, k), down = std::ldexp(1.0, -k);
  const long W = gam.window();
  for (long m = 0; m < N; ++m)
    for (long t = -W; t <= W; ++t) {
      const long n = ((m + t) % N + N) % N;
      out.translation(m, n) += up * gam.at(t);
    }
  for (long n = 0; n < N; ++n)
    for (long m = std::max(0L, n - W); m <= std::min(N - 1, n + W); ++m) {
      const long t = m - n;
      const double nn = static_cast<double>(n);
      out.boost_overlap(n, m) = down * (F.at(t) + (t == 0 ? nn : 0.0));
      out.boost_gradient(n, m) = up * (G.at(t) + nn * D.at(t));
      out.rotation(n, m) = X.at(t) + nn * gam.at(t);
    }
  return out;
}

std::vector<MomentumEntry> partition_momentum_coefficients(ConnectionEngine& engine, int k,
                                                           long N) {
  const int K = engine.order();
  if (K != 3) throw RegularityError(K, 1);
  if (N < 2 * (2 * K - 1))
    throw InvalidArgument("periodic volume N=" + std::to_string(N) + " is below the minimum " +
                          std::to_string(2 * (2 * K - 1)));
  const long W = 2L * K - 2;
  const double pre = -std::pow(2.0, -0.5 * k);
  std::map<std::tuple<long, long, long>, double> acc;
  for (long m = 0; m < N; ++m)
    for (long t2 = -W; t2 <= W; ++t2)
      for (long t3 = -W; t3 <= W; ++t3) {
        if (std::abs(t2 - t3) > W) continue;
        const ConnQuery q{{{BasisKind::scaling, k, m, 0},
                           {BasisKind::scaling, k, m + t2, 0},
                           {BasisKind::scaling, k, m + t3, 1}},
                          0};
        const double v = engine.evaluate(q);
        if (v == 0) continue;
        const long n = ((m + t2) % N + N) % N, j = ((m + t3) % N + N) % N;
        acc[{m, n, j}] += pre * v;
      }
  std::vector<MomentumEntry> out;
  out.reserve(acc.size());
  for (const auto& [key, v] : acc)
    if (v != 0) out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), v});
  return out;
}

}  // namespace wft
