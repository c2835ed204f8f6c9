#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "wft/errors.hpp"
#include "wft/format.hpp"
#include "wft/hamiltonian.hpp"

namespace wft {

namespace odeint = boost::numeric::odeint;

std::string to_string(FlowVariant v) {
  return v == FlowVariant::wegner ? "wegner" : "fixed";
}

FlowVariant parse_flow_variant(const std::string& name) {
  if (name == "wegner" || name == "dynamic") return FlowVariant::wegner;
  if (name == "fixed" || name == "fixed-generator") return FlowVariant::fixed_generator;
  throw InvalidArgument("unknown flow variant '" + name + "' (expected wegner or fixed)");
}

namespace {

Eigen::MatrixXd block_diagonal(const Eigen::MatrixXd& H, long split) {
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(H.rows(), H.cols());
  const long n = H.rows();
  G.topLeftCorner(split, split) = H.topLeftCorner(split, split);
  G.bottomRightCorner(n - split, n - split) = H.bottomRightCorner(n - split, n - split);
  return G;
}

double off_norm(const Eigen::MatrixXd& H, long split) {
  const long n = H.rows();
  // both off-diagonal blocks, so a symmetric matrix counts its coupling twice
  return std::sqrt(H.topRightCorner(split, n - split).squaredNorm() +
                   H.bottomLeftCorner(n - split, split).squaredNorm());
}

using State = std::vector<double>;

}  // namespace

double FlowState::off_block_norm() const { return off_norm(matrix, split); }

double FlowState::asymmetry() const {
  return matrix.size() ? (matrix - matrix.transpose()).cwiseAbs().maxCoeff() : 0.0;
}

std::string FlowState::history_csv() const {
  std::string out = "lambda,off_block_norm,min_eig_drift,max_eig_drift\n";
  for (const auto& s : history)
    out += format_number(s.lambda) + ',' + format_number(s.off_block_norm) + ',' +
           format_number(s.min_eigen_drift) + ',' + format_number(s.max_eigen_drift) + '\n';
  return out;
}

FlowState wegner_flow(const Eigen::MatrixXd& initial, long split, const FlowOptions& opt) {
  const long n = initial.rows();
  if (initial.cols() != n || n == 0) throw InvalidArgument("flow needs a square matrix");
  if (split < 0 || split > n) throw InvalidArgument("block split outside the matrix");
  const double asym = (initial - initial.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, initial.cwiseAbs().maxCoeff()))
    throw InvalidArgument("flow input is not symmetric (asymmetry " + format_number(asym) + ")");
  if (!(opt.lambda_max >= 0) || !(opt.initial_step > 0))
    throw InvalidArgument("flow needs lambda_max >= 0 and a positive initial step");

  const Eigen::MatrixXd G0 = block_diagonal(initial, split);
  const auto eig0 = symmetric_eigenvalues(initial);
  const auto sys = [&](const State& x, State& dxdt, double) {
    Eigen::Map<const Eigen::MatrixXd> H(x.data(), n, n);
    const Eigen::MatrixXd G =
        opt.variant == FlowVariant::wegner ? block_diagonal(H, split) : G0;
    const Eigen::MatrixXd C = H * G - G * H;
    dxdt.resize(x.size());
    Eigen::Map<Eigen::MatrixXd>(dxdt.data(), n, n) = H * C - C * H;
  };

  FlowState st;
  st.split = split;
  State x(initial.data(), initial.data() + initial.size());
  const auto sample = [&](double lambda, const State& s) {
    Eigen::Map<const Eigen::MatrixXd> H(s.data(), n, n);
    const Eigen::MatrixXd Hs = 0.5 * (H + H.transpose());
    const auto e = symmetric_eigenvalues(Hs);
    double lo = 0, hi = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      const double d = e[i] - eig0[i];
      lo = i ? std::min(lo, d) : d;
      hi = i ? std::max(hi, d) : d;
    }
    st.history.push_back({lambda, off_norm(H, split), lo, hi});
  };
  sample(0.0, x);
  const double off0 = st.history.back().off_block_norm;
  const double scale = initial.norm();

  auto stepper = odeint::make_controlled(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<State>());
  double t = 0, dt = opt.initial_step;
  long steps = 0;
  State trial;
  while (t < opt.lambda_max) {
    const double off = st.history.back().off_block_norm;
    if (opt.target_ratio > 0 && off <= opt.target_ratio * off0) break;
    if (off <= 1e-14 * scale) break;  // coupling is at rounding level
    if (++steps > opt.max_steps) {
      std::vector<double> h;
      for (const auto& s : st.history) h.push_back(s.off_block_norm);
      throw ConvergenceError("flow exceeded " + std::to_string(opt.max_steps) + " steps", h);
    }
    if (dt < opt.min_step) {
      std::vector<double> h;
      for (const auto& s : st.history) h.push_back(s.off_block_norm);
      throw ConvergenceError("flow step size underflow at lambda=" + format_number(t), h);
    }
    dt = std::min(dt, opt.lambda_max - t);
    trial = x;
    double tt = t;
    const double dt_try = dt;
    if (stepper.try_step(sys, trial, tt, dt) != odeint::success) continue;
    // a NaN error estimate compares as accepted
    if (!std::all_of(trial.begin(), trial.end(), [](double v) { return std::isfinite(v); })) {
      stepper.reset();
      dt = 0.5 * dt_try;
      continue;
    }
    if (opt.variant == FlowVariant::wegner) {
      Eigen::Map<const Eigen::MatrixXd> H(trial.data(), n, n);
      if (off_norm(H, split) > st.history.back().off_block_norm) {
        // the Wegner generator never increases the coupling; treat as an error-control failure
        stepper.reset();
        dt = 0.5 * dt_try;
        continue;
      }
    }
    x.swap(trial);
    t = tt;
    sample(t, x);
  }

  st.lambda = t;
  st.matrix = Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n);
  return st;
}

}  // namespace wft
