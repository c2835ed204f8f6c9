#include <cmath>

#include <Eigen/Eigenvalues>

#include "wft/errors.hpp"
#include "wft/format.hpp"
#include "wft/hamiltonian.hpp"

namespace wft {

namespace {

Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.operatorInverseSqrt();
}

}  // namespace

OkuboResult okubo_block(const Eigen::MatrixXd& H_a, const Eigen::MatrixXd& H_c,
                        const Eigen::MatrixXd& H_I, const OkuboOptions& opt) {
  const long na = H_a.rows(), nc = H_c.rows();
  if (H_a.cols() != na || H_c.cols() != nc || H_I.rows() != na || H_I.cols() != nc)
    throw InvalidArgument("okubo blocks: expected H_a (na x na), H_c (nc x nc), H_I (na x nc)");

  const double scale =
      std::max({1.0, H_a.cwiseAbs().maxCoeff(), H_c.cwiseAbs().maxCoeff(),
                na && nc ? H_I.cwiseAbs().maxCoeff() : 0.0});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(H_a), ec(H_c);
  const Eigen::VectorXd la = ea.eigenvalues(), lc = ec.eigenvalues();
  const Eigen::MatrixXd& Va = ea.eigenvectors();
  const Eigen::MatrixXd& Vc = ec.eigenvectors();
  Eigen::MatrixXd denom(nc, na);
  double gap = std::numeric_limits<double>::infinity();
  for (long i = 0; i < nc; ++i)
    for (long j = 0; j < na; ++j) {
      denom(i, j) = la(j) - lc(i);
      gap = std::min(gap, std::abs(denom(i, j)));
    }
  if (na && nc && gap < opt.gap_tolerance * scale)
    throw NoSpectralGap("no spectral gap between the blocks: eigenvalues of H_a and H_c come "
                        "within " + format_number(gap) + "; the Sylvester equation is singular");

  OkuboResult r;
  r.A = Eigen::MatrixXd::Zero(nc, na);
  const auto residual = [&](const Eigen::MatrixXd& A) {
    if (!A.size()) return 0.0;
    return (A * H_a - H_c * A + H_I.transpose() - A * H_I * A).cwiseAbs().maxCoeff();
  };
  double res = residual(r.A);
  r.residual_history.push_back(res);
  while (res > opt.tolerance * scale) {
    if (r.iterations >= opt.max_iterations || !std::isfinite(res) || res > 1e12 * scale)
      throw ConvergenceError("okubo iteration did not converge after " +
                                 std::to_string(r.iterations) + " iterations (residual " +
                                 format_number(res) + ")",
                             r.residual_history);
    // A' H_a - H_c A' = A H_I A - H_I^T in the eigenbases of H_a and H_c
    const Eigen::MatrixXd R = r.A * H_I * r.A - H_I.transpose();
    const Eigen::MatrixXd Rt = Vc.transpose() * R * Va;
    r.A = Vc * Rt.cwiseQuotient(denom) * Va.transpose();
    ++r.iterations;
    res = residual(r.A);
    r.residual_history.push_back(res);
  }

  const Eigen::MatrixXd Sa = inverse_sqrt(Eigen::MatrixXd::Identity(na, na) + r.A.transpose() * r.A);
  const Eigen::MatrixXd Sc = inverse_sqrt(Eigen::MatrixXd::Identity(nc, nc) + r.A * r.A.transpose());
  r.U.resize(na + nc, na + nc);
  r.U.topLeftCorner(na, na) = Sa;
  r.U.topRightCorner(na, nc) = -r.A.transpose() * Sc;
  r.U.bottomLeftCorner(nc, na) = r.A * Sa;
  r.U.bottomRightCorner(nc, nc) = Sc;

  Eigen::MatrixXd H(na + nc, na + nc);
  H << H_a, H_I, H_I.transpose(), H_c;
  r.H_block = r.U * H * r.U.transpose();
  r.off_block_norm = std::sqrt(r.H_block.topRightCorner(na, nc).squaredNorm() +
                               r.H_block.bottomLeftCorner(nc, na).squaredNorm());
  return r;
}

}  // namespace wft
