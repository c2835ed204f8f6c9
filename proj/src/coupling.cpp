#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "wft/errors.hpp"
#include "wft/format.hpp"
#include "wft/hamiltonian.hpp"

namespace wft {

std::string to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::ss: return "ss";
    case BlockKind::sw: return "sw";
    case BlockKind::ww: return "ww";
  }
  return "?";
}

long family_size(long N, int coarse_scale, int scale) {
  return N << (scale - coarse_scale);
}

namespace {

long wrap(long i, long P) { return ((i % P) + P) % P; }

// D_0t summed over all periodic images t + rP
std::vector<double> periodic_pair(const BaseTable& D, long P) {
  std::vector<double> out(static_cast<std::size_t>(P), 0.0);
  const long W = D.window();
  for (long t = -W; t <= W; ++t) out[wrap(t, P)] += D.at(t);
  return out;
}

// scale-`target` scaling coefficients of one basis function, built with the
// banded H^T / G^T products
IndexedSequence refine_coefficients(const FilterBank& fb, BasisKind kind, int scale,
                                    long translation, int target) {
  IndexedSequence c;
  if (kind == BasisKind::scaling) {
    c.first = translation;
    c.values = {1.0};
  } else {
    c = BandedOperator(BandKind::Gt, fb).apply({translation, {1.0}}, Boundary::zero);
    ++scale;
  }
  const BandedOperator up(BandKind::Ht, fb);
  for (; scale < target; ++scale) c = up.apply(c, Boundary::zero);
  return c;
}

// int f'_row g'_col over one period, both families expanded to scale `fine`
Eigen::MatrixXd derivative_block(const FilterBank& fb, const BaseTable& D, long N, int k,
                                 BasisKind row_kind, int row_scale, BasisKind col_kind,
                                 int col_scale, int fine) {
  const long P = N << (fine - k);
  const long rows = family_size(N, k, row_scale), cols = family_size(N, k, col_scale);
  const double scale = std::ldexp(1.0, 2 * fine);
  const auto c0 = refine_coefficients(fb, col_kind, col_scale, 0, fine);
  const long col_step = 1L << (fine - col_scale);

  Eigen::MatrixXd out(rows, cols);
  std::vector<double> y(static_cast<std::size_t>(P));
  for (long m = 0; m < rows; ++m) {
    const auto a = refine_coefficients(fb, row_kind, row_scale, m, fine);
    // y_j = sum_i a_i D_per(j - i)
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      if (a.values[i] == 0) continue;
      const long ii = a.first + static_cast<long>(i);
      for (long t = -D.window(); t <= D.window(); ++t)
        y[wrap(ii + t, P)] += a.values[i] * D.at(t);
    }
    for (long n = 0; n < cols; ++n) {
      double acc = 0;
      for (std::size_t j = 0; j < c0.values.size(); ++j)
        acc += c0.values[j] * y[wrap(c0.first + static_cast<long>(j) + n * col_step, P)];
      out(m, n) = scale * acc;
    }
  }
  return out;
}

}  // namespace

std::vector<CouplingBlock> coupling_blocks(ConnectionEngine& engine, int k, int l_max, long N) {
  const FilterBank& fb = engine.filters();
  const int K = fb.order();
  if (K != 3) throw RegularityError(K, 1);
  if (N < 2 * (2 * K - 1))
    throw InvalidArgument("periodic volume N=" + std::to_string(N) + " is below the minimum " +
                          std::to_string(2 * (2 * K - 1)));
  if (l_max - k > 12) throw InvalidArgument("at most 12 wavelet scales above the coarse scale");
  const BaseTable& D = engine.table(shapes::pair_derivative());

  std::vector<CouplingBlock> out;
  {
    CouplingBlock b{BlockKind::ss, k, k, static_cast<int>(N), Eigen::MatrixXd::Zero(N, N)};
    const double s = std::ldexp(1.0, 2 * k);
    const auto Dp = periodic_pair(D, N);
    for (long m = 0; m < N; ++m)
      for (long n = 0; n < N; ++n) b.matrix(m, n) = s * Dp[wrap(n - m, N)];
    out.push_back(std::move(b));
  }
  for (int l = k; l <= l_max; ++l)
    out.push_back({BlockKind::sw, k, l, static_cast<int>(N),
                   derivative_block(fb, D, N, k, BasisKind::scaling, k, BasisKind::wavelet, l,
                                    l + 1)});
  for (int j = k; j <= l_max; ++j)
    for (int l = j; l <= l_max; ++l)
      out.push_back({BlockKind::ww, j, l, static_cast<int>(N),
                     derivative_block(fb, D, N, k, BasisKind::wavelet, j, BasisKind::wavelet, l,
                                      l + 1)});
  return out;
}

Eigen::MatrixXd QuadraticForm::block_aa() const {
  const long a = coarse_size();
  return matrix.topLeftCorner(a, a);
}

Eigen::MatrixXd QuadraticForm::block_ab() const {
  const long a = coarse_size();
  return matrix.topRightCorner(a, matrix.cols() - a);
}

Eigen::MatrixXd QuadraticForm::block_bb() const {
  const long a = coarse_size();
  return matrix.bottomRightCorner(matrix.rows() - a, matrix.cols() - a);
}

QuadraticForm quadratic_form(double mu, const std::vector<CouplingBlock>& blocks) {
  if (!(mu > 0)) throw DomainError("mass must be positive, got " + format_number(mu));
  const CouplingBlock* ss = nullptr;
  for (const auto& b : blocks)
    if (b.kind == BlockKind::ss) ss = &b;
  if (!ss) throw InvalidArgument("quadratic form needs the ss block");

  QuadraticForm q;
  q.mu = mu;
  q.coarse_scale = ss->row_scale;
  q.volume = ss->volume;
  const int k = q.coarse_scale;
  q.segments.push_back({BasisKind::scaling, k, 0, ss->matrix.rows()});
  int l_max = k - 1;
  for (const auto& b : blocks)
    if (b.kind != BlockKind::ss) l_max = std::max(l_max, b.col_scale);
  long offset = ss->matrix.rows();
  for (int l = k; l <= l_max; ++l) {
    const long n = family_size(q.volume, k, l);
    q.segments.push_back({BasisKind::wavelet, l, offset, n});
    offset += n;
  }
  const auto seg = [&](BasisKind kind, int scale) -> const IndexSegment& {
    for (const auto& s : q.segments)
      if (s.kind == kind && s.scale == scale) return s;
    throw InvalidArgument("block scale outside the assembled range");
  };

  q.matrix = Eigen::MatrixXd::Zero(offset, offset);
  for (const auto& b : blocks) {
    const auto& r = b.kind == BlockKind::ww ? seg(BasisKind::wavelet, b.row_scale)
                                            : seg(BasisKind::scaling, b.row_scale);
    const auto& c = b.kind == BlockKind::ss ? seg(BasisKind::scaling, b.col_scale)
                                            : seg(BasisKind::wavelet, b.col_scale);
    if (b.matrix.rows() != r.size || b.matrix.cols() != c.size)
      throw InvalidArgument("coupling block shape does not match the volume");
    q.matrix.block(r.offset, c.offset, r.size, c.size) = b.matrix;
    if (r.offset != c.offset)
      q.matrix.block(c.offset, r.offset, c.size, r.size) = b.matrix.transpose();
  }
  q.matrix.diagonal().array() += mu * mu;

  const double asym = (q.matrix - q.matrix.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, q.matrix.cwiseAbs().maxCoeff()))
    throw Error("internal error: assembled quadratic form is not symmetric (" +
                format_number(asym) + ")");
  return q;
}

std::vector<double> circulant_spectrum(const BaseTable& pair, double mu, int k, long N) {
  if (N <= 0) throw InvalidArgument("volume must be positive");
  std::vector<double> out(static_cast<std::size_t>(N));
  const double s = std::ldexp(1.0, 2 * k);
  const double pi = std::acos(-1.0);
  for (long r = 0; r < N; ++r) {
    const double p = 2 * pi * static_cast<double>(r) / static_cast<double>(N);
    double acc = 0;
    for (long m = -pair.window(); m <= pair.window(); ++m)
      acc += pair.at(m) * std::cos(p * static_cast<double>(m));
    out[r] = mu * mu + s * acc;
  }
  return out;
}

std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver failed");
  const auto& v = es.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_number(m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string matrix_coo(const Eigen::MatrixXd& m, double drop) {
  std::string out = "row,col,value\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0 && std::abs(m(i, j)) > drop)
        out += std::to_string(i) + ',' + std::to_string(j) + ',' + format_number(m(i, j)) + '\n';
  return out;
}

}  // namespace wft
