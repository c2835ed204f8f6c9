#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/Dense>

#include "wft/conncoef.hpp"
#include "wft/errors.hpp"
#include "wft/format.hpp"

namespace wft {

Moments moments(const FilterBank& fb, int m_max) {
  if (m_max < 0) throw InvalidArgument("moment order must be non-negative");
  Moments out;
  auto& ms = out.scaling;
  ms.assign(static_cast<std::size_t>(m_max) + 1, 0.0);
  out.wavelet.assign(ms.size(), 0.0);
  ms[0] = 1.0;
  std::vector<double> binom{1.0};
  for (int m = 0; m <= m_max; ++m) {
    if (m > 0) {
      std::vector<double> row(static_cast<std::size_t>(m) + 1, 1.0);
      for (int j = 1; j < m; ++j) row[j] = binom[j - 1] + binom[j];
      binom = std::move(row);
    }
    // int x^m s(2x-l) dx = 2^{-m-1} sum_j C(m,j) l^{m-j} <x^j>
    const double pre = std::sqrt(2.0) * std::ldexp(1.0, -m - 1);
    if (m > 0) {
      double acc = 0;
      for (int l = 0; l < fb.taps(); ++l)
        for (int j = 0; j < m; ++j) acc += fb.h(l) * binom[j] * std::pow(double(l), m - j) * ms[j];
      ms[m] = pre * acc / (1.0 - std::ldexp(1.0, -m));
    }
    double acc = 0;
    for (int l = 0; l < fb.taps(); ++l)
      for (int j = 0; j <= m; ++j) acc += fb.g(l) * binom[j] * std::pow(double(l), m - j) * ms[j];
    out.wavelet[m] = pre * acc;
  }
  return out;
}

double translated_first_moment(const FilterBank& fb, long n) {
  double acc = 0;
  for (int l = 0; l < fb.taps(); ++l) acc += l * fb.h(l);
  return static_cast<double>(n) + acc / std::sqrt(2.0);
}

TableShape::TableShape(std::vector<int> d, int q) : derivs(std::move(d)), power(q) {
  std::sort(derivs.begin(), derivs.end());
}

int TableShape::total_derivative() const noexcept {
  int s = 0;
  for (int d : derivs) s += d;
  return s;
}

std::string TableShape::name() const {
  if (*this == shapes::overlap()) return "overlap";
  if (*this == shapes::gamma_pair()) return "gamma";
  if (*this == shapes::pair_derivative()) return "pair";
  if (*this == shapes::triple_derivative()) return "triple";
  if (*this == shapes::weighted_overlap()) return "F";
  if (*this == shapes::weighted_gradient()) return "X";
  if (*this == shapes::weighted_derivative()) return "G";
  std::string s = "s";
  for (int d : derivs) s += std::to_string(d);
  return s + "_q" + std::to_string(power);
}

BaseTable::BaseTable(int K, TableShape shape)
    : K_(K), shape_(std::move(shape)), window_(std::max(0, 2 * K - 2)) {
  if (shape_.arity() < 2 || shape_.arity() > 3)
    throw UnsupportedConfiguration("base tables have two or three factors");
  const long W = window_;
  if (rank() == 1) {
    values_.assign(static_cast<std::size_t>(2 * W + 1), 0.0);
    for (long m = -W; m <= W; ++m) indices_.push_back({m, 0});
  } else {
    values_.assign(static_cast<std::size_t>((2 * W + 1) * (2 * W + 1)), 0.0);
    for (long l = -W; l <= W; ++l)
      for (long m = -W; m <= W; ++m)
        if (std::abs(l - m) <= W) indices_.push_back({l, m});
  }
}

bool BaseTable::in_window(std::span<const long> t) const noexcept {
  if (static_cast<int>(t.size()) != rank()) return false;
  for (long v : t)
    if (std::abs(v) > window_) return false;
  if (rank() == 2 && std::abs(t[0] - t[1]) > window_) return false;
  return true;
}

std::size_t BaseTable::offset(std::span<const long> t) const noexcept {
  const long W = window_;
  if (rank() == 1) return static_cast<std::size_t>(t[0] + W);
  return static_cast<std::size_t>((t[0] + W) * (2 * W + 1) + (t[1] + W));
}

double BaseTable::at(std::span<const long> t) const noexcept {
  return in_window(t) ? values_[offset(t)] : 0.0;
}

double BaseTable::at(long t) const noexcept {
  const long a[1] = {t};
  return at(std::span<const long>(a, 1));
}

double BaseTable::at(long l, long m) const noexcept {
  const long a[2] = {l, m};
  return at(std::span<const long>(a, 2));
}

double& BaseTable::ref(std::span<const long> t) {
  if (!in_window(t)) throw InvalidArgument("index outside the table window");
  return values_[offset(t)];
}

std::string BaseTable::to_csv() const {
  std::ostringstream os;
  os << (rank() == 1 ? "m,value\n" : "l,m,value\n");
  for (const auto& ix : indices_) {
    os << ix[0] << ',';
    if (rank() == 2) os << ix[1] << ',';
    os << format_number(at(std::span<const long>(ix.data(), rank()))) << '\n';
  }
  return os.str();
}

std::string BaseTable::to_json() const {
  std::ostringstream os;
  os << "{\"K\":" << K_ << ",\"table\":\"" << shape_.name() << "\",\"derivs\":[";
  for (std::size_t i = 0; i < shape_.derivs.size(); ++i) os << (i ? "," : "") << shape_.derivs[i];
  os << "],\"power\":" << shape_.power << ",\"entries\":[";
  bool first = true;
  for (const auto& ix : indices_) {
    os << (first ? "" : ",") << "{\"index\":[" << ix[0];
    if (rank() == 2) os << ',' << ix[1];
    os << "],\"value\":" << format_number(at(std::span<const long>(ix.data(), rank()))) << '}';
    first = false;
  }
  os << "]}";
  return os.str();
}

namespace {

// int s^(d)(x) x^q dx
double single_factor_integral(const Moments& mom, int d, int q) {
  if (d == 0) return mom.scaling.at(static_cast<std::size_t>(q));
  return q == 0 ? 0.0 : -q * mom.scaling.at(static_cast<std::size_t>(q - 1));
}

class System {
 public:
  explicit System(std::size_t n) : n_(n) {}
  std::vector<double>& row() {
    rows_.emplace_back(n_, 0.0);
    rhs_.push_back(0.0);
    return rows_.back();
  }
  double& rhs() { return rhs_.back(); }

  Eigen::VectorXd solve(const std::string& what) const {
    Eigen::MatrixXd A(static_cast<Eigen::Index>(rows_.size()), static_cast<Eigen::Index>(n_));
    Eigen::VectorXd b(static_cast<Eigen::Index>(rows_.size()));
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      for (std::size_t j = 0; j < n_; ++j) A(i, j) = rows_[i][j];
      b(i) = rhs_[i];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    const auto r = qr.rank();
    if (r < static_cast<Eigen::Index>(n_))
      throw DegenerateSystem(what + ": refinement system has rank " + std::to_string(r) +
                             " for " + std::to_string(n_) + " unknowns (rank defect " +
                             std::to_string(n_ - static_cast<std::size_t>(r)) + ")");
    Eigen::VectorXd x = qr.solve(b);
    const double res = (A * x - b).cwiseAbs().maxCoeff();
    if (!(res < 1e-10))
      throw DegenerateSystem(what + ": refinement system is inconsistent (residual " +
                             format_number(res) + ")");
    return x;
  }

 private:
  std::size_t n_;
  std::vector<std::vector<double>> rows_;
  std::vector<double> rhs_;
};

}  // namespace

BaseTable solve_base_table(const FilterBank& fb, const TableShape& shape,
                           ConnectionEngine& deps) {
  const int K = fb.order();
  for (int d : shape.derivs)
    if (d < 0 || d > 1)
      throw UnsupportedConfiguration("derivative order " + std::to_string(d) +
                                     " is not supported (orders 0 and 1 only)");
  if (shape.power < 0 || shape.power > 1)
    throw UnsupportedConfiguration("monomial power must be 0 or 1");
  if (shape.total_derivative() > 0 && max_derivative(K) < 1) throw RegularityError(K, 1);

  BaseTable table(K, shape);
  const int rank = table.rank();
  const auto& idx = table.indices();
  const long W = table.window();

  if (shape == shapes::overlap()) {
    table.ref(std::array<long, 1>{0}) = 1.0;
    return table;
  }
  if (shape == shapes::pair_derivative())
    return pair_derivative_table(deps.table(shapes::triple_derivative()));

  const int n = static_cast<int>(shape.arity());
  const int q = shape.power;
  const auto& d = shape.derivs;
  const Moments& mom = deps.moment_table();
  const BaseTable* T0 = q == 1 ? &deps.table(TableShape(d, 0)) : nullptr;

  std::map<std::array<long, 2>, std::size_t> pos;
  for (std::size_t i = 0; i < idx.size(); ++i) pos[idx[i]] = i;
  const auto column = [&](long a, long b) -> long {
    std::array<long, 2> key{a, rank == 2 ? b : 0};
    if (rank == 2 && (std::abs(a) > W || std::abs(b) > W || std::abs(a - b) > W)) return -1;
    if (rank == 1 && std::abs(a) > W) return -1;
    auto it = pos.find(key);
    return it == pos.end() ? -1 : static_cast<long>(it->second);
  };
  const auto t0 = [&](long a, long b) {
    return rank == 1 ? T0->at(a) : T0->at(a, b);
  };

  System sys(idx.size());
  const int L = fb.taps();
  const double c = std::pow(2.0, 0.5 * n + shape.total_derivative() - 1 - q);

  // scaling equation applied to every factor, then shifted by the first
  for (const auto& t : idx) {
    auto& row = sys.row();
    double rhs = 0;
    row[static_cast<std::size_t>(column(t[0], t[1]))] += 1.0;
    for (int a1 = 0; a1 < L; ++a1)
      for (int a2 = 0; a2 < L; ++a2)
        for (int a3 = 0; a3 < (rank == 2 ? L : 1); ++a3) {
          const double w = c * fb.h(a1) * fb.h(a2) * (rank == 2 ? fb.h(a3) : 1.0);
          const long u2 = 2 * t[0] + a2 - a1;
          const long u3 = rank == 2 ? 2 * t[1] + a3 - a1 : 0;
          const long col = column(u2, u3);
          if (col < 0) continue;
          row[static_cast<std::size_t>(col)] -= w;
          if (q == 1) rhs += w * a1 * t0(u2, u3);
        }
    sys.rhs() = rhs;
  }

  // partition of unity on each non-first factor
  for (int i = 1; i < n; ++i) {
    const int slot = i - 1;
    TableShape sub_shape;
    {
      std::vector<int> rest = d;
      rest.erase(rest.begin() + i);
      sub_shape = TableShape(rest, q);
    }
    const BaseTable* sub = sub_shape.arity() >= 2 ? &deps.table(sub_shape) : nullptr;
    const long other_lo = rank == 2 ? -W : 0, other_hi = rank == 2 ? W : 0;
    for (long other = other_lo; other <= other_hi; ++other) {
      const double sub_value =
          sub ? sub->at(other) : single_factor_integral(mom, d[0], q);
      for (int moment = 0; moment <= d[i]; ++moment) {
        auto& row = sys.row();
        for (long ti = -W; ti <= W; ++ti) {
          const long a = slot == 0 ? ti : other;
          const long b = slot == 0 ? other : ti;
          const long col = column(a, b);
          if (col >= 0) row[static_cast<std::size_t>(col)] += moment == 0 ? 1.0 : double(ti);
        }
        sys.rhs() = (moment == d[i]) ? sub_value : 0.0;
      }
    }
  }

  // reordering factors of equal derivative order
  if (rank == 2 && d[1] == d[2])
    for (const auto& t : idx) {
      auto& row = sys.row();
      row[static_cast<std::size_t>(column(t[0], t[1]))] += 1.0;
      row[static_cast<std::size_t>(column(t[1], t[0]))] -= 1.0;
    }
  for (int j = 1; j < n; ++j) {
    if (d[j] != d[0]) continue;
    for (const auto& t : idx) {
      const long tj = t[j - 1];
      long a, b;
      if (rank == 1) {
        a = -tj;
        b = 0;
      } else if (j == 1) {
        a = -tj;
        b = t[1] - tj;
      } else {
        a = t[0] - tj;
        b = -tj;
      }
      auto& row = sys.row();
      row[static_cast<std::size_t>(column(t[0], t[1]))] += 1.0;
      const long col = column(a, b);
      if (col >= 0) row[static_cast<std::size_t>(col)] -= 1.0;
      sys.rhs() = q == 1 ? tj * t0(a, b) : 0.0;
    }
  }

  const Eigen::VectorXd x = sys.solve(shape.name());
  for (std::size_t i = 0; i < idx.size(); ++i)
    table.ref(std::span<const long>(idx[i].data(), static_cast<std::size_t>(rank))) = x(i);
  return table;
}

BaseTable gamma_pair_table(const FilterBank& fb) {
  ConnectionEngine e(fb);
  return e.table(shapes::gamma_pair());
}

BaseTable triple_table(const FilterBank& fb) {
  ConnectionEngine e(fb);
  return e.table(shapes::triple_derivative());
}

BaseTable pair_derivative_table(const BaseTable& triple) {
  if (triple.shape() != shapes::triple_derivative())
    throw InvalidArgument("pair contraction needs the s s' s' triple table");
  BaseTable out(triple.order(), shapes::pair_derivative());
  const long W = out.window();
  for (long m = -W; m <= W; ++m) {
    double acc = 0;
    for (long n = -2 * W; n <= 2 * W; ++n) acc += triple.at(-n, m - n);
    out.ref(std::array<long, 1>{m}) = acc;
  }
  return out;
}

BaseTable weighted_pair_table(const FilterBank& fb, int d1, int d2, int q) {
  if (d1 > d2)
    throw InvalidArgument("weighted pair tables are stored with d1 <= d2; swap the factors");
  if (q < 0 || q > 1) throw UnsupportedConfiguration("monomial power must be 0 or 1");
  ConnectionEngine e(fb);
  return e.table(TableShape({d1, d2}, q));
}

}  // namespace wft
