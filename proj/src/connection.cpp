#include <algorithm>
#include <cmath>
#include <numeric>

#include "wft/conncoef.hpp"
#include "wft/errors.hpp"

namespace wft {

namespace {

const char* kSupported =
    "supported: 1 to 3 factors, derivative order 0 or 1 per factor, total derivative "
    "order <= 2, monomial power 0 or 1";

void validate(int K, const ConnQuery& q) {
  if (q.factors.empty() || q.factors.size() > 3)
    throw UnsupportedConfiguration("configuration not supported: " +
                                   std::to_string(q.factors.size()) + " factors (" + kSupported +
                                   ")");
  int total = 0;
  for (const auto& f : q.factors) {
    if (f.deriv < 0 || f.deriv > 1)
      throw UnsupportedConfiguration("configuration not supported: derivative order " +
                                     std::to_string(f.deriv) + " (" + kSupported + ")");
    total += f.deriv;
  }
  if (total > 2)
    throw UnsupportedConfiguration("configuration not supported: total derivative order " +
                                   std::to_string(total) + " (" + kSupported + ")");
  if (q.power < 0 || q.power > 1)
    throw UnsupportedConfiguration("configuration not supported: power " +
                                   std::to_string(q.power) + " (" + kSupported + ")");
  if (total > 0 && max_derivative(K) < 1) throw RegularityError(K, 1);
  int lo = q.factors.front().scale, hi = lo;
  for (const auto& f : q.factors) {
    lo = std::min(lo, f.scale);
    hi = std::max(hi, f.scale);
  }
  if (hi - lo > 24) throw UnsupportedConfiguration("scale spread above 24 is not supported");
}

// scale-K0 scaling-function coefficients of one factor
IndexedSequence expand(const FilterBank& fb, const Factor& f, int K0) {
  IndexedSequence c;
  int k = f.scale;
  if (f.kind == BasisKind::scaling) {
    c.first = f.translation;
    c.values = {1.0};
  } else {
    c.first = 2 * f.translation;
    c.values.assign(fb.highpass().begin(), fb.highpass().end());
    ++k;
  }
  const BandedOperator up(BandKind::Ht, fb);
  for (; k < K0; ++k) c = up.apply(c, Boundary::zero);
  return c;
}

}  // namespace

bool disjoint_supports(int K, std::span<const Factor> factors) {
  if (factors.empty()) return false;
  int kmax = factors.front().scale;
  for (const auto& f : factors) kmax = std::max(kmax, f.scale);
  const long span = 2L * K - 1;
  long lo = std::numeric_limits<long>::min(), hi = std::numeric_limits<long>::max();
  for (const auto& f : factors) {
    const long unit = 1L << (kmax - f.scale);
    lo = std::max(lo, f.translation * unit);
    hi = std::min(hi, (f.translation + span) * unit);
  }
  return lo >= hi;
}

ConnectionEngine::ConnectionEngine(FilterBank fb) : fb_(std::move(fb)) {}

const Moments& ConnectionEngine::moment_table() {
  std::call_once(moments_once_, [this] { moments_ = moments(fb_, 4); });
  return moments_;
}

const BaseTable& ConnectionEngine::table(const TableShape& shape) {
  std::lock_guard lock(build_mutex_);
  auto it = tables_.find(shape);
  if (it != tables_.end()) return *it->second;
  auto t = build(shape);
  auto& slot = tables_[shape];
  slot = std::move(t);
  return *slot;
}

std::unique_ptr<BaseTable> ConnectionEngine::build(const TableShape& shape) {
  return std::make_unique<BaseTable>(solve_base_table(fb_, shape, *this));
}

std::size_t ConnectionEngine::memo_size() const {
  std::shared_lock lock(mutex_);
  return memo_.size();
}

double ConnectionEngine::evaluate(const ConnQuery& query) {
  validate(order(), query);
  if (disjoint_supports(order(), query.factors)) return 0.0;

  ConnQuery key = query;
  std::sort(key.factors.begin(), key.factors.end());
  bool same_scale = true;
  for (const auto& f : key.factors) same_scale &= f.scale == key.factors.front().scale;
  if (key.power == 0 && same_scale) {
    const long shift = key.factors.front().translation;
    for (auto& f : key.factors) f.translation -= shift;
  }
  {
    std::shared_lock lock(mutex_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  const double v = compute(key);
  std::unique_lock lock(mutex_);
  memo_.emplace(key, v);
  return v;
}

double ConnectionEngine::compute(const ConnQuery& q) {
  const int n = static_cast<int>(q.factors.size());
  int K0 = std::numeric_limits<int>::min();
  int total = 0;
  for (const auto& f : q.factors) {
    K0 = std::max(K0, f.scale + (f.kind == BasisKind::wavelet ? 1 : 0));
    total += f.deriv;
  }

  // factors in ascending derivative order match the table layout
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](int a, int b) { return q.factors[a].deriv < q.factors[b].deriv; });
  std::vector<IndexedSequence> c;
  std::vector<int> d;
  for (int i : perm) {
    c.push_back(expand(fb_, q.factors[i], K0));
    d.push_back(q.factors[i].deriv);
  }

  const double prefactor = std::pow(2.0, K0 * (0.5 * n + total - 1 - q.power));
  const long W = 2L * order() - 2;
  double sum = 0;

  if (n == 1) {
    const Moments& mom = moment_table();
    for (std::size_t i = 0; i < c[0].values.size(); ++i) {
      const long j = c[0].first + static_cast<long>(i);
      double v;
      if (d[0] == 0)
        v = q.power == 0 ? 1.0 : mom.scaling[1] + static_cast<double>(j);
      else
        v = q.power == 0 ? 0.0 : -1.0;
      sum += c[0].values[i] * v;
    }
    return prefactor * sum;
  }

  const TableShape shape(d, q.power);
  const BaseTable& T = table(shape);
  const BaseTable* T0 = q.power == 1 ? &table(TableShape(d, 0)) : nullptr;

  const auto& c1 = c[0];
  const auto& c2 = c[1];
  for (std::size_t i1 = 0; i1 < c1.values.size(); ++i1) {
    const long j1 = c1.first + static_cast<long>(i1);
    const double w1 = c1.values[i1];
    if (w1 == 0) continue;
    const long lo2 = std::max(c2.first, j1 - W), hi2 = std::min(c2.last() - 1, j1 + W);
    for (long j2 = lo2; j2 <= hi2; ++j2) {
      const double w12 = w1 * c2.at(j2);
      if (w12 == 0) continue;
      if (n == 2) {
        const long t = j2 - j1;
        double v = T.at(t);
        if (T0) v += static_cast<double>(j1) * T0->at(t);
        sum += w12 * v;
        continue;
      }
      const auto& c3 = c[2];
      const long lo3 = std::max({c3.first, j1 - W, j2 - W});
      const long hi3 = std::min({c3.last() - 1, j1 + W, j2 + W});
      for (long j3 = lo3; j3 <= hi3; ++j3) {
        const double w = w12 * c3.at(j3);
        if (w == 0) continue;
        double v = T.at(j2 - j1, j3 - j1);
        if (T0) v += static_cast<double>(j1) * T0->at(j2 - j1, j3 - j1);
        sum += w * v;
      }
    }
  }
  return prefactor * sum;
}

double general_connection(ConnectionEngine& engine, const ConnQuery& q) {
  return engine.evaluate(q);
}

}  // namespace wft
