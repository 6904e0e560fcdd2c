#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace rls {

/// A load vector over n bins holding m balls in total.
///
/// The average load m/n is kept as an exact rational (m, n); all balance
/// predicates below compare scaled integers, so thresholds like
/// "discrepancy < 1" are never subject to floating round-off.
struct Configuration {
  std::vector<std::int64_t> loads;

  Configuration() = default;
  explicit Configuration(std::vector<std::int64_t> l) : loads(std::move(l)) {
    if (loads.empty()) throw std::invalid_argument("Configuration: need n >= 1 bins");
    for (auto v : loads)
      if (v < 0) throw std::invalid_argument("Configuration: negative load");
  }

  std::int64_t n() const { return static_cast<std::int64_t>(loads.size()); }
  std::int64_t m() const {
    std::int64_t s = 0;
    for (auto v : loads) s += v;
    return s;
  }

  bool operator==(const Configuration& o) const { return loads == o.loads; }
};

struct BinClasses {
  std::int64_t h = 0;  // bins with load > m/n
  std::int64_t r = 0;  // bins with load = m/n
  std::int64_t k = 0;  // bins with load < m/n
};

struct BalanceMetrics {
  double discrepancy = 0.0;
  std::int64_t min_load = 0;
  std::int64_t max_load = 0;
  double overloaded_balls = 0.0;  // integer whenever n | m
  std::int64_t h = 0, r = 0, k = 0;
  std::optional<std::int64_t> potential;  // 3A - k - h, defined when n | m
};

inline double average_load(const Configuration& c) {
  return static_cast<double>(c.m()) / static_cast<double>(c.n());
}

/// max_i |n*load_i - m|, i.e. discrepancy scaled by n. Exact.
inline std::int64_t disc_scaled(const Configuration& c) {
  const std::int64_t n = c.n(), m = c.m();
  std::int64_t best = 0;
  for (auto v : c.loads) {
    std::int64_t d = v * n - m;
    if (d < 0) d = -d;
    if (d > best) best = d;
  }
  return best;
}

inline double discrepancy(const Configuration& c) {
  return static_cast<double>(disc_scaled(c)) / static_cast<double>(c.n());
}

/// sum_i max{0, n*load_i - m}, i.e. the number of overloaded balls scaled by n.
inline std::int64_t overloaded_scaled(const Configuration& c) {
  const std::int64_t n = c.n(), m = c.m();
  std::int64_t s = 0;
  for (auto v : c.loads) {
    std::int64_t d = v * n - m;
    if (d > 0) s += d;
  }
  return s;
}

inline double overloaded_balls(const Configuration& c) {
  return static_cast<double>(overloaded_scaled(c)) / static_cast<double>(c.n());
}

/// sum_i max{0, m - n*load_i} scaled by n ("holes"); equals overloaded_scaled
/// always, since the positive and negative parts of sum(n*load_i - m) cancel.
inline std::int64_t holes_scaled(const Configuration& c) {
  const std::int64_t n = c.n(), m = c.m();
  std::int64_t s = 0;
  for (auto v : c.loads) {
    std::int64_t d = m - v * n;
    if (d > 0) s += d;
  }
  return s;
}

inline BinClasses bin_classes(const Configuration& c) {
  const std::int64_t n = c.n(), m = c.m();
  BinClasses b;
  for (auto v : c.loads) {
    std::int64_t d = v * n - m;
    if (d > 0)
      ++b.h;
    else if (d < 0)
      ++b.k;
    else
      ++b.r;
  }
  return b;
}

/// 3A - k - h with A the number of overloaded balls. Only meaningful when the
/// average load is an integer; rejects other inputs.
inline std::int64_t potential(const Configuration& c) {
  const std::int64_t n = c.n(), m = c.m();
  if (m % n != 0)
    throw std::invalid_argument("potential: average load m/n must be an integer");
  auto bc = bin_classes(c);
  return 3 * (overloaded_scaled(c) / n) - bc.k - bc.h;
}

inline bool is_x_balanced(const Configuration& c, double x) {
  return static_cast<double>(disc_scaled(c)) <= x * static_cast<double>(c.n());
}

inline bool is_perfectly_balanced(const Configuration& c) {
  return disc_scaled(c) < c.n();
}

inline std::int64_t min_load(const Configuration& c) {
  std::int64_t v = c.loads[0];
  for (auto x : c.loads)
    if (x < v) v = x;
  return v;
}

inline std::int64_t max_load(const Configuration& c) {
  std::int64_t v = c.loads[0];
  for (auto x : c.loads)
    if (x > v) v = x;
  return v;
}

inline BalanceMetrics balance_metrics(const Configuration& c) {
  BalanceMetrics bm;
  bm.discrepancy = discrepancy(c);
  bm.min_load = min_load(c);
  bm.max_load = max_load(c);
  bm.overloaded_balls = overloaded_balls(c);
  auto bc = bin_classes(c);
  bm.h = bc.h;
  bm.r = bc.r;
  bm.k = bc.k;
  if (c.m() % c.n() == 0) bm.potential = potential(c);
  return bm;
}

}  // namespace rls
