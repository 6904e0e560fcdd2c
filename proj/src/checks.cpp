#include "rls/checks.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rls/bounds.hpp"

namespace rls {

namespace {

bool tail_violates(double freq, double bound, std::uint64_t samples) {
  double se = std::sqrt(freq * (1.0 - freq) / static_cast<double>(samples));
  return freq > bound + 3.0 * se;
}

}  // namespace

TailCheckResult check_chernoff_tail(std::uint64_t sets, std::uint64_t samples,
                                    std::uint64_t seed) {
  TailCheckResult res;
  res.name = "chernoff";
  res.sets = sets;
  res.worst_excess = -1.0;
  for (std::uint64_t s = 0; s < sets; ++s) {
    RngStream rng(seed, s);
    const auto n = 5 + rng.uniform_below(36);  // 5..40 Bernoulli trials
    const double p = 0.05 + 0.45 * rng.next_double();
    const double eps = 0.1 + 1.4 * rng.next_double();
    const double np = static_cast<double>(n) * p;
    const double bound = chernoff_tail(np, eps);
    const auto thr = static_cast<std::uint64_t>(
        p * 18446744073709551616.0 /* 2^64 */);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
      std::uint64_t k = 0;
      for (std::uint64_t j = 0; j < n; ++j) k += rng.next_u64() < thr;
      double dev = std::abs(static_cast<double>(k) - np);
      hits += dev > eps * np;
    }
    const double freq = static_cast<double>(hits) / static_cast<double>(samples);
    res.worst_excess = std::max(res.worst_excess, freq - bound);
    if (tail_violates(freq, bound, samples)) ++res.violations;
  }
  return res;
}

TailCheckResult check_exp_sum_tail(std::uint64_t sets, std::uint64_t samples,
                                   std::uint64_t seed) {
  TailCheckResult res;
  res.name = "exp_sum";
  res.sets = sets;
  res.worst_excess = -1.0;
  for (std::uint64_t s = 0; s < sets; ++s) {
    RngStream rng(seed, s);
    const auto k = 2 + rng.uniform_below(5);  // 2..6 summands
    const double lambda_min = 0.5 + 1.5 * rng.next_double();
    std::vector<double> rates(k);
    double mean = 0.0, variance = 0.0;
    for (auto& r : rates) {
      r = lambda_min * (1.0 + 2.0 * rng.next_double());
      mean += 1.0 / r;
      variance += 1.0 / (r * r);
    }
    const double delta = mean * (0.5 + rng.next_double());
    const double bound = exp_sum_tail(lambda_min, variance, delta);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
      double x = 0.0;
      for (auto r : rates) x += rng.exponential(r);
      hits += x >= mean + delta;
    }
    const double freq = static_cast<double>(hits) / static_cast<double>(samples);
    res.worst_excess = std::max(res.worst_excess, freq - bound);
    if (tail_violates(freq, bound, samples)) ++res.violations;
  }
  return res;
}

TailCheckResult check_geom_sum_tail(std::uint64_t sets, std::uint64_t samples,
                                    std::uint64_t seed) {
  TailCheckResult res;
  res.name = "geom_sum";
  res.sets = sets;
  res.worst_excess = -1.0;
  for (std::uint64_t s = 0; s < sets; ++s) {
    RngStream rng(seed, s);
    const auto k = 2 + rng.uniform_below(5);  // 2..6 summands
    const double p = 0.2 + 0.6 * rng.next_double();
    std::vector<double> coeff(k);
    double sum_c = 0.0;
    for (auto& c : coeff) {
      c = 0.2 + 2.8 * rng.next_double();
      sum_c += c;
    }
    const double t = (sum_c / p) * (1.0 + 1.5 * rng.next_double());
    const double bound = geom_sum_tail(p, coeff, t);
    const double inv_log_q = 1.0 / std::log1p(-p);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
      double x = 0.0;
      for (auto c : coeff) {
        // Geometric on {1, 2, ...} by inversion
        double y = std::ceil(std::log1p(-rng.next_double()) * inv_log_q);
        x += c * std::max(y, 1.0);
      }
      hits += x >= t;
    }
    const double freq = static_cast<double>(hits) / static_cast<double>(samples);
    res.worst_excess = std::max(res.worst_excess, freq - bound);
    if (tail_violates(freq, bound, samples)) ++res.violations;
  }
  return res;
}

ScheduleCheckResult check_phase_schedule(std::uint64_t sets, std::uint64_t seed) {
  ScheduleCheckResult res;
  res.sets = sets;
  for (std::uint64_t s = 0; s < sets; ++s) {
    RngStream rng(seed, s);
    const auto n = static_cast<std::int64_t>(4 + rng.uniform_below(100000));
    const double ln_n = std::log(static_cast<double>(n));
    // in-regime: avg > 16 ln n
    const double avg = 16.0 * ln_n * (1.05 + 100.0 * rng.next_double());
    PhaseSchedule ps;
    try {
      ps = phase1_schedule(n, avg);
    } catch (const std::exception&) {
      ++res.violations;
      continue;
    }
    double sum_c = 0.0, sum_c2 = 0.0;
    for (double c : ps.c) {
      sum_c += c;
      sum_c2 += c * c;
    }
    bool ok = ps.x.back() <= 8.0 * ln_n && sum_c <= 32.0 * ln_n &&
              sum_c2 <= 256.0 * ln_n * ln_n;
    // x_k <= 4 ln(n) x_0^(1/2^k)
    double expo = 1.0;
    for (std::size_t i = 0; i < ps.x.size() && ok; ++i) {
      ok = ps.x[i] <= 4.0 * ln_n * std::pow(ps.x[0], expo) * (1.0 + 1e-12);
      expo /= 2.0;
    }
    if (!ok) ++res.violations;
  }
  return res;
}

}  // namespace rls
