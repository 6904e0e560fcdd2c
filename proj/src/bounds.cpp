#include "rls/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace rls {

double chernoff_tail(double np, double eps) {
  if (np < 0.0) throw std::invalid_argument("chernoff_tail: np must be >= 0");
  if (eps < 0.0 || eps > 1.5)
    throw std::invalid_argument("chernoff_tail: eps must be in [0, 3/2]");
  return 2.0 * std::exp(-eps * eps * np / 3.0);
}

double binomial_tail_large(double R) {
  if (R < 0.0) throw std::invalid_argument("binomial_tail_large: R must be >= 0");
  return std::exp2(-R);
}

double exp_sum_tail(double lambda_min, double variance, double delta) {
  if (!(lambda_min > 0.0))
    throw std::invalid_argument("exp_sum_tail: lambda_min must be > 0");
  if (variance < 0.0)
    throw std::invalid_argument("exp_sum_tail: variance must be >= 0");
  return std::exp(lambda_min * lambda_min * variance / 4.0 -
                  lambda_min * delta / 2.0);
}

double geom_sum_tail(double p, std::span<const double> coefficients, double t) {
  if (!(p > 0.0) || !(p < 1.0))
    throw std::invalid_argument("geom_sum_tail: p must be in (0,1)");
  if (coefficients.empty())
    throw std::invalid_argument("geom_sum_tail: need at least one coefficient");
  double M = 0.0, S = 0.0, V = 0.0;
  for (double c : coefficients) {
    if (!(c > 0.0))
      throw std::invalid_argument("geom_sum_tail: coefficients must be > 0");
    M = std::max(M, c);
    S += c;
    V += c * c;
  }
  const double L = -std::log1p(-p);
  return std::exp(V / (4.0 * M * M) + (S + S * L - t * L) / (2.0 * M));
}

double epoch_whp_time(double t, std::int64_t n) {
  if (t < 0.0) throw std::invalid_argument("epoch_whp_time: t must be >= 0");
  if (n < 1) throw std::invalid_argument("epoch_whp_time: n must be >= 1");
  return 2.0 * t * std::log2(static_cast<double>(n));
}

double epoch_expected_time(double t, double p) {
  if (t < 0.0) throw std::invalid_argument("epoch_expected_time: t must be >= 0");
  if (!(p > 0.0) || p > 1.0)
    throw std::invalid_argument("epoch_expected_time: p must be in (0,1]");
  return t / p;
}

PhaseSchedule phase1_schedule(std::int64_t n, double avg) {
  if (n < 2) throw std::invalid_argument("phase1_schedule: n must be >= 2");
  const double ln_n = std::log(static_cast<double>(n));
  if (!(avg > 16.0 * ln_n))
    throw std::invalid_argument(
        "phase1_schedule: out of regime, need avg > 16 ln n");

  PhaseSchedule ps;
  ps.n = n;
  ps.avg = avg;
  const auto r = static_cast<std::size_t>(
      std::ceil(std::log2(std::log2(avg))));
  double x = avg / 2.0;
  ps.x.push_back(x);
  for (std::size_t k = 1; k <= r; ++k) {
    x = std::sqrt(4.0 * x * ln_n);
    ps.x.push_back(x);
  }
  if (ps.x.back() > 8.0 * ln_n)
    throw std::logic_error("phase1_schedule: x_r > 8 ln n");
  double expo = 1.0;
  for (std::size_t i = 0; i < r; ++i) {
    ps.c.push_back(16.0 * ln_n * std::pow(avg / 2.0, expo) / avg);
    expo /= 2.0;
  }
  for (double c : ps.c) ps.predicted_total += c;
  return ps;
}

double harmonic(std::int64_t k) {
  double h = 0.0;
  for (std::int64_t i = 1; i <= k; ++i) h += 1.0 / static_cast<double>(i);
  return h;
}

LowerBoundTimes lower_bound_times(std::int64_t n, std::int64_t m) {
  if (n < 1 || m < 1)
    throw std::invalid_argument("lower_bound_times: need n >= 1, m >= 1");
  LowerBoundTimes lb;
  const double avg = static_cast<double>(m) / static_cast<double>(n);
  lb.activation_bound = harmonic(m) - harmonic(m / n);
  lb.perturbation_bound = static_cast<double>(n) / (avg + 1.0);
  return lb;
}

}  // namespace rls
