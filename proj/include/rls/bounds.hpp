#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rls {

/// Pr[|Bin(n,p) - np| > eps*np] < 2 exp(-eps^2 np / 3), for eps in [0, 3/2].
double chernoff_tail(double np, double eps);

/// Pr[Bin(n,p) >= R] <= 2^-R, valid for R >= 6np (caller's precondition).
double binomial_tail_large(double R);

/// Sum of independent exponentials, each with rate >= lambda_min:
/// Pr[X >= E[X] + delta] <= exp(lambda^2 Var/4 - lambda delta/2).
double exp_sum_tail(double lambda_min, double variance, double delta);

/// Weighted sum of independent Geometric(p) variables:
/// Pr[sum c_i Y_i >= t] <= exp(V/(4M^2) + (S + S*L - t*L)/(2M)),
/// with L = -ln(1-p), M = max c_i, S = sum c_i, V = sum c_i^2.
double geom_sum_tail(double p, std::span<const double> coefficients, double t);

/// Expected-time epoch bound lifted to a w.h.p. bound: 2 t log2(n).
double epoch_whp_time(double t, std::int64_t n);

/// W.h.p. epoch bound lifted back to expectation: t / p.
double epoch_expected_time(double t, double p);

/// The halving schedule that contracts the discrepancy from avg/2 down to
/// 8 ln n: x_0 = avg/2, x_k = sqrt(4 x_{k-1} ln n), r = ceil(log2 log2 avg)
/// rounds, with per-round time coefficients c_i = 16 ln(n) x_0^(1/2^i) / avg.
struct PhaseSchedule {
  std::int64_t n = 0;
  double avg = 0.0;
  std::vector<double> x;  // x_0 .. x_r
  std::vector<double> c;  // c_0 .. c_{r-1}
  double predicted_total = 0.0;  // sum c_i
};

/// Valid in the regime avg > 16 ln n; asserts x_r <= 8 ln n on construction.
PhaseSchedule phase1_schedule(std::int64_t n, double avg);

struct LowerBoundTimes {
  double activation_bound = 0.0;    // H_m - H_floor(avg): activations needed
  double perturbation_bound = 0.0;  // n / (avg + 1): one-over one-under start
};

LowerBoundTimes lower_bound_times(std::int64_t n, std::int64_t m);

/// Harmonic number by direct summation.
double harmonic(std::int64_t k);

}  // namespace rls
