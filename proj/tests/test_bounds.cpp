#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "rls/bounds.hpp"
#include "rls/checks.hpp"

TEST_CASE("Chernoff-style binomial tail") {
  // np = 10, eps = 1: 2 e^{-10/3}
  CHECK(rls::chernoff_tail(10.0, 1.0) ==
        doctest::Approx(2.0 * std::exp(-10.0 / 3.0)));
  CHECK(rls::chernoff_tail(10.0, 1.0) == doctest::Approx(0.0713626).epsilon(1e-4));
  // eps = 0 collapses to the trivial bound 2
  CHECK(rls::chernoff_tail(123.0, 0.0) == 2.0);
  // tighter for larger deviations and larger means
  CHECK(rls::chernoff_tail(10.0, 1.2) < rls::chernoff_tail(10.0, 1.0));
  CHECK(rls::chernoff_tail(20.0, 1.0) < rls::chernoff_tail(10.0, 1.0));
  CHECK_THROWS_AS(rls::chernoff_tail(10.0, 1.6), std::invalid_argument);
  CHECK_THROWS_AS(rls::chernoff_tail(10.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(rls::chernoff_tail(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("large-deviation binomial tail 2^-R") {
  CHECK(rls::binomial_tail_large(6.0) == doctest::Approx(1.0 / 64.0));
  CHECK(rls::binomial_tail_large(0.0) == 1.0);
  CHECK_THROWS_AS(rls::binomial_tail_large(-1.0), std::invalid_argument);
}

TEST_CASE("exponential-sum tail") {
  // lambda = 1, Var = 1, delta = 10: exp(1/4 - 5) = e^{-4.75}
  CHECK(rls::exp_sum_tail(1.0, 1.0, 10.0) == doctest::Approx(std::exp(-4.75)));
  CHECK(rls::exp_sum_tail(1.0, 1.0, 10.0) ==
        doctest::Approx(0.0086517).epsilon(1e-4));
  // exponent-zero boundary: lambda^2 Var / 4 = lambda delta / 2
  CHECK(rls::exp_sum_tail(2.0, 1.0, 1.0) == doctest::Approx(1.0));
  // monotone decreasing in the deviation
  CHECK(rls::exp_sum_tail(1.0, 1.0, 12.0) < rls::exp_sum_tail(1.0, 1.0, 10.0));
  CHECK_THROWS_AS(rls::exp_sum_tail(0.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rls::exp_sum_tail(1.0, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("geometric-sum tail") {
  // p = 1/2, c = {1}, t = 10: exp(1/4 + (1 + ln2 - 10 ln2)/2) = e^{0.75 - 4.5 ln2}
  std::vector<double> c{1.0};
  const double expect = std::exp(0.75 - 4.5 * std::log(2.0));
  CHECK(rls::geom_sum_tail(0.5, c, 10.0) == doctest::Approx(expect));
  CHECK(rls::geom_sum_tail(0.5, c, 10.0) ==
        doctest::Approx(0.0935571).epsilon(1e-4));
  // bound dominates the true tail P(Y >= 10) = 2^-9 for Geometric(1/2) on {1,2,...}
  CHECK(rls::geom_sum_tail(0.5, c, 10.0) > std::pow(0.5, 9.0));
  CHECK(rls::geom_sum_tail(0.5, c, 14.0) < rls::geom_sum_tail(0.5, c, 10.0));
  CHECK_THROWS_AS(rls::geom_sum_tail(0.0, c, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rls::geom_sum_tail(1.0, c, 1.0), std::invalid_argument);
  std::vector<double> bad{1.0, 0.0};
  CHECK_THROWS_AS(rls::geom_sum_tail(0.5, bad, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rls::geom_sum_tail(0.5, std::vector<double>{}, 1.0),
                  std::invalid_argument);
}

TEST_CASE("epoch lifting formulas") {
  CHECK(rls::epoch_whp_time(10.0, 4) == 40.0);
  CHECK(rls::epoch_expected_time(1.0, 0.2) == 5.0);
  CHECK_THROWS_AS(rls::epoch_whp_time(-1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(rls::epoch_expected_time(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("halving recursion: x0 = 128, ln n = 2 gives x1 = 32, x2 = 16") {
  // pure arithmetic of x_{k+1} = sqrt(4 x_k ln n), checked at a fixed point of
  // the doubling: sqrt(4 * 128 * 2) = 32, sqrt(4 * 32 * 2) = 16
  double x = 128.0;
  x = std::sqrt(4.0 * x * 2.0);
  CHECK(x == doctest::Approx(32.0));
  x = std::sqrt(4.0 * x * 2.0);
  CHECK(x == doctest::Approx(16.0));
}

TEST_CASE("phase schedule: shape, recursion, and round count") {
  // avg = 256: r = ceil(log2 log2 256) = 3
  auto ps = rls::phase1_schedule(100, 256.0);
  const double ln_n = std::log(100.0);
  REQUIRE(ps.x.size() == 4);  // x_0 .. x_3
  REQUIRE(ps.c.size() == 3);
  CHECK(ps.x[0] == 128.0);
  for (std::size_t k = 1; k < ps.x.size(); ++k)
    CHECK(ps.x[k] == doctest::Approx(std::sqrt(4.0 * ps.x[k - 1] * ln_n)));
  CHECK(ps.x.back() <= 8.0 * ln_n);
  double expo = 1.0, sum_c = 0.0, sum_c2 = 0.0;
  for (std::size_t i = 0; i < ps.c.size(); ++i) {
    CHECK(ps.c[i] ==
          doctest::Approx(16.0 * ln_n * std::pow(128.0, expo) / 256.0));
    expo /= 2.0;
    sum_c += ps.c[i];
    sum_c2 += ps.c[i] * ps.c[i];
  }
  CHECK(ps.predicted_total == doctest::Approx(sum_c));
  CHECK(sum_c <= 32.0 * ln_n);
  CHECK(sum_c2 <= 256.0 * ln_n * ln_n);
  // out of regime
  CHECK_THROWS_AS(rls::phase1_schedule(100, 16.0 * ln_n), std::invalid_argument);
  CHECK_THROWS_AS(rls::phase1_schedule(1, 100.0), std::invalid_argument);
}

TEST_CASE("schedule invariants hold over many random in-regime draws") {
  auto r = rls::check_phase_schedule(500, 20260823);
  CHECK(r.sets == 500);
  CHECK(r.violations == 0);
}

TEST_CASE("harmonic numbers and lower bounds") {
  CHECK(rls::harmonic(1) == 1.0);
  CHECK(rls::harmonic(10) - rls::harmonic(2) == doctest::Approx(1.4289683));
  auto lb = rls::lower_bound_times(50, 500);
  CHECK(lb.perturbation_bound == doctest::Approx(50.0 / 11.0));
  CHECK(lb.activation_bound ==
        doctest::Approx(rls::harmonic(500) - rls::harmonic(10)));
  CHECK_THROWS_AS(rls::lower_bound_times(0, 5), std::invalid_argument);
}

TEST_CASE("Monte Carlo spot check of each tail bound (small budget)") {
  auto ch = rls::check_chernoff_tail(5, 100000, 11);
  CHECK(ch.violations == 0);
  auto ex = rls::check_exp_sum_tail(5, 100000, 12);
  CHECK(ex.violations == 0);
  auto ge = rls::check_geom_sum_tail(5, 100000, 13);
  CHECK(ge.violations == 0);
}
