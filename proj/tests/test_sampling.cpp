#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "rls/rng.hpp"
#include "rls/weighted_index.hpp"

using rls::RngStream;
using rls::WeightedIndex;

// chi-square critical values at significance 1e-3
constexpr double kChi2Df1 = 10.828;
constexpr double kChi2Df3 = 16.266;

TEST_CASE("streams replay bit-identically and do not collide") {
  RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  for (int i = 0; i < 1000; ++i) {
    auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());  // astronomically unlikely to ever collide
    CHECK(x != d.next_u64());
  }
  CHECK(a.seed() == 42);
  CHECK(a.stream_id() == 7);
}

TEST_CASE("uniform_below stays in range and rejects zero") {
  RngStream rng(1, 0);
  CHECK_THROWS_AS(rng.uniform_below(0), std::invalid_argument);
  for (int i = 0; i < 10000; ++i) CHECK(rng.uniform_below(13) < 13);
  // bound 1 must always give 0
  for (int i = 0; i < 100; ++i) CHECK(rng.uniform_below(1) == 0);
}

TEST_CASE("next_double lies in [0, 1)") {
  RngStream rng(5, 0);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform bin frequencies pass chi-square, n = 4") {
  RngStream rng(99, 0);
  constexpr std::uint64_t N = 1'000'000;
  std::array<std::uint64_t, 4> cnt{};
  for (std::uint64_t i = 0; i < N; ++i) ++cnt[rls::sample_uniform_bin(4, rng)];
  double chi2 = 0.0, expect = N / 4.0;
  for (auto c : cnt) chi2 += (c - expect) * (c - expect) / expect;
  CHECK(chi2 < kChi2Df3);
}

TEST_CASE("weighted frequencies pass chi-square, weights {1, 0, 3}") {
  std::vector<std::int64_t> w{1, 0, 3};
  WeightedIndex idx(w);
  CHECK(idx.total() == 4);
  RngStream rng(7, 3);
  constexpr std::uint64_t N = 1'000'000;
  std::array<std::uint64_t, 3> cnt{};
  for (std::uint64_t i = 0; i < N; ++i) ++cnt[idx.sample(rng)];
  CHECK(cnt[1] == 0);  // zero-weight bucket must never fire
  // two live cells -> df = 1
  double chi2 = 0.0;
  const double e0 = N * 0.25, e2 = N * 0.75;
  chi2 += (cnt[0] - e0) * (cnt[0] - e0) / e0;
  chi2 += (cnt[2] - e2) * (cnt[2] - e2) / e2;
  CHECK(chi2 < kChi2Df1);
}

TEST_CASE("weights update dynamically, {3,1} then {1,3}") {
  std::vector<std::int64_t> w{3, 1};
  WeightedIndex idx(w);
  idx.update(0, -2);
  idx.update(1, +2);
  CHECK(idx.weight(0) == 1);
  CHECK(idx.weight(1) == 3);
  CHECK(idx.total() == 4);
  RngStream rng(11, 0);
  constexpr std::uint64_t N = 1'000'000;
  std::uint64_t c1 = 0;
  for (std::uint64_t i = 0; i < N; ++i) c1 += idx.sample(rng) == 1;
  const double e1 = N * 0.75, e0 = N * 0.25;
  double chi2 = (c1 - e1) * (c1 - e1) / e1 +
                ((N - c1) - e0) * ((N - c1) - e0) / e0;
  CHECK(chi2 < kChi2Df1);
}

TEST_CASE("locate walks the prefix sums exactly") {
  std::vector<std::int64_t> w{2, 0, 3, 1};
  WeightedIndex idx(w);
  CHECK(idx.locate(0) == 0);
  CHECK(idx.locate(1) == 0);
  CHECK(idx.locate(2) == 2);
  CHECK(idx.locate(4) == 2);
  CHECK(idx.locate(5) == 3);
  CHECK_THROWS_AS(idx.locate(6), std::out_of_range);
  CHECK_THROWS_AS(idx.locate(-1), std::out_of_range);
}

TEST_CASE("weighted sampler error paths") {
  CHECK_THROWS_AS(WeightedIndex(std::vector<std::int64_t>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(WeightedIndex(std::vector<std::int64_t>{1, -2}),
                  std::invalid_argument);
  std::vector<std::int64_t> w{1, 1};
  WeightedIndex idx(w);
  CHECK_THROWS_AS(idx.update(5, 1), std::out_of_range);
  CHECK_THROWS_AS(idx.update(0, -2), std::invalid_argument);
  idx.set(0, 0);
  idx.set(1, 0);
  RngStream rng(1, 1);
  CHECK_THROWS_AS(idx.sample(rng), std::runtime_error);
}

TEST_CASE("exponential draws have the right mean and median") {
  RngStream rng(123, 0);
  CHECK_THROWS_AS(rng.exponential(0.0), std::invalid_argument);
  constexpr std::uint64_t N = 200'000;
  const double rate = 4.0;
  double sum = 0.0;
  std::uint64_t above_median = 0;
  for (std::uint64_t i = 0; i < N; ++i) {
    double x = rng.exponential(rate);
    CHECK(x >= 0.0);
    sum += x;
    above_median += x > std::log(2.0) / rate;
  }
  const double mean = sum / N;
  // sd of the sample mean: (1/rate)/sqrt(N)
  CHECK(std::abs(mean - 1.0 / rate) < 3.0 * (1.0 / rate) / std::sqrt(double(N)));
  // P(X > ln2 / rate) = 1/2
  const double f = double(above_median) / N;
  CHECK(std::abs(f - 0.5) < 3.0 * 0.5 / std::sqrt(double(N)));
}

TEST_CASE("mix64 is a bijective-looking scrambler on simple inputs") {
  CHECK(RngStream::mix64(0) == 0);  // the splitmix finalizer fixes 0
  CHECK(RngStream::mix64(1) != 1);
  CHECK(RngStream::mix64(1) != RngStream::mix64(2));
}
