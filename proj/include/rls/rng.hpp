#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace rls {

/// Counter-based splittable generator. The draw sequence is a pure function
/// of (seed, stream_id, counter), so streams can be handed to worker threads
/// and replayed bit-identically on any platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id) {
    key_ = mix64(mix64(seed + 0x9E3779B97F4A7C15ull) ^
                 mix64(stream_id + 0xD1B54A32D192ED03ull));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() {
    std::uint64_t x = key_ + (++ctr_) * 0x9E3779B97F4A7C15ull;
    return mix64(x);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Unbiased uniform integer in [0, bound). Lemire's method with rejection.
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below: bound must be > 0");
    std::uint64_t x = next_u64();
    __uint128_t p = static_cast<__uint128_t>(x) * bound;
    std::uint64_t lo = static_cast<std::uint64_t>(p);
    if (lo < bound) {
      std::uint64_t threshold = (0ull - bound) % bound;
      while (lo < threshold) {
        x = next_u64();
        p = static_cast<__uint128_t>(x) * bound;
        lo = static_cast<std::uint64_t>(p);
      }
    }
    return static_cast<std::uint64_t>(p >> 64);
  }

  /// Exponential draw via inverse CDF; deterministic given the stream state.
  double exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
    return -std::log1p(-next_double()) / rate;
  }

  bool bernoulli(double p) { return next_double() < p; }

  /// Stable 64-bit mixer, usable for deriving sub-seeds.
  static std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_ = 0;
  std::uint64_t ctr_ = 0;
};

}  // namespace rls
