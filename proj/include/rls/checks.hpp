#pragma once

#include <cstdint>
#include <string>

#include "rls/rng.hpp"

namespace rls {

/// Result of validating a closed-form tail bound against Monte Carlo tail
/// frequencies over randomized parameter sets. A set counts as a violation
/// when freq > bound + 3 * sqrt(freq (1-freq) / samples).
struct TailCheckResult {
  std::string name;
  std::uint64_t sets = 0;
  std::uint64_t violations = 0;
  double worst_excess = 0.0;  // max of freq - bound over all sets (can be < 0)
};

TailCheckResult check_chernoff_tail(std::uint64_t sets, std::uint64_t samples,
                                    std::uint64_t seed);
TailCheckResult check_exp_sum_tail(std::uint64_t sets, std::uint64_t samples,
                                   std::uint64_t seed);
TailCheckResult check_geom_sum_tail(std::uint64_t sets, std::uint64_t samples,
                                    std::uint64_t seed);

/// Schedule invariants over random in-regime (n, avg) draws: x_r <= 8 ln n,
/// sum c_i <= 32 ln n, sum c_i^2 <= 256 (ln n)^2.
struct ScheduleCheckResult {
  std::uint64_t sets = 0;
  std::uint64_t violations = 0;
};

ScheduleCheckResult check_phase_schedule(std::uint64_t sets, std::uint64_t seed);

}  // namespace rls
