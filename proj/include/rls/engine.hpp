#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "rls/core.hpp"
#include "rls/rng.hpp"
#include "rls/weighted_index.hpp"

namespace rls {

enum class ProtocolVariant {
  non_strict,  // move iff load(src) >= load(dst) + 1 (neutral moves allowed)
  strict       // move iff load(src) >= load(dst) + 2
};

enum class Mode { anonymous, labeled };

struct Event {
  std::size_t src = 0;
  std::size_t dst = 0;
  bool moved = false;
  double holding_time = 0.0;
};

struct Caps {
  std::uint64_t max_events = 1'000'000'000ull;
  double max_clock = std::numeric_limits<double>::infinity();
};

/// First-hitting clock times of the balance thresholds tracked during a run.
/// A marker is unset only if the run was truncated before reaching it.
struct PhaseReport {
  std::optional<double> t_disc_96ln;      // disc <= 96 ln n
  std::optional<double> t_disc_half_avg;  // disc <= (m/n)/2
  std::optional<double> t_disc_8ln;       // disc <= 8 ln n
  std::optional<double> t_overloaded_n;   // overloaded balls <= n
  std::optional<double> t_disc_le1;       // disc <= 1
  std::optional<double> t_perfect;        // disc < 1
  std::uint64_t events = 0;
  double clock = 0.0;
  bool truncated = false;
  Configuration final_config;
};

/// Pure rule evaluation; no mutation. A ball in src migrates to dst?
bool attempt_move(const Configuration& c, std::size_t src, std::size_t dst,
                  ProtocolVariant variant);

/// The RLS jump chain: activations arrive at rate m (holding times Exp(m)),
/// the activated ball sits in bin i with probability load_i/m, the destination
/// is uniform over the n bins. Failed attempts still consume an activation and
/// advance the clock.
class Simulator {
 public:
  Simulator(Configuration initial, ProtocolVariant variant, RngStream rng,
            Mode mode = Mode::anonymous);

  Event step();

  /// Moves one ball src -> dst without consuming randomness or clock time;
  /// adversary hook. Anonymous mode only.
  void apply_external_move(std::size_t src, std::size_t dst);

  const Configuration& config() const { return config_; }
  double clock() const { return clock_; }
  std::uint64_t events() const { return events_; }
  ProtocolVariant variant() const { return variant_; }
  Mode mode() const { return mode_; }
  const std::vector<std::uint32_t>& ball_positions() const;

  std::int64_t current_disc_scaled() const;
  std::int64_t current_overloaded_scaled() const { return over_scaled_; }
  std::int64_t current_min_load() const { return min_load_; }
  std::int64_t current_max_load() const { return max_load_; }

  PhaseReport run_until(const std::function<bool(const Configuration&)>& stop,
                        Caps caps = {});
  PhaseReport run_with_markers(Caps caps = {});

  /// Records thresholds newly satisfied by the current state into `r`.
  void record_markers(PhaseReport& r) const;

 private:
  void move_ball(std::size_t src, std::size_t dst);
  PhaseReport run_impl(const std::function<bool(const Configuration&)>* stop,
                       Caps caps);

  Configuration config_;
  ProtocolVariant variant_;
  Mode mode_;
  RngStream rng_;
  std::int64_t n_, m_;
  double clock_ = 0.0;
  std::uint64_t events_ = 0;

  WeightedIndex index_;                   // weight = current load (anonymous)
  std::vector<std::uint32_t> positions_;  // ball -> bin (labeled)

  // incremental balance metrics
  std::vector<std::int64_t> load_count_;  // histogram over load values
  std::int64_t min_load_ = 0, max_load_ = 0;
  std::int64_t over_scaled_ = 0;

  // marker thresholds, precomputed in scaled units
  double th_96ln_, th_8ln_;
};

}  // namespace rls
