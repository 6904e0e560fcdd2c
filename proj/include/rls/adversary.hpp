#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rls/core.hpp"
#include "rls/engine.hpp"
#include "rls/rng.hpp"

namespace rls {

struct Move {
  std::size_t src = 0;
  std::size_t dst = 0;
};

/// A move src -> dst is destructive iff load(src) <= load(dst) + 1, i.e. iff
/// it is the reversal of a valid protocol move. Moves between equal-loaded
/// bins and "uphill" moves are destructive; a move with load(src) =
/// load(dst) + 1 is both a valid protocol move and destructive (neutral).
bool is_destructive(const Configuration& c, Move mv);

/// Applies a destructive move; rejects anything else. Never decreases the
/// discrepancy of the configuration.
Configuration apply_destructive(const Configuration& c, Move mv);

/// Deterministic rule mapping (event index, configuration, last protocol
/// event) to destructive moves applied after that event. Causal only: the
/// rule sees the past, never future protocol randomness.
class AdversarySchedule {
 public:
  virtual ~AdversarySchedule() = default;
  virtual std::vector<Move> moves(std::uint64_t event_index,
                                  const Configuration& c, const Event& last) = 0;
};

class NoneSchedule final : public AdversarySchedule {
 public:
  std::vector<Move> moves(std::uint64_t, const Configuration&,
                          const Event&) override {
    return {};
  }
};

/// Reverts every successful protocol move immediately.
class RevertLastSuccess final : public AdversarySchedule {
 public:
  std::vector<Move> moves(std::uint64_t, const Configuration&,
                          const Event& last) override;
};

/// Every `period` events, moves one ball from a least-loaded nonempty bin to
/// a most-loaded bin.
class PileUp final : public AdversarySchedule {
 public:
  explicit PileUp(std::uint64_t period);
  std::vector<Move> moves(std::uint64_t event_index, const Configuration& c,
                          const Event&) override;

 private:
  std::uint64_t period_;
};

struct ScriptedMove {
  std::uint64_t event_index = 0;
  Move mv;
};

class Scripted final : public AdversarySchedule {
 public:
  explicit Scripted(std::vector<ScriptedMove> script);
  std::vector<Move> moves(std::uint64_t event_index, const Configuration& c,
                          const Event&) override;

 private:
  std::vector<ScriptedMove> script_;
};

/// Emits one uniformly random destructive move every `period` events.
class RandomDestructive final : public AdversarySchedule {
 public:
  RandomDestructive(std::uint64_t period, RngStream rng);
  std::vector<Move> moves(std::uint64_t event_index, const Configuration& c,
                          const Event&) override;

 private:
  std::uint64_t period_;
  RngStream rng_;
};

/// One move per line: `event_index src dst`. Lines starting with '#' skipped.
std::vector<ScriptedMove> load_schedule_file(const std::string& path);

/// "none" | "revert" | "pileup:PERIOD" | "random:PERIOD" | "scripted:PATH"
std::unique_ptr<AdversarySchedule> make_schedule(const std::string& spec,
                                                 std::uint64_t seed);

/// Protocol step, then schedule moves, until stop or caps. Every emitted move
/// is verified destructive in the configuration where it is applied; a
/// non-destructive move aborts the run.
PhaseReport adversarial_run(Configuration initial, AdversarySchedule& schedule,
                            ProtocolVariant variant, RngStream rng,
                            const std::function<bool(const Configuration&)>& stop,
                            Caps caps = {});

/// Thrown when a coupled step leaves a pair of chained processes more than
/// one destructive move apart. Indicates a bug, not a runtime condition.
class CouplingViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The shared-randomness coupling behind the destructive-move dominance
/// argument. members_[k+1] stays "close" to members_[k] after every step:
/// equal, or exactly one destructive move apart. All members are kept sorted
/// non-increasingly; the differing ball of each link is re-canonicalized
/// every step (source index = max index of its load value, destination index
/// = min index of its load value).
class CouplingChain {
 public:
  explicit CouplingChain(const Configuration& initial);
  /// Chain from explicit members; each consecutive pair must be close.
  explicit CouplingChain(std::vector<Configuration> members);

  std::size_t size() const { return members_.size(); }
  std::int64_t bins() const { return n_; }
  std::int64_t balls() const { return m_; }
  const std::vector<std::int64_t>& member(std::size_t k) const {
    return members_.at(k);
  }
  const std::vector<std::int64_t>& front() const { return members_.front(); }
  const std::vector<std::int64_t>& back() const { return members_.back(); }
  std::int64_t front_disc_scaled() const;
  std::int64_t back_disc_scaled() const;
  double clock() const { return clock_; }
  std::uint64_t events() const { return events_; }

  /// Appends one more process: back() plus the given destructive move
  /// (indices into the sorted back() vector). A neutral move leaves the
  /// sorted vector unchanged and appends nothing.
  void add_destructive(Move mv);

  /// One coupled activation: shared ball slot, destination rank, and holding
  /// time across all members. Verifies closeness of every link afterwards.
  Event step(RngStream& rng);

  /// Deterministic variant for exhaustive tests: slot in [0, m), dest rank in
  /// [0, n). Returns the event as seen by the front (plain) process.
  Event step_with(std::uint64_t slot, std::size_t dest_rank);

  /// The last step as seen by the back (most adversarial) process.
  Event last_back_event() const { return last_back_event_; }

 private:
  void canonicalize_and_verify();

  std::int64_t n_ = 0, m_ = 0;
  double clock_ = 0.0;
  std::uint64_t events_ = 0;
  Event last_back_event_;
  std::vector<std::vector<std::int64_t>> members_;  // sorted non-increasing
  // rels_[k]: members_[k+1] == members_[k] with one ball moved i_R -> i_L
  struct LinkRel {
    std::size_t i_R = 0, i_L = 0;
  };
  std::vector<LinkRel> rels_;
};

/// Two coupled processes one destructive move apart (or equal): the plain
/// process on the left, the perturbed one on the right.
class CoupledPair {
 public:
  CoupledPair(const Configuration& left, const Configuration& right);

  Configuration left() const;
  Configuration right() const;
  bool identical() const { return chain_.size() == 1; }
  CouplingChain& chain() { return chain_; }

 private:
  CouplingChain chain_;
};

Event coupled_step(CoupledPair& pair, RngStream& rng);

struct DominanceReport {
  std::uint64_t runs = 0;
  std::uint64_t events_checked = 0;
  std::uint64_t disc_violations = 0;   // events with disc(plain) > disc(adv)
  std::uint64_t moves_applied = 0;     // adversarial moves injected
  std::size_t max_chain_size = 0;
};

/// Runs N coupled (plain, adversarial) chains for `horizon_events` events
/// each and checks disc(plain) <= disc(adversarial) pointwise at every event.
DominanceReport dominance_experiment(const Configuration& initial,
                                     AdversarySchedule& schedule,
                                     std::uint64_t horizon_events,
                                     std::uint64_t runs, std::uint64_t seed);

}  // namespace rls
