#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rls/core.hpp"
#include "rls/engine.hpp"

namespace rls {

/// Non-increasing load vector of length n summing to m (a partition of m into
/// at most n parts, zero-padded). Bins and balls are anonymous, so the jump
/// chain quotiented by permutations lives on these.
using SortedState = std::vector<std::int64_t>;

SortedState canonical_state(const Configuration& c);

/// All partitions of m into at most n parts, zero-padded to length n,
/// lexicographically decreasing. Throws if the count exceeds `limit`.
std::vector<SortedState> enumerate_states(std::int64_t n, std::int64_t m,
                                          std::size_t limit = 100000);

/// Independent brute-force partition counter (no enumeration involved).
std::uint64_t partition_count(std::int64_t m, std::int64_t max_parts);

struct TransitionLaw {
  std::map<SortedState, double> probs;  // over distinct successor vectors
  double exit_rate = 0.0;               // total rate of vector-changing moves
};

/// Jump-chain law restricted to vector-changing moves. A ball hop from a
/// load-a bin to a specific load-b bin with a >= b + 2 occurs at rate
/// count_a * a * count_b / n; neutral hops (a = b + 1) leave the sorted
/// vector unchanged and are dropped. Both protocol variants admit exactly the
/// same vector-changing moves.
TransitionLaw transition_distribution(const SortedState& s, std::int64_t n,
                                      ProtocolVariant variant);

struct ExactChain {
  std::int64_t n = 0, m = 0;
  std::vector<SortedState> states;
  std::map<SortedState, std::size_t> index;
  std::vector<double> exit_rate;
  std::vector<std::vector<std::pair<std::size_t, double>>> transitions;
  std::vector<bool> absorbing;           // disc < 1
  std::vector<double> expected_time;     // expected absorption time per state
};

ExactChain build_chain(std::int64_t n, std::int64_t m,
                       ProtocolVariant variant = ProtocolVariant::non_strict,
                       std::size_t state_limit = 100000);

/// Solves E[s] = 1/exit(s) + sum P(s->s') E[s'] by Gaussian elimination with
/// partial pivoting; throws if the system is singular (absorption unreachable).
void solve_absorption_times(ExactChain& chain);

double expected_absorption_time(const ExactChain& chain, const SortedState& s);

struct ValidationRow {
  SortedState state;
  double exact = 0.0;
  double empirical_mean = 0.0;
  double standard_error = 0.0;
  double z = 0.0;
  std::uint64_t runs = 0;
};

/// Monte Carlo means of the balancing time from every initial state, compared
/// against the exact absorption times. |z| <= 3 expected throughout.
std::vector<ValidationRow> validate_simulator(std::int64_t n, std::int64_t m,
                                              std::uint64_t runs,
                                              std::uint64_t seed,
                                              ProtocolVariant variant =
                                                  ProtocolVariant::non_strict);

/// CSV table `state,exit_rate,expected_time`; states as `a:b:c`.
void export_chain_csv(const ExactChain& chain, const std::string& path);

std::string state_to_string(const SortedState& s);

}  // namespace rls
