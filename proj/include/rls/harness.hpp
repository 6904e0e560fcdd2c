#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rls/adversary.hpp"
#include "rls/core.hpp"
#include "rls/engine.hpp"

namespace rls {

/// Declarative description of one experiment cell; fully determines every run
/// byte-for-byte given the master seed.
struct ExperimentSpec {
  std::string scenario = "all_in_one";  // all_in_one | two_bin_perturbation |
                                        // uniform_random | two_choice_placement |
                                        // from_file:PATH
  std::int64_t n = 0;
  std::int64_t m = 0;
  ProtocolVariant variant = ProtocolVariant::non_strict;
  std::string schedule = "none";  // adversary schedule spec
  std::uint64_t runs = 0;
  std::uint64_t seed = 0;
  Caps caps;
  std::string out;  // output path, empty = no file
};

struct RunRecord {
  std::string scenario;
  std::int64_t n = 0, m = 0;
  ProtocolVariant variant = ProtocolVariant::non_strict;
  std::uint64_t stream = 0;
  std::uint64_t events = 0;
  std::optional<double> t_disc_96ln, t_disc_half_avg, t_disc_8ln,
      t_overloaded_n, t_disc_le1, t_perfect;
  bool truncated = false;
};

struct MarkerStats {
  std::uint64_t count = 0;  // records where the marker was hit
  double mean = 0.0, sd = 0.0, se = 0.0;
  double p50 = 0.0, p95 = 0.0, p99 = 0.0;
};

struct Summary {
  std::uint64_t records = 0;
  std::uint64_t truncated = 0;
  MarkerStats t_perfect, t_disc_le1, t_disc_96ln, t_disc_half_avg, t_disc_8ln,
      t_overloaded_n;
  MarkerStats events;
};

/// Initial placement generators. `rng` is consumed only by the randomized
/// scenarios (uniform_random, two_choice_placement).
Configuration make_scenario(const std::string& name, std::int64_t n,
                            std::int64_t m, RngStream* rng);

std::vector<RunRecord> run_batch(const ExperimentSpec& spec);

Summary summarize(const std::vector<RunRecord>& records);

struct FitResult {
  double a = 0.0;  // intercept
  double b = 0.0;  // slope on ln n
  double r2 = 0.0;
};

/// Least squares for mean T = a + b ln n over >= 3 (n, mean) groups.
FitResult scaling_fit(const std::vector<std::pair<std::int64_t, double>>& groups);

void emit_csv(const std::vector<RunRecord>& records, const std::string& path);
void emit_jsonl(const std::vector<RunRecord>& records, const std::string& path);
std::vector<RunRecord> parse_csv(const std::string& path);

/// Flat key=value experiment files (one pair per line, '#' comments).
ExperimentSpec parse_spec_file(const std::string& path);

/// Sub-seed for a sweep cell: adding cells never perturbs existing cells.
std::uint64_t cell_seed(std::uint64_t master_seed, std::int64_t n, std::int64_t m);

std::string variant_name(ProtocolVariant v);
ProtocolVariant variant_from_name(const std::string& s);

/// Worker thread cap: RLSLAB_THREADS if set, else hardware concurrency.
unsigned thread_budget();

}  // namespace rls
