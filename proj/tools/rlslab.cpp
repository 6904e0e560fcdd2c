// rlslab: batch experiments, exact oracle tables, coupling checks, and tail
// bound validation for the randomized local search balls-into-bins process.

#include <cinttypes>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rls/adversary.hpp"
#include "rls/bounds.hpp"
#include "rls/checks.hpp"
#include "rls/harness.hpp"
#include "rls/oracle.hpp"

namespace {

std::vector<std::int64_t> parse_int_list(const std::string& s) {
  std::vector<std::int64_t> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    out.push_back(std::stoll(s.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

// m spec per sweep cell: "n^2", "K*n", a single value, or a list paired with n
std::vector<std::int64_t> resolve_m(const std::string& mspec,
                                    const std::vector<std::int64_t>& ns) {
  std::vector<std::int64_t> ms;
  if (mspec == "n^2") {
    for (auto n : ns) ms.push_back(n * n);
  } else if (mspec == "n") {
    ms = ns;
  } else if (auto star = mspec.find("*n"); star != std::string::npos &&
                                           star + 2 == mspec.size()) {
    auto k = std::stoll(mspec.substr(0, star));
    for (auto n : ns) ms.push_back(k * n);
  } else {
    ms = parse_int_list(mspec);
    if (ms.size() == 1) ms.assign(ns.size(), ms[0]);
    if (ms.size() != ns.size())
      throw CLI::ValidationError("--m list does not match --n list");
  }
  return ms;
}

void print_summary(const rls::Summary& s) {
  std::printf("runs=%" PRIu64 " truncated=%" PRIu64 "\n", s.records, s.truncated);
  auto row = [](const char* name, const rls::MarkerStats& ms) {
    if (ms.count == 0) {
      std::printf("  %-16s (never hit)\n", name);
      return;
    }
    std::printf("  %-16s mean=%.6g sd=%.4g se=%.4g p50=%.6g p95=%.6g p99=%.6g\n",
                name, ms.mean, ms.sd, ms.se, ms.p50, ms.p95, ms.p99);
  };
  row("t_disc96ln", s.t_disc_96ln);
  row("t_disc_half_avg", s.t_disc_half_avg);
  row("t_disc8ln", s.t_disc_8ln);
  row("t_overloaded_n", s.t_overloaded_n);
  row("t_disc_le1", s.t_disc_le1);
  row("t_perfect", s.t_perfect);
  row("events", s.events);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RLS balls-into-bins simulation lab"};
  app.require_subcommand(1);

  // --- run ---------------------------------------------------------------
  auto* run = app.add_subcommand("run", "one experiment cell");
  rls::ExperimentSpec spec;
  std::string variant = "non_strict", spec_file, format = "csv";
  std::uint64_t max_events = rls::Caps{}.max_events;
  run->add_option("--spec", spec_file, "experiment file (key=value lines)");
  run->add_option("--scenario", spec.scenario);
  run->add_option("--n", spec.n);
  run->add_option("--m", spec.m);
  run->add_option("--runs", spec.runs);
  run->add_option("--seed", spec.seed);
  run->add_option("--variant", variant)->check(CLI::IsMember({"non_strict", "strict"}));
  run->add_option("--schedule", spec.schedule);
  run->add_option("--max-events", max_events);
  run->add_option("--out", spec.out);
  run->add_option("--format", format)->check(CLI::IsMember({"csv", "jsonl"}));

  // --- sweep -------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "grid over (n, m) cells");
  std::string sweep_n, sweep_m = "n^2";
  rls::ExperimentSpec sweep_spec;
  std::string sweep_variant = "non_strict";
  sweep->add_option("--n", sweep_n, "comma list of bin counts")->required();
  sweep->add_option("--m", sweep_m, "ball count per cell: n^2, K*n, value, or list");
  sweep->add_option("--scenario", sweep_spec.scenario);
  sweep->add_option("--runs", sweep_spec.runs)->required();
  sweep->add_option("--seed", sweep_spec.seed);
  sweep->add_option("--variant", sweep_variant)
      ->check(CLI::IsMember({"non_strict", "strict"}));
  sweep->add_option("--schedule", sweep_spec.schedule);
  sweep->add_option("--max-events", sweep_spec.caps.max_events);
  std::string sweep_out;
  sweep->add_option("--out", sweep_out);

  // --- oracle ------------------------------------------------------------
  auto* oracle = app.add_subcommand("oracle", "exact absorption times");
  std::int64_t on = 0, om = 0;
  std::string ovariant = "non_strict", oout;
  oracle->add_option("--n", on)->required();
  oracle->add_option("--m", om)->required();
  oracle->add_option("--variant", ovariant)
      ->check(CLI::IsMember({"non_strict", "strict"}));
  oracle->add_option("--out", oout);

  // --- couple ------------------------------------------------------------
  auto* couple = app.add_subcommand("couple", "coupled adversarial dominance runs");
  std::int64_t cn = 0, cm = 0;
  std::string cschedule = "random:50", cscenario = "uniform_random";
  std::uint64_t csteps = 10000, cruns = 10, cseed = 1;
  couple->add_option("--n", cn)->required();
  couple->add_option("--m", cm)->required();
  couple->add_option("--schedule", cschedule);
  couple->add_option("--scenario", cscenario);
  couple->add_option("--steps", csteps);
  couple->add_option("--runs", cruns);
  couple->add_option("--seed", cseed);

  // --- bounds ------------------------------------------------------------
  auto* bounds = app.add_subcommand("bounds", "validate tail bounds by Monte Carlo");
  std::string bcheck = "all";
  double bsamples = 1e6;
  std::uint64_t bsets = 50, bseed = 1, bschedule_sets = 1000;
  bounds->add_option("--check", bcheck)
      ->check(CLI::IsMember({"all", "chernoff", "expsum", "geomsum", "schedule"}));
  bounds->add_option("--samples", bsamples);
  bounds->add_option("--sets", bsets);
  bounds->add_option("--schedule-sets", bschedule_sets);
  bounds->add_option("--seed", bseed);

  // --- validate ----------------------------------------------------------
  auto* validate = app.add_subcommand("validate", "simulator vs exact oracle");
  std::string vn, vm;
  std::uint64_t vruns = 50000, vseed = 1;
  validate->add_option("--n", vn, "comma list, paired with --m")->required();
  validate->add_option("--m", vm)->required();
  validate->add_option("--runs", vruns);
  validate->add_option("--seed", vseed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (!spec_file.empty()) {
        auto base = rls::parse_spec_file(spec_file);
        // CLI flags override file values
        if (run->count("--scenario") == 0) spec.scenario = base.scenario;
        if (run->count("--n") == 0) spec.n = base.n;
        if (run->count("--m") == 0) spec.m = base.m;
        if (run->count("--runs") == 0) spec.runs = base.runs;
        if (run->count("--seed") == 0) spec.seed = base.seed;
        if (run->count("--variant") == 0) variant = rls::variant_name(base.variant);
        if (run->count("--schedule") == 0) spec.schedule = base.schedule;
        if (run->count("--max-events") == 0) max_events = base.caps.max_events;
        if (run->count("--out") == 0) spec.out = base.out;
      }
      spec.variant = rls::variant_from_name(variant);
      spec.caps.max_events = max_events;
      if (format == "jsonl") {
        std::string path = spec.out;
        spec.out.clear();
        auto records = rls::run_batch(spec);
        if (!path.empty()) rls::emit_jsonl(records, path);
        print_summary(rls::summarize(records));
      } else {
        print_summary(rls::summarize(rls::run_batch(spec)));
      }
      return 0;
    }

    if (*sweep) {
      sweep_spec.variant = rls::variant_from_name(sweep_variant);
      auto ns = parse_int_list(sweep_n);
      auto ms = resolve_m(sweep_m, ns);
      std::vector<rls::RunRecord> all;
      std::vector<std::pair<std::int64_t, double>> groups;
      for (std::size_t i = 0; i < ns.size(); ++i) {
        rls::ExperimentSpec cell = sweep_spec;
        cell.n = ns[i];
        cell.m = ms[i];
        cell.seed = rls::cell_seed(sweep_spec.seed, cell.n, cell.m);
        auto records = rls::run_batch(cell);
        auto s = rls::summarize(records);
        std::printf("n=%" PRId64 " m=%" PRId64 " ", cell.n, cell.m);
        print_summary(s);
        if (s.t_perfect.count > 0) groups.emplace_back(cell.n, s.t_perfect.mean);
        all.insert(all.end(), records.begin(), records.end());
      }
      if (groups.size() >= 3) {
        auto f = rls::scaling_fit(groups);
        std::printf("fit: mean T = %.6g + %.6g * ln n (R^2 = %.6f)\n", f.a, f.b,
                    f.r2);
      }
      if (!sweep_out.empty()) rls::emit_csv(all, sweep_out);
      return 0;
    }

    if (*oracle) {
      auto chain = rls::build_chain(on, om, rls::variant_from_name(ovariant));
      if (!oout.empty()) rls::export_chain_csv(chain, oout);
      std::printf("states=%zu\n", chain.states.size());
      for (std::size_t i = 0; i < chain.states.size(); ++i)
        std::printf("%-24s exit_rate=%-12.6g E[T]=%.10g\n",
                    rls::state_to_string(chain.states[i]).c_str(),
                    chain.exit_rate[i], chain.expected_time[i]);
      return 0;
    }

    if (*couple) {
      rls::RngStream scen_rng(cseed, 0xC0FFEEull);
      auto initial = rls::make_scenario(cscenario, cn, cm, &scen_rng);
      auto schedule = rls::make_schedule(cschedule, cseed ^ 0xADull);
      auto rep = rls::dominance_experiment(initial, *schedule, csteps, cruns, cseed);
      std::printf("runs=%" PRIu64 " events=%" PRIu64 " adversarial_moves=%" PRIu64
                  " max_chain=%zu disc_violations=%" PRIu64 "\n",
                  rep.runs, rep.events_checked, rep.moves_applied,
                  rep.max_chain_size, rep.disc_violations);
      return rep.disc_violations == 0 ? 0 : 1;
    }

    if (*bounds) {
      const auto samples = static_cast<std::uint64_t>(bsamples);
      bool ok = true;
      auto report = [&](const rls::TailCheckResult& r) {
        std::printf("%-10s sets=%" PRIu64 " violations=%" PRIu64
                    " worst_excess=%.3g\n",
                    r.name.c_str(), r.sets, r.violations, r.worst_excess);
        ok = ok && r.violations == 0;
      };
      if (bcheck == "all" || bcheck == "chernoff")
        report(rls::check_chernoff_tail(bsets, samples, bseed));
      if (bcheck == "all" || bcheck == "expsum")
        report(rls::check_exp_sum_tail(bsets, samples, bseed));
      if (bcheck == "all" || bcheck == "geomsum")
        report(rls::check_geom_sum_tail(bsets, samples, bseed));
      if (bcheck == "all" || bcheck == "schedule") {
        auto r = rls::check_phase_schedule(bschedule_sets, bseed);
        std::printf("%-10s sets=%" PRIu64 " violations=%" PRIu64 "\n", "schedule",
                    r.sets, r.violations);
        ok = ok && r.violations == 0;
      }
      return ok ? 0 : 1;
    }

    if (*validate) {
      auto ns = parse_int_list(vn);
      auto ms = parse_int_list(vm);
      if (ns.size() != ms.size())
        throw std::invalid_argument("validate: --n and --m lists must pair up");
      bool ok = true;
      for (std::size_t i = 0; i < ns.size(); ++i) {
        auto rows = rls::validate_simulator(ns[i], ms[i], vruns, vseed);
        for (const auto& row : rows) {
          std::printf("n=%" PRId64 " m=%" PRId64 " %-20s exact=%-12.8g "
                      "mean=%-12.8g se=%-10.3g z=%+.3f\n",
                      ns[i], ms[i], rls::state_to_string(row.state).c_str(),
                      row.exact, row.empirical_mean, row.standard_error, row.z);
          ok = ok && std::abs(row.z) <= 3.0;
        }
      }
      std::printf(ok ? "validate: all |z| <= 3\n" : "validate: FAILED\n");
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
