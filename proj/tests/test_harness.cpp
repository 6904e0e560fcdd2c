#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "rls/harness.hpp"

using rls::Configuration;
using rls::ExperimentSpec;
using rls::ProtocolVariant;
using rls::RngStream;
using rls::RunRecord;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool same_records(const std::vector<RunRecord>& a,
                  const std::vector<RunRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].stream != b[i].stream || a[i].events != b[i].events ||
        a[i].t_perfect != b[i].t_perfect || a[i].truncated != b[i].truncated)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("scenario generators produce the advertised shapes") {
  auto one = rls::make_scenario("all_in_one", 4, 9, nullptr);
  CHECK(one.loads == std::vector<std::int64_t>{9, 0, 0, 0});

  auto two = rls::make_scenario("two_bin_perturbation", 4, 12, nullptr);
  CHECK(two.loads == std::vector<std::int64_t>{4, 3, 3, 2});
  CHECK_THROWS_AS(rls::make_scenario("two_bin_perturbation", 4, 10, nullptr),
                  std::invalid_argument);

  RngStream rng(3, 0);
  auto uni = rls::make_scenario("uniform_random", 5, 40, &rng);
  CHECK(uni.n() == 5);
  CHECK(uni.m() == 40);
  auto two_choice = rls::make_scenario("two_choice_placement", 5, 40, &rng);
  CHECK(two_choice.m() == 40);
  // two-choice placement is never worse balanced than its own ball count bound
  CHECK(rls::max_load(two_choice) <= 40);
  CHECK_THROWS_AS(rls::make_scenario("uniform_random", 5, 40, nullptr),
                  std::invalid_argument);
  CHECK_THROWS_AS(rls::make_scenario("warp", 5, 40, &rng),
                  std::invalid_argument);
}

TEST_CASE("scenario files load and validate against (n, m)") {
  const char* path = "scenario_tmp.txt";
  {
    std::ofstream out(path);
    out << "3 1\n2 0\n";
  }
  auto c = rls::make_scenario(std::string("from_file:") + path, 4, 6, nullptr);
  CHECK(c.loads == std::vector<std::int64_t>{3, 1, 2, 0});
  CHECK_THROWS_AS(rls::make_scenario(std::string("from_file:") + path, 5, 6,
                                     nullptr),
                  std::invalid_argument);
  CHECK_THROWS_AS(rls::make_scenario(std::string("from_file:") + path, 4, 7,
                                     nullptr),
                  std::invalid_argument);
  std::remove(path);
}

TEST_CASE("batches replay bit-identically, including across thread counts") {
  ExperimentSpec spec;
  spec.scenario = "uniform_random";
  spec.n = 8;
  spec.m = 64;
  spec.runs = 64;
  spec.seed = 20260823;
  auto a = rls::run_batch(spec);
  auto b = rls::run_batch(spec);
  CHECK(same_records(a, b));

  setenv("RLSLAB_THREADS", "1", 1);
  CHECK(rls::thread_budget() == 1);
  auto serial = rls::run_batch(spec);
  setenv("RLSLAB_THREADS", "4", 1);
  CHECK(rls::thread_budget() == 4);
  auto parallel = rls::run_batch(spec);
  unsetenv("RLSLAB_THREADS");
  CHECK(same_records(serial, parallel));
  // records are stream-ordered regardless of worker interleaving
  for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i].stream == i);
}

TEST_CASE("adversarial schedules slow the batch down on average") {
  ExperimentSpec plain;
  plain.scenario = "all_in_one";
  plain.n = 4;
  plain.m = 40;
  plain.runs = 400;
  plain.seed = 5;
  auto sp = rls::summarize(rls::run_batch(plain));

  ExperimentSpec adv = plain;
  adv.schedule = "pileup:25";
  auto sa = rls::summarize(rls::run_batch(adv));
  REQUIRE(sp.t_perfect.count == 400);
  REQUIRE(sa.t_perfect.count == 400);
  CHECK(sa.t_perfect.mean > sp.t_perfect.mean);
}

TEST_CASE("CSV round-trips bit-identically with the pinned header") {
  ExperimentSpec spec;
  spec.scenario = "all_in_one";
  spec.n = 4;
  spec.m = 16;
  spec.runs = 25;
  spec.seed = 77;
  spec.out = "runs_tmp.csv";
  auto records = rls::run_batch(spec);

  auto text = slurp(spec.out);
  auto nl = text.find('\n');
  CHECK(text.substr(0, nl) ==
        "scenario,n,m,variant,stream,events,t_disc96ln,t_disc_half_avg,"
        "t_disc8ln,t_overloaded_n,t_disc_le1,t_perfect,truncated");

  auto parsed = rls::parse_csv(spec.out);
  REQUIRE(parsed.size() == records.size());
  rls::emit_csv(parsed, "runs_tmp2.csv");
  CHECK(slurp("runs_tmp2.csv") == text);
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    CHECK(parsed[i].scenario == records[i].scenario);
    CHECK(parsed[i].stream == records[i].stream);
    CHECK(parsed[i].events == records[i].events);
  }
  std::remove("runs_tmp.csv");
  std::remove("runs_tmp2.csv");
}

TEST_CASE("empty batches still write a header-only table") {
  rls::emit_csv({}, "empty_tmp.csv");
  auto parsed = rls::parse_csv("empty_tmp.csv");
  CHECK(parsed.empty());
  std::remove("empty_tmp.csv");
  CHECK_THROWS_AS(rls::parse_csv("no_such.csv"), std::runtime_error);
}

TEST_CASE("jsonl output has one object per run") {
  ExperimentSpec spec;
  spec.scenario = "all_in_one";
  spec.n = 2;
  spec.m = 4;
  spec.runs = 5;
  spec.seed = 1;
  auto records = rls::run_batch(spec);
  rls::emit_jsonl(records, "runs_tmp.jsonl");
  std::ifstream in("runs_tmp.jsonl");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    CHECK(line.find("\"scenario\":\"all_in_one\"") != std::string::npos);
    ++lines;
  }
  CHECK(lines == 5);
  in.close();
  std::remove("runs_tmp.jsonl");
}

TEST_CASE("scaling fit recovers exact affine-in-ln-n data") {
  std::vector<std::pair<std::int64_t, double>> groups;
  for (std::int64_t n : {16, 32, 64, 128})
    groups.emplace_back(n, 2.0 + 3.0 * std::log(static_cast<double>(n)));
  auto f = rls::scaling_fit(groups);
  CHECK(f.a == doctest::Approx(2.0));
  CHECK(f.b == doctest::Approx(3.0));
  CHECK(f.r2 == doctest::Approx(1.0));

  std::vector<std::pair<std::int64_t, double>> flat{{16, 5.0}, {32, 5.0}, {64, 5.0}};
  auto g = rls::scaling_fit(flat);
  CHECK(g.b == doctest::Approx(0.0));
  CHECK(g.a == doctest::Approx(5.0));

  CHECK_THROWS_AS(rls::scaling_fit({{2, 1.0}, {4, 2.0}}), std::invalid_argument);
  CHECK_THROWS_AS(rls::scaling_fit({{4, 1.0}, {4, 2.0}, {4, 3.0}}),
                  std::invalid_argument);
}

TEST_CASE("marker times in a record respect threshold tightness") {
  ExperimentSpec spec;
  spec.scenario = "all_in_one";
  spec.n = 8;
  spec.m = 256;
  spec.runs = 50;
  spec.seed = 31;
  for (const auto& r : rls::run_batch(spec)) {
    REQUIRE(r.t_perfect.has_value());
    CHECK(*r.t_disc_96ln <= *r.t_disc_8ln);
    CHECK(*r.t_disc_8ln <= *r.t_disc_le1);
    CHECK(*r.t_disc_le1 <= *r.t_perfect);
    CHECK_FALSE(r.truncated);
  }
}

TEST_CASE("spec files parse and reject unknown keys") {
  const char* path = "spec_tmp.txt";
  {
    std::ofstream out(path);
    out << "# comment\n";
    out << "scenario = two_bin_perturbation\n";
    out << "n = 16\n";
    out << "m = 64\n";
    out << "variant = strict\n";
    out << "schedule = pileup:100\n";
    out << "runs = 7\n";
    out << "seed = 99\n";
    out << "max_events = 5000\n";
    out << "out = x.csv\n";
  }
  auto spec = rls::parse_spec_file(path);
  CHECK(spec.scenario == "two_bin_perturbation");
  CHECK(spec.n == 16);
  CHECK(spec.m == 64);
  CHECK(spec.variant == ProtocolVariant::strict);
  CHECK(spec.schedule == "pileup:100");
  CHECK(spec.runs == 7);
  CHECK(spec.seed == 99);
  CHECK(spec.caps.max_events == 5000);
  CHECK(spec.out == "x.csv");
  {
    std::ofstream out(path);
    out << "warp = 9\n";
  }
  CHECK_THROWS_AS(rls::parse_spec_file(path), std::runtime_error);
  std::remove(path);
}

TEST_CASE("cell seeds separate cells and stay stable") {
  CHECK(rls::cell_seed(1, 16, 256) == rls::cell_seed(1, 16, 256));
  CHECK(rls::cell_seed(1, 16, 256) != rls::cell_seed(1, 32, 256));
  CHECK(rls::cell_seed(1, 16, 256) != rls::cell_seed(2, 16, 256));
}

TEST_CASE("variant names round-trip") {
  CHECK(rls::variant_name(ProtocolVariant::strict) == "strict");
  CHECK(rls::variant_from_name("non_strict") == ProtocolVariant::non_strict);
  CHECK_THROWS_AS(rls::variant_from_name("bogus"), std::invalid_argument);
}
