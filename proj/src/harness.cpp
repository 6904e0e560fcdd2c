#include "rls/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace rls {

std::string variant_name(ProtocolVariant v) {
  return v == ProtocolVariant::non_strict ? "non_strict" : "strict";
}

ProtocolVariant variant_from_name(const std::string& s) {
  if (s == "non_strict" || s == "nonstrict") return ProtocolVariant::non_strict;
  if (s == "strict") return ProtocolVariant::strict;
  throw std::invalid_argument("unknown variant: " + s);
}

unsigned thread_budget() {
  if (const char* env = std::getenv("RLSLAB_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

std::uint64_t cell_seed(std::uint64_t master_seed, std::int64_t n,
                        std::int64_t m) {
  std::uint64_t h = RngStream::mix64(static_cast<std::uint64_t>(n) * 0x100000001B3ull ^
                                     RngStream::mix64(static_cast<std::uint64_t>(m)));
  return RngStream::mix64(master_seed ^ h);
}

Configuration make_scenario(const std::string& name, std::int64_t n,
                            std::int64_t m, RngStream* rng) {
  if (name.rfind("from_file:", 0) == 0) {
    std::ifstream in(name.substr(10));
    if (!in)
      throw std::runtime_error("cannot open scenario file: " + name.substr(10));
    std::vector<std::int64_t> loads;
    std::int64_t v;
    while (in >> v) loads.push_back(v);
    Configuration c(std::move(loads));
    if (n > 0 && c.n() != n)
      throw std::invalid_argument("scenario file has wrong bin count");
    if (m > 0 && c.m() != m)
      throw std::invalid_argument("scenario file has wrong ball count");
    return c;
  }
  if (n < 1 || m < 0)
    throw std::invalid_argument("make_scenario: need n >= 1, m >= 0");
  if (name == "all_in_one") {
    std::vector<std::int64_t> loads(static_cast<std::size_t>(n), 0);
    loads[0] = m;
    return Configuration(std::move(loads));
  }
  if (name == "two_bin_perturbation") {
    if (n < 2 || m % n != 0 || m / n < 1)
      throw std::invalid_argument(
          "two_bin_perturbation: requires n >= 2, n | m, and m/n >= 1");
    std::vector<std::int64_t> loads(static_cast<std::size_t>(n), m / n);
    ++loads.front();
    --loads.back();
    return Configuration(std::move(loads));
  }
  if (name == "uniform_random") {
    if (!rng) throw std::invalid_argument("uniform_random: needs an rng");
    std::vector<std::int64_t> loads(static_cast<std::size_t>(n), 0);
    for (std::int64_t b = 0; b < m; ++b)
      ++loads[rng->uniform_below(static_cast<std::uint64_t>(n))];
    return Configuration(std::move(loads));
  }
  if (name == "two_choice_placement") {
    if (!rng) throw std::invalid_argument("two_choice_placement: needs an rng");
    std::vector<std::int64_t> loads(static_cast<std::size_t>(n), 0);
    for (std::int64_t b = 0; b < m; ++b) {
      auto i = rng->uniform_below(static_cast<std::uint64_t>(n));
      auto j = rng->uniform_below(static_cast<std::uint64_t>(n));
      ++loads[loads[j] < loads[i] ? j : i];
    }
    return Configuration(std::move(loads));
  }
  throw std::invalid_argument("unknown scenario: " + name);
}

namespace {

RunRecord record_from_report(const ExperimentSpec& spec, std::uint64_t stream,
                             const PhaseReport& rep) {
  RunRecord rec;
  rec.scenario = spec.scenario;
  rec.n = spec.n;
  rec.m = spec.m;
  rec.variant = spec.variant;
  rec.stream = stream;
  rec.events = rep.events;
  rec.t_disc_96ln = rep.t_disc_96ln;
  rec.t_disc_half_avg = rep.t_disc_half_avg;
  rec.t_disc_8ln = rep.t_disc_8ln;
  rec.t_overloaded_n = rep.t_overloaded_n;
  rec.t_disc_le1 = rep.t_disc_le1;
  rec.t_perfect = rep.t_perfect;
  rec.truncated = rep.truncated;
  return rec;
}

RunRecord one_run(const ExperimentSpec& spec, std::uint64_t stream) {
  RngStream rng(spec.seed, stream);
  Configuration initial = make_scenario(spec.scenario, spec.n, spec.m, &rng);
  if (spec.schedule.empty() || spec.schedule == "none") {
    Simulator sim(std::move(initial), spec.variant, rng);
    return record_from_report(spec, stream, sim.run_with_markers(spec.caps));
  }
  auto schedule = make_schedule(
      spec.schedule, RngStream::mix64(spec.seed ^ 0xADull) + stream);
  auto stop = [](const Configuration& c) { return is_perfectly_balanced(c); };
  return record_from_report(
      spec, stream,
      adversarial_run(std::move(initial), *schedule, spec.variant, rng, stop,
                      spec.caps));
}

}  // namespace

std::vector<RunRecord> run_batch(const ExperimentSpec& spec) {
  std::vector<RunRecord> records(spec.runs);
  if (spec.runs == 0) return records;
  unsigned workers = std::min<std::uint64_t>(thread_budget(), spec.runs);
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < spec.runs; ++i) records[i] = one_run(spec, i);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::uint64_t i = next.fetch_add(1); i < spec.runs;
               i = next.fetch_add(1))
            records[i] = one_run(spec, i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  if (!spec.out.empty()) emit_csv(records, spec.out);
  return records;
}

namespace {

MarkerStats stats_of(std::vector<double> v) {
  MarkerStats s;
  s.count = v.size();
  if (v.empty()) return s;
  double sum = 0.0, sumsq = 0.0;
  for (double x : v) {
    sum += x;
    sumsq += x * x;
  }
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double var = (sumsq - sum * s.mean) / static_cast<double>(v.size() - 1);
    s.sd = std::sqrt(std::max(var, 0.0));
    s.se = s.sd / std::sqrt(static_cast<double>(v.size()));
  }
  std::sort(v.begin(), v.end());
  auto q = [&](double p) {
    auto idx = static_cast<std::size_t>(p * static_cast<double>(v.size() - 1));
    return v[idx];
  };
  s.p50 = q(0.50);
  s.p95 = q(0.95);
  s.p99 = q(0.99);
  return s;
}

}  // namespace

Summary summarize(const std::vector<RunRecord>& records) {
  Summary s;
  s.records = records.size();
  std::vector<double> perfect, le1, d96, half, d8, over, ev;
  for (const auto& r : records) {
    if (r.truncated) ++s.truncated;
    if (r.t_perfect) perfect.push_back(*r.t_perfect);
    if (r.t_disc_le1) le1.push_back(*r.t_disc_le1);
    if (r.t_disc_96ln) d96.push_back(*r.t_disc_96ln);
    if (r.t_disc_half_avg) half.push_back(*r.t_disc_half_avg);
    if (r.t_disc_8ln) d8.push_back(*r.t_disc_8ln);
    if (r.t_overloaded_n) over.push_back(*r.t_overloaded_n);
    ev.push_back(static_cast<double>(r.events));
  }
  s.t_perfect = stats_of(std::move(perfect));
  s.t_disc_le1 = stats_of(std::move(le1));
  s.t_disc_96ln = stats_of(std::move(d96));
  s.t_disc_half_avg = stats_of(std::move(half));
  s.t_disc_8ln = stats_of(std::move(d8));
  s.t_overloaded_n = stats_of(std::move(over));
  s.events = stats_of(std::move(ev));
  return s;
}

FitResult scaling_fit(
    const std::vector<std::pair<std::int64_t, double>>& groups) {
  if (groups.size() < 3)
    throw std::invalid_argument("scaling_fit: need at least 3 groups");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double k = static_cast<double>(groups.size());
  for (auto& [n, t] : groups) {
    double x = std::log(static_cast<double>(n));
    sx += x;
    sy += t;
    sxx += x * x;
    sxy += x * t;
    syy += t * t;
  }
  double det = k * sxx - sx * sx;
  if (std::abs(det) < 1e-12)
    throw std::invalid_argument("scaling_fit: degenerate design (all n equal)");
  FitResult f;
  f.b = (k * sxy - sx * sy) / det;
  f.a = (sy - f.b * sx) / k;
  double ss_tot = syy - sy * sy / k;
  double ss_res = 0.0;
  for (auto& [n, t] : groups) {
    double e = t - (f.a + f.b * std::log(static_cast<double>(n)));
    ss_res += e * e;
  }
  f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

namespace {

const char* kCsvHeader =
    "scenario,n,m,variant,stream,events,t_disc96ln,t_disc_half_avg,t_disc8ln,"
    "t_overloaded_n,t_disc_le1,t_perfect,truncated";

std::string fmt_time(const std::optional<double>& t) {
  if (!t) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", *t);
  return buf;
}

std::optional<double> parse_time(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace

void emit_csv(const std::vector<RunRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.scenario << ',' << r.n << ',' << r.m << ',' << variant_name(r.variant)
        << ',' << r.stream << ',' << r.events << ',' << fmt_time(r.t_disc_96ln)
        << ',' << fmt_time(r.t_disc_half_avg) << ',' << fmt_time(r.t_disc_8ln)
        << ',' << fmt_time(r.t_overloaded_n) << ',' << fmt_time(r.t_disc_le1)
        << ',' << fmt_time(r.t_perfect) << ',' << (r.truncated ? 1 : 0) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void emit_jsonl(const std::vector<RunRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const auto& r : records) {
    nlohmann::json j{{"scenario", r.scenario}, {"n", r.n},
                     {"m", r.m},               {"variant", variant_name(r.variant)},
                     {"stream", r.stream},     {"events", r.events},
                     {"truncated", r.truncated}};
    auto put = [&](const char* key, const std::optional<double>& t) {
      if (t) j[key] = *t;
    };
    put("t_disc96ln", r.t_disc_96ln);
    put("t_disc_half_avg", r.t_disc_half_avg);
    put("t_disc8ln", r.t_disc_8ln);
    put("t_overloaded_n", r.t_overloaded_n);
    put("t_disc_le1", r.t_disc_le1);
    put("t_perfect", r.t_perfect);
    out << j.dump() << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<RunRecord> parse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::runtime_error(path + ": unexpected CSV header");
  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.push_back("");
    if (f.size() != 13)
      throw std::runtime_error(path + ": malformed row: " + line);
    RunRecord r;
    r.scenario = f[0];
    r.n = std::stoll(f[1]);
    r.m = std::stoll(f[2]);
    r.variant = variant_from_name(f[3]);
    r.stream = std::stoull(f[4]);
    r.events = std::stoull(f[5]);
    r.t_disc_96ln = parse_time(f[6]);
    r.t_disc_half_avg = parse_time(f[7]);
    r.t_disc_8ln = parse_time(f[8]);
    r.t_overloaded_n = parse_time(f[9]);
    r.t_disc_le1 = parse_time(f[10]);
    r.t_perfect = parse_time(f[11]);
    r.truncated = f[12] == "1";
    out.push_back(std::move(r));
  }
  return out;
}

ExperimentSpec parse_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec file: " + path);
  ExperimentSpec spec;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": expected key=value");
      continue;
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "scenario")
      spec.scenario = val;
    else if (key == "n")
      spec.n = std::stoll(val);
    else if (key == "m")
      spec.m = std::stoll(val);
    else if (key == "variant")
      spec.variant = variant_from_name(val);
    else if (key == "schedule")
      spec.schedule = val;
    else if (key == "runs")
      spec.runs = std::stoull(val);
    else if (key == "seed")
      spec.seed = std::stoull(val);
    else if (key == "max_events")
      spec.caps.max_events = std::stoull(val);
    else if (key == "max_clock")
      spec.caps.max_clock = std::stod(val);
    else if (key == "out")
      spec.out = val;
    else
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": unknown key `" + key + "`");
  }
  return spec;
}

}  // namespace rls
