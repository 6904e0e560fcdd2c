#include "rls/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace rls {

SortedState canonical_state(const Configuration& c) {
  SortedState s = c.loads;
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

std::vector<SortedState> enumerate_states(std::int64_t n, std::int64_t m,
                                          std::size_t limit) {
  if (n < 1 || m < 0) throw std::invalid_argument("enumerate_states: bad (n, m)");
  std::vector<SortedState> out;
  SortedState cur;
  std::function<void(std::int64_t, std::int64_t, std::int64_t)> rec =
      [&](std::int64_t remaining, std::int64_t parts_left, std::int64_t cap) {
        if (remaining == 0) {
          SortedState s = cur;
          s.resize(static_cast<std::size_t>(n), 0);
          if (out.size() >= limit)
            throw std::runtime_error("enumerate_states: state limit exceeded");
          out.push_back(std::move(s));
          return;
        }
        if (parts_left == 0) return;
        std::int64_t hi = std::min(cap, remaining);
        // smallest admissible part: remaining must fit into parts_left parts
        for (std::int64_t v = hi; v >= 1; --v) {
          if (v * parts_left < remaining) break;
          cur.push_back(v);
          rec(remaining - v, parts_left - 1, v);
          cur.pop_back();
        }
      };
  rec(m, n, m);
  return out;
}

std::uint64_t partition_count(std::int64_t m, std::int64_t max_parts) {
  // p(m into <= k parts) via the standard recurrence, small inputs only
  std::vector<std::vector<std::uint64_t>> p(
      static_cast<std::size_t>(m) + 1,
      std::vector<std::uint64_t>(static_cast<std::size_t>(max_parts) + 1, 0));
  for (std::int64_t k = 0; k <= max_parts; ++k) p[0][static_cast<std::size_t>(k)] = 1;
  for (std::int64_t i = 1; i <= m; ++i)
    for (std::int64_t k = 1; k <= max_parts; ++k) {
      auto v = p[static_cast<std::size_t>(i)][static_cast<std::size_t>(k - 1)];
      if (i >= k) v += p[static_cast<std::size_t>(i - k)][static_cast<std::size_t>(k)];
      p[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = v;
    }
  return p[static_cast<std::size_t>(m)][static_cast<std::size_t>(max_parts)];
}

TransitionLaw transition_distribution(const SortedState& s, std::int64_t n,
                                      ProtocolVariant variant) {
  (void)variant;  // strict and non-strict differ only in neutral moves, which
                  // never change the sorted vector
  if (static_cast<std::int64_t>(s.size()) != n)
    throw std::invalid_argument("transition_distribution: state has wrong length");
  // group by load value
  std::map<std::int64_t, std::int64_t> count;
  for (auto v : s) ++count[v];

  TransitionLaw law;
  std::map<SortedState, double> rates;
  for (auto [a, ca] : count) {
    if (a < 1) continue;
    for (auto [b, cb] : count) {
      if (a < b + 2) continue;  // not a move, or neutral (sorted vector unchanged)
      double rate = static_cast<double>(ca) * static_cast<double>(a) *
                    static_cast<double>(cb) / static_cast<double>(n);
      SortedState next = s;
      // move one ball from a bin of load a to a bin of load b
      auto it_a = std::find(next.begin(), next.end(), a);
      --*it_a;
      auto it_b = std::find(next.begin(), next.end(), b);
      ++*it_b;
      std::sort(next.begin(), next.end(), std::greater<>());
      rates[next] += rate;
      law.exit_rate += rate;
    }
  }
  for (auto& [to, rate] : rates) law.probs[to] = rate / law.exit_rate;
  return law;
}

ExactChain build_chain(std::int64_t n, std::int64_t m, ProtocolVariant variant,
                       std::size_t state_limit) {
  ExactChain chain;
  chain.n = n;
  chain.m = m;
  chain.states = enumerate_states(n, m, state_limit);
  for (std::size_t i = 0; i < chain.states.size(); ++i)
    chain.index[chain.states[i]] = i;
  chain.exit_rate.resize(chain.states.size(), 0.0);
  chain.transitions.resize(chain.states.size());
  chain.absorbing.resize(chain.states.size(), false);
  for (std::size_t i = 0; i < chain.states.size(); ++i) {
    Configuration c(chain.states[i]);
    chain.absorbing[i] = is_perfectly_balanced(c);
    if (chain.absorbing[i]) continue;
    auto law = transition_distribution(chain.states[i], n, variant);
    chain.exit_rate[i] = law.exit_rate;
    for (auto& [to, p] : law.probs)
      chain.transitions[i].emplace_back(chain.index.at(to), p);
  }
  solve_absorption_times(chain);
  return chain;
}

void solve_absorption_times(ExactChain& chain) {
  // unknowns: transient states; E[i] - sum_j P(i->j) E[j] = 1/exit(i)
  std::vector<std::size_t> transient;
  std::vector<std::ptrdiff_t> col(chain.states.size(), -1);
  for (std::size_t i = 0; i < chain.states.size(); ++i) {
    if (!chain.absorbing[i]) {
      col[i] = static_cast<std::ptrdiff_t>(transient.size());
      transient.push_back(i);
    }
  }
  const std::size_t t = transient.size();
  chain.expected_time.assign(chain.states.size(), 0.0);
  if (t == 0) return;

  std::vector<std::vector<double>> a(t, std::vector<double>(t + 1, 0.0));
  for (std::size_t r = 0; r < t; ++r) {
    std::size_t i = transient[r];
    if (chain.exit_rate[i] <= 0.0)
      throw std::runtime_error(
          "solve_absorption_times: transient state with zero exit rate: " +
          state_to_string(chain.states[i]));
    a[r][r] = 1.0;
    for (auto& [j, p] : chain.transitions[i])
      if (col[j] >= 0) a[r][static_cast<std::size_t>(col[j])] -= p;
    a[r][t] = 1.0 / chain.exit_rate[i];
  }

  // Gaussian elimination with partial pivoting
  for (std::size_t c = 0; c < t; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < t; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-12)
      throw std::runtime_error(
          "solve_absorption_times: singular system (absorption unreachable)");
    std::swap(a[c], a[piv]);
    for (std::size_t r = 0; r < t; ++r) {
      if (r == c || a[r][c] == 0.0) continue;
      double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= t; ++k) a[r][k] -= f * a[c][k];
    }
  }
  for (std::size_t r = 0; r < t; ++r) {
    double e = a[r][t] / a[r][r];
    if (!(e >= 0.0) || !std::isfinite(e))
      throw std::runtime_error("solve_absorption_times: non-finite solution");
    chain.expected_time[transient[r]] = e;
  }
}

double expected_absorption_time(const ExactChain& chain, const SortedState& s) {
  auto it = chain.index.find(s);
  if (it == chain.index.end()) {
    SortedState canon = s;
    std::sort(canon.begin(), canon.end(), std::greater<>());
    it = chain.index.find(canon);
    if (it == chain.index.end())
      throw std::invalid_argument("expected_absorption_time: unknown state " +
                                  state_to_string(s));
  }
  return chain.expected_time[it->second];
}

std::vector<ValidationRow> validate_simulator(std::int64_t n, std::int64_t m,
                                              std::uint64_t runs,
                                              std::uint64_t seed,
                                              ProtocolVariant variant) {
  ExactChain chain = build_chain(n, m, variant);
  std::vector<ValidationRow> rows;
  for (std::size_t i = 0; i < chain.states.size(); ++i) {
    ValidationRow row;
    row.state = chain.states[i];
    row.exact = chain.expected_time[i];
    row.runs = runs;
    double sum = 0.0, sumsq = 0.0;
    std::uint64_t state_seed =
        RngStream::mix64(seed ^ RngStream::mix64(0x0c11ull + i));
    for (std::uint64_t r = 0; r < runs; ++r) {
      Simulator sim(Configuration(chain.states[i]), variant,
                    RngStream(state_seed, r));
      auto rep = sim.run_with_markers();
      if (rep.truncated)
        throw std::runtime_error("validate_simulator: truncated run");
      sum += rep.clock;
      sumsq += rep.clock * rep.clock;
    }
    double mean = sum / static_cast<double>(runs);
    double var = (sumsq - sum * mean) / static_cast<double>(runs - 1);
    row.empirical_mean = mean;
    row.standard_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(runs));
    row.z = row.standard_error > 0.0
                ? (mean - row.exact) / row.standard_error
                : (mean == row.exact ? 0.0 : INFINITY);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string state_to_string(const SortedState& s) {
  std::ostringstream os;
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? ":" : "") << s[i];
  return os.str();
}

void export_chain_csv(const ExactChain& chain, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "state,exit_rate,expected_time\n";
  char buf[64];
  for (std::size_t i = 0; i < chain.states.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g", chain.exit_rate[i],
                  chain.expected_time[i]);
    out << state_to_string(chain.states[i]) << ',' << buf << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace rls
