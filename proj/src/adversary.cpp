#include "rls/adversary.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace rls {

bool is_destructive(const Configuration& c, Move mv) {
  if (mv.src >= c.loads.size() || mv.dst >= c.loads.size())
    throw std::out_of_range("is_destructive: bin index out of range");
  if (mv.src == mv.dst)
    throw std::invalid_argument("is_destructive: src == dst");
  if (c.loads[mv.src] < 1)
    throw std::invalid_argument("is_destructive: source bin is empty");
  return c.loads[mv.src] <= c.loads[mv.dst] + 1;
}

Configuration apply_destructive(const Configuration& c, Move mv) {
  if (!is_destructive(c, mv))
    throw std::invalid_argument("apply_destructive: move is not destructive");
  Configuration out = c;
  --out.loads[mv.src];
  ++out.loads[mv.dst];
  return out;
}

std::vector<Move> RevertLastSuccess::moves(std::uint64_t, const Configuration&,
                                           const Event& last) {
  if (!last.moved) return {};
  return {Move{last.dst, last.src}};
}

PileUp::PileUp(std::uint64_t period) : period_(period) {
  if (period == 0) throw std::invalid_argument("PileUp: period must be > 0");
}

std::vector<Move> PileUp::moves(std::uint64_t event_index,
                                const Configuration& c, const Event&) {
  if (event_index == 0 || event_index % period_ != 0) return {};
  std::size_t lo = c.loads.size(), hi = 0;
  for (std::size_t i = 0; i < c.loads.size(); ++i) {
    if (c.loads[i] > c.loads[hi]) hi = i;
    if (c.loads[i] >= 1 && (lo == c.loads.size() || c.loads[i] < c.loads[lo]))
      lo = i;
  }
  if (lo == c.loads.size() || lo == hi) return {};
  return {Move{lo, hi}};
}

Scripted::Scripted(std::vector<ScriptedMove> script) : script_(std::move(script)) {
  std::stable_sort(script_.begin(), script_.end(),
                   [](const ScriptedMove& a, const ScriptedMove& b) {
                     return a.event_index < b.event_index;
                   });
}

std::vector<Move> Scripted::moves(std::uint64_t event_index,
                                  const Configuration&, const Event&) {
  std::vector<Move> out;
  auto lo = std::lower_bound(script_.begin(), script_.end(), event_index,
                             [](const ScriptedMove& s, std::uint64_t e) {
                               return s.event_index < e;
                             });
  for (auto it = lo; it != script_.end() && it->event_index == event_index; ++it)
    out.push_back(it->mv);
  return out;
}

RandomDestructive::RandomDestructive(std::uint64_t period, RngStream rng)
    : period_(period), rng_(rng) {
  if (period == 0)
    throw std::invalid_argument("RandomDestructive: period must be > 0");
}

std::vector<Move> RandomDestructive::moves(std::uint64_t event_index,
                                           const Configuration& c,
                                           const Event&) {
  if (event_index == 0 || event_index % period_ != 0) return {};
  const std::size_t n = c.loads.size();
  if (n < 2) return {};
  // rejection-sample a destructive (src, dst) pair; src must be nonempty
  for (int tries = 0; tries < 64; ++tries) {
    auto src = static_cast<std::size_t>(rng_.uniform_below(n));
    auto dst = static_cast<std::size_t>(rng_.uniform_below(n));
    if (src == dst || c.loads[src] < 1) continue;
    if (c.loads[src] <= c.loads[dst] + 1) return {Move{src, dst}};
  }
  return {};
}

std::vector<ScriptedMove> load_schedule_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schedule file: " + path);
  std::vector<ScriptedMove> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    ScriptedMove sm;
    if (!(ls >> sm.event_index)) continue;  // blank line
    if (!(ls >> sm.mv.src >> sm.mv.dst))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected `event_index src dst`");
    out.push_back(sm);
  }
  return out;
}

std::unique_ptr<AdversarySchedule> make_schedule(const std::string& spec,
                                                 std::uint64_t seed) {
  if (spec.empty() || spec == "none") return std::make_unique<NoneSchedule>();
  if (spec == "revert") return std::make_unique<RevertLastSuccess>();
  auto colon = spec.find(':');
  std::string kind = spec.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "pileup")
    return std::make_unique<PileUp>(std::stoull(arg));
  if (kind == "random")
    return std::make_unique<RandomDestructive>(
        std::stoull(arg), RngStream(seed, 0xADEBull));
  if (kind == "scripted")
    return std::make_unique<Scripted>(load_schedule_file(arg));
  throw std::invalid_argument("unknown schedule spec: " + spec);
}

PhaseReport adversarial_run(Configuration initial, AdversarySchedule& schedule,
                            ProtocolVariant variant, RngStream rng,
                            const std::function<bool(const Configuration&)>& stop,
                            Caps caps) {
  Simulator sim(std::move(initial), variant, rng, Mode::anonymous);
  PhaseReport report;
  sim.record_markers(report);
  while (!stop(sim.config())) {
    if (sim.events() >= caps.max_events || sim.clock() >= caps.max_clock) {
      report.truncated = true;
      break;
    }
    Event ev = sim.step();
    sim.record_markers(report);
    for (Move mv : schedule.moves(sim.events(), sim.config(), ev)) {
      if (!is_destructive(sim.config(), mv)) {
        std::ostringstream os;
        os << "adversarial_run: schedule emitted non-destructive move " << mv.src
           << "->" << mv.dst << " at event " << sim.events() << " (loads";
        for (auto v : sim.config().loads) os << ' ' << v;
        os << ")";
        throw std::runtime_error(os.str());
      }
      sim.apply_external_move(mv.src, mv.dst);
      sim.record_markers(report);
    }
  }
  report.events = sim.events();
  report.clock = sim.clock();
  report.final_config = sim.config();
  return report;
}

// ---------------------------------------------------------------------------
// Coupling chain

namespace {

std::vector<std::int64_t> sorted_desc(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

std::int64_t disc_scaled_of(const std::vector<std::int64_t>& v, std::int64_t n,
                            std::int64_t m) {
  // sorted non-increasing: extremes are first and last entries
  std::int64_t hi = v.front() * n - m;
  std::int64_t lo = m - v.back() * n;
  return hi > lo ? hi : lo;
}

std::string dump_chain(const std::vector<std::vector<std::int64_t>>& members) {
  std::ostringstream os;
  for (std::size_t k = 0; k < members.size(); ++k) {
    os << "\n  P(" << k << "): [";
    for (std::size_t i = 0; i < members[k].size(); ++i)
      os << (i ? " " : "") << members[k][i];
    os << "]";
  }
  return os.str();
}

}  // namespace

CouplingChain::CouplingChain(const Configuration& initial)
    : n_(initial.n()), m_(initial.m()) {
  members_.push_back(sorted_desc(initial.loads));
}

CouplingChain::CouplingChain(std::vector<Configuration> members) {
  if (members.empty())
    throw std::invalid_argument("CouplingChain: need at least one member");
  n_ = members.front().n();
  m_ = members.front().m();
  for (auto& c : members) {
    if (c.n() != n_ || c.m() != m_)
      throw std::invalid_argument("CouplingChain: members disagree on (n, m)");
    members_.push_back(sorted_desc(c.loads));
  }
  canonicalize_and_verify();
}

std::int64_t CouplingChain::front_disc_scaled() const {
  return disc_scaled_of(members_.front(), n_, m_);
}

std::int64_t CouplingChain::back_disc_scaled() const {
  return disc_scaled_of(members_.back(), n_, m_);
}

void CouplingChain::add_destructive(Move mv) {
  const auto& top = members_.back();
  if (mv.src >= top.size() || mv.dst >= top.size() || mv.src == mv.dst)
    throw std::invalid_argument("add_destructive: bad bins");
  if (top[mv.src] < 1)
    throw std::invalid_argument("add_destructive: source bin is empty");
  if (top[mv.src] > top[mv.dst] + 1)
    throw std::invalid_argument("add_destructive: move is not destructive");
  if (top[mv.src] == top[mv.dst] + 1) return;  // neutral: sorted vector unchanged
  auto next = top;
  --next[mv.src];
  ++next[mv.dst];
  members_.push_back(sorted_desc(std::move(next)));
  canonicalize_and_verify();
}

void CouplingChain::canonicalize_and_verify() {
  // coalesce equal neighbours, then derive the canonical (i_R, i_L) per link
  for (std::size_t k = 0; k + 1 < members_.size();) {
    if (members_[k] == members_[k + 1])
      members_.erase(members_.begin() + static_cast<std::ptrdiff_t>(k) + 1);
    else
      ++k;
  }
  rels_.clear();
  for (std::size_t k = 0; k + 1 < members_.size(); ++k) {
    const auto& L = members_[k];
    const auto& R = members_[k + 1];
    std::map<std::int64_t, std::int64_t> diff;
    for (auto v : R) ++diff[v];
    for (auto v : L) --diff[v];
    std::vector<std::pair<std::int64_t, std::int64_t>> d;  // (value, count)
    for (auto& [v, c] : diff)
      if (c != 0) d.emplace_back(v, c);

    std::int64_t v_src = -1, v_dst = -1;
    bool ok = false;
    if (d.size() == 3 && d[0].second == 1 && d[1].second == -2 &&
        d[2].second == 1 && d[0].first == d[1].first - 1 &&
        d[2].first == d[1].first + 1) {
      v_src = v_dst = d[1].first;  // move between two bins of equal load
      ok = true;
    } else if (d.size() == 4 && d[0].second == 1 && d[1].second == -1 &&
               d[2].second == -1 && d[3].second == 1 &&
               d[0].first == d[1].first - 1 && d[3].first == d[2].first + 1) {
      v_src = d[1].first;  // lower-loaded bin loses a ball
      v_dst = d[2].first;  // higher-loaded bin gains one
      ok = true;
    }
    if (ok) {
      LinkRel rel;
      // canonical positions inside the sorted vector
      for (std::size_t i = 0; i < L.size(); ++i) {
        if (L[i] == v_src) rel.i_R = i;  // max index of the value class
      }
      rel.i_L = L.size();
      for (std::size_t i = L.size(); i-- > 0;) {
        if (L[i] == v_dst) rel.i_L = i;  // min index of the value class
      }
      ok = rel.i_L < rel.i_R && L[rel.i_R] <= L[rel.i_L] + 1;
      if (ok) {
        // elementwise check that R really is L with that single move applied
        for (std::size_t i = 0; i < L.size() && ok; ++i) {
          std::int64_t want = L[i];
          if (i == rel.i_L) ++want;
          if (i == rel.i_R) --want;
          ok = R[i] == want;
        }
      }
      if (ok) rels_.push_back(rel);
    }
    if (!ok)
      throw CouplingViolation(
          "coupling chain: link " + std::to_string(k) +
          " is not one destructive move apart" + dump_chain(members_));
    if (disc_scaled_of(L, n_, m_) > disc_scaled_of(R, n_, m_))
      throw CouplingViolation("coupling chain: closeness holds but disc(P(" +
                              std::to_string(k) + ")) > disc(P(" +
                              std::to_string(k + 1) + "))" +
                              dump_chain(members_));
  }
}

Event CouplingChain::step_with(std::uint64_t slot, std::size_t dest_rank) {
  if (m_ < 1) throw std::logic_error("CouplingChain::step: no balls");
  if (slot >= static_cast<std::uint64_t>(m_) ||
      dest_rank >= static_cast<std::size_t>(n_))
    throw std::out_of_range("CouplingChain::step_with: bad draw");
  ++events_;

  // locate the ball slot (bin, offset) in the canonical layout of the front
  // member: balls packed bin by bin in sorted order
  std::size_t bin = 0;
  std::int64_t off = static_cast<std::int64_t>(slot);
  while (off >= members_[0][bin]) {
    off -= members_[0][bin];
    ++bin;
  }

  Event front_event;
  for (std::size_t k = 0; k < members_.size(); ++k) {
    auto& cfg = members_[k];
    const std::size_t src = bin;
    const bool moved =
        src != dest_rank && cfg[src] >= cfg[dest_rank] + 1;  // non-strict rule

    // carry the activated ball across the link to member k+1 before mutating:
    // the differing ball (last of bin i_R) sits in bin i_L one level up
    if (k + 1 < members_.size()) {
      const LinkRel& rel = rels_[k];
      if (bin == rel.i_R && off == cfg[rel.i_R] - 1) {
        bin = rel.i_L;
        off = cfg[rel.i_L];  // becomes the last ball of the grown bin
      }
    }
    if (moved) {
      --cfg[src];
      ++cfg[dest_rank];
    }
    Event ev{src, dest_rank, moved, 0.0};
    if (k == 0) front_event = ev;
    if (k + 1 == members_.size()) last_back_event_ = ev;
    if (moved) std::sort(cfg.begin(), cfg.end(), std::greater<>());
  }
  canonicalize_and_verify();
  return front_event;
}

Event CouplingChain::step(RngStream& rng) {
  const double holding = rng.exponential(static_cast<double>(m_));
  clock_ += holding;
  const std::uint64_t slot = rng.uniform_below(static_cast<std::uint64_t>(m_));
  const auto dest =
      static_cast<std::size_t>(rng.uniform_below(static_cast<std::uint64_t>(n_)));
  Event ev = step_with(slot, dest);
  ev.holding_time = holding;
  last_back_event_.holding_time = holding;
  return ev;
}

CoupledPair::CoupledPair(const Configuration& left, const Configuration& right)
    : chain_(std::vector<Configuration>{left, right}) {}

Configuration CoupledPair::left() const {
  return Configuration(chain_.front());
}

Configuration CoupledPair::right() const {
  return Configuration(chain_.back());
}

Event coupled_step(CoupledPair& pair, RngStream& rng) {
  return pair.chain().step(rng);
}

DominanceReport dominance_experiment(const Configuration& initial,
                                     AdversarySchedule& schedule,
                                     std::uint64_t horizon_events,
                                     std::uint64_t runs, std::uint64_t seed) {
  DominanceReport rep;
  rep.runs = runs;
  for (std::uint64_t r = 0; r < runs; ++r) {
    RngStream rng(seed, r);
    CouplingChain chain(initial);
    for (std::uint64_t e = 0; e < horizon_events; ++e) {
      chain.step(rng);
      Configuration top(chain.back());
      for (Move mv : schedule.moves(chain.events(), top, chain.last_back_event())) {
        chain.add_destructive(mv);
        ++rep.moves_applied;
      }
      ++rep.events_checked;
      if (chain.front_disc_scaled() > chain.back_disc_scaled())
        ++rep.disc_violations;
      rep.max_chain_size = std::max(rep.max_chain_size, chain.size());
    }
  }
  return rep;
}

}  // namespace rls
