#include "rls/engine.hpp"

#include <cmath>
#include <stdexcept>

namespace rls {

bool attempt_move(const Configuration& c, std::size_t src, std::size_t dst,
                  ProtocolVariant variant) {
  if (src >= c.loads.size() || dst >= c.loads.size())
    throw std::out_of_range("attempt_move: bin index out of range");
  if (c.loads[src] < 1)
    throw std::invalid_argument("attempt_move: source bin is empty");
  if (src == dst) return false;
  const std::int64_t gap = variant == ProtocolVariant::non_strict ? 1 : 2;
  return c.loads[src] >= c.loads[dst] + gap;
}

Simulator::Simulator(Configuration initial, ProtocolVariant variant,
                     RngStream rng, Mode mode)
    : config_(std::move(initial)),
      variant_(variant),
      mode_(mode),
      rng_(rng),
      n_(config_.n()),
      m_(config_.m()),
      index_(config_.loads) {
  load_count_.assign(static_cast<std::size_t>(max_load(config_)) + 2, 0);
  for (auto v : config_.loads) ++load_count_[static_cast<std::size_t>(v)];
  min_load_ = min_load(config_);
  max_load_ = max_load(config_);
  over_scaled_ = overloaded_scaled(config_);
  const double ln_n = std::log(static_cast<double>(n_));
  th_96ln_ = 96.0 * ln_n * static_cast<double>(n_);
  th_8ln_ = 8.0 * ln_n * static_cast<double>(n_);
  if (mode_ == Mode::labeled) {
    positions_.reserve(static_cast<std::size_t>(m_));
    for (std::size_t b = 0; b < config_.loads.size(); ++b)
      for (std::int64_t j = 0; j < config_.loads[b]; ++j)
        positions_.push_back(static_cast<std::uint32_t>(b));
  }
}

const std::vector<std::uint32_t>& Simulator::ball_positions() const {
  if (mode_ != Mode::labeled)
    throw std::logic_error("ball_positions: simulator is in anonymous mode");
  return positions_;
}

std::int64_t Simulator::current_disc_scaled() const {
  const std::int64_t hi = max_load_ * n_ - m_;
  const std::int64_t lo = m_ - min_load_ * n_;
  return hi > lo ? hi : lo;
}

void Simulator::move_ball(std::size_t src, std::size_t dst) {
  auto& ls = config_.loads[src];
  auto& ld = config_.loads[dst];

  // overloaded balls, scaled by n: recompute the two affected terms
  auto over_term = [this](std::int64_t load) {
    std::int64_t d = load * n_ - m_;
    return d > 0 ? d : 0;
  };
  over_scaled_ -= over_term(ls) + over_term(ld);

  --load_count_[static_cast<std::size_t>(ls)];
  --ls;
  ++load_count_[static_cast<std::size_t>(ls)];
  --load_count_[static_cast<std::size_t>(ld)];
  ++ld;
  if (static_cast<std::size_t>(ld) >= load_count_.size())
    load_count_.resize(static_cast<std::size_t>(ld) + 1, 0);
  ++load_count_[static_cast<std::size_t>(ld)];

  over_scaled_ += over_term(ls) + over_term(ld);

  if (ld > max_load_) max_load_ = ld;
  if (ls < min_load_) min_load_ = ls;
  while (load_count_[static_cast<std::size_t>(max_load_)] == 0) --max_load_;
  while (load_count_[static_cast<std::size_t>(min_load_)] == 0) ++min_load_;

  if (mode_ == Mode::anonymous) {
    index_.update(src, -1);
    index_.update(dst, +1);
  }
}

Event Simulator::step() {
  if (m_ < 1) throw std::logic_error("step: no balls in the system");
  Event ev;
  ev.holding_time = rng_.exponential(static_cast<double>(m_));
  clock_ += ev.holding_time;
  ++events_;

  const auto r = static_cast<std::int64_t>(
      rng_.uniform_below(static_cast<std::uint64_t>(m_)));
  std::size_t ball = 0;
  if (mode_ == Mode::labeled) {
    ball = static_cast<std::size_t>(r);
    ev.src = positions_[ball];
  } else {
    ev.src = index_.locate(r);
  }
  ev.dst = sample_uniform_bin(static_cast<std::size_t>(n_), rng_);
  ev.moved = attempt_move(config_, ev.src, ev.dst, variant_);
  if (ev.moved) {
    move_ball(ev.src, ev.dst);
    if (mode_ == Mode::labeled)
      positions_[ball] = static_cast<std::uint32_t>(ev.dst);
  }
  return ev;
}

void Simulator::apply_external_move(std::size_t src, std::size_t dst) {
  if (mode_ == Mode::labeled)
    throw std::logic_error("apply_external_move: labeled mode not supported");
  if (src >= config_.loads.size() || dst >= config_.loads.size() || src == dst)
    throw std::invalid_argument("apply_external_move: bad bins");
  if (config_.loads[src] < 1)
    throw std::invalid_argument("apply_external_move: source bin is empty");
  move_ball(src, dst);
}

void Simulator::record_markers(PhaseReport& r) const {
  const std::int64_t d = current_disc_scaled();
  const double t = clock_;
  if (!r.t_disc_96ln && static_cast<double>(d) <= th_96ln_) r.t_disc_96ln = t;
  if (!r.t_disc_half_avg && 2 * d <= m_) r.t_disc_half_avg = t;
  if (!r.t_disc_8ln && static_cast<double>(d) <= th_8ln_) r.t_disc_8ln = t;
  if (!r.t_overloaded_n && over_scaled_ <= n_ * n_) r.t_overloaded_n = t;
  if (!r.t_disc_le1 && d <= n_) r.t_disc_le1 = t;
  if (!r.t_perfect && d < n_) r.t_perfect = t;
}

PhaseReport Simulator::run_impl(
    const std::function<bool(const Configuration&)>* stop, Caps caps) {
  PhaseReport report;
  record_markers(report);
  auto done = [&] {
    if (stop) return (*stop)(config_);
    return current_disc_scaled() < n_;
  };
  while (!done()) {
    if (events_ >= caps.max_events || clock_ >= caps.max_clock) {
      report.truncated = true;
      break;
    }
    step();
    record_markers(report);
  }
  report.events = events_;
  report.clock = clock_;
  report.final_config = config_;
  return report;
}

PhaseReport Simulator::run_until(
    const std::function<bool(const Configuration&)>& stop, Caps caps) {
  return run_impl(&stop, caps);
}

PhaseReport Simulator::run_with_markers(Caps caps) {
  return run_impl(nullptr, caps);
}

}  // namespace rls
