#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pcosync/continuity.hpp"
#include "pcosync/phase.hpp"
#include "pcosync/prc.hpp"
#include "pcosync/topology.hpp"

namespace pcosync {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Algorithm { delay_advance, peskin, mirollo_strogatz, rfa };

struct AlgorithmConfig {
  Algorithm kind = Algorithm::delay_advance;
  double refractory = 0.0;  // delay-advance only
  double epsilon = 0.002;   // state-map increment
  double gamma = 3.0;       // peskin
  double b = 5.0;           // mirollo-strogatz

  bool is_state_map() const { return kind != Algorithm::delay_advance; }

  StateMapParams state_map_params() const {
    StateMapParams p;
    p.epsilon = epsilon;
    p.gamma = gamma;
    p.b = b;
    switch (kind) {
      case Algorithm::peskin: p.curve = StateCurve::peskin; break;
      case Algorithm::mirollo_strogatz: p.curve = StateCurve::mirollo_strogatz; break;
      case Algorithm::rfa: p.curve = StateCurve::rfa; break;
      case Algorithm::delay_advance:
        throw std::logic_error("state_map_params: delay_advance has no state map");
    }
    return p;
  }
};

/// Coupling strength source for delay-advance runs: a constant alpha or an
/// independent draw from (lo, hi] at every pulse reception.
struct AlphaSchedule {
  enum class Kind { constant, random } kind = Kind::constant;
  double lo = 0.0;
  double hi = 1.0;
  std::uint64_t seed = 0;  // 0: derive from the initial-phase seed
};

/// Initial phases: explicit list, or N uniform draws from an arc of the
/// given length starting at arc_offset.
struct InitialPhases {
  std::vector<double> explicit_phases;
  std::uint64_t seed = 1;
  double arc_length = 0.4;
  double arc_offset = 0.0;
};

struct SimConfig {
  Graph graph;
  AlgorithmConfig algorithm;
  double alpha = 0.5;
  ContinuityConfig continuity;
  InitialPhases initial;
  double horizon = 60.0;
  double sample_dt = 0.01;
  AlphaSchedule alpha_schedule;
  bool theorem_check = false;
  bool allow_disconnected = false;
  bool early_stop = true;
  double sync_tol = 1e-6;
  double sync_hold = -1.0;  // < 0: one fundamental period

  std::size_t n() const { return graph.n; }
  double hold() const { return sync_hold < 0.0 ? 1.0 / continuity.omega0 : sync_hold; }
};

struct OscillatorState {
  double theta = 0.0;
  AdjustmentPlan plan;
  double plan_alpha = 0.0;  // coupling used for plan.psi
  RfaAccumulator rfa;
  std::optional<double> last_fire_time;

  double rate(double omega0) const { return plan.in_flight() ? plan.omega : omega0; }
};

enum class EventKind { fire, plan_expiry, sample };

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::sample;
  std::size_t oscillator = 0;  // unused for sample events
};

/// Effective coupling of an adjustment, logged when the plan is superseded by
/// a new pulse-driven replan or by the oscillator's own firing. t0 is the
/// time the plan ran; tau_i its planned duration (0 for jumps).
struct CouplingRecord {
  std::size_t oscillator = 0;
  double fire_time = 0.0;
  double t0 = 0.0;
  double tau_i = 0.0;
  double alpha_effective = 0.0;
};

struct TraceSample {
  double time = 0.0;
  std::vector<double> theta;
  std::vector<double> omega;
};

struct FiringRecord {
  double time = 0.0;
  std::size_t oscillator = 0;
};

struct TraceStats {
  std::size_t pulses_delivered = 0;
  std::size_t batches = 0;
};

/// Recorded run: a sample row at t = 0, at every event batch, at every sample
/// tick, and at the end of the run; plus every firing and coupling record.
struct Trace {
  std::size_t n = 0;
  std::vector<TraceSample> samples;
  std::vector<FiringRecord> firings;
  std::vector<CouplingRecord> couplings;
  TraceStats stats;
};

/// Smallest dt > 0 at which the oscillator's phase reaches the threshold 1,
/// solved in closed form over the plan segment and the fundamental segment.
inline std::optional<double> time_to_threshold(const OscillatorState& osc,
                                               double omega0) {
  constexpr double kZeroTol = 1e-12;
  double theta = osc.theta;
  double after_plan = 0.0;
  if (osc.plan.in_flight()) {
    if (osc.plan.omega > 0.0) {
      const double dt = (1.0 - theta) / osc.plan.omega;
      if (dt <= osc.plan.remaining) return dt;
    }
    double theta_end = theta + osc.plan.omega * osc.plan.remaining;
    if (theta_end < -kZeroTol) {
      throw SimulationError("time_to_threshold: plan drives phase below zero");
    }
    theta = std::max(theta_end, 0.0);
    after_plan = osc.plan.remaining;
  }
  if (!(omega0 > 0.0)) return std::nullopt;
  return after_plan + (1.0 - theta) / omega0;
}

class Simulation {
 public:
  static constexpr double kTimeTol = 1e-12;

  explicit Simulation(SimConfig cfg) : cfg_(std::move(cfg)) {
    validate();
    const std::size_t n = cfg_.n();

    std::vector<double> phases = cfg_.initial.explicit_phases;
    if (phases.empty()) {
      std::mt19937_64 rng(cfg_.initial.seed);
      phases.resize(n);
      for (auto& th : phases) {
        th = wrap_phase(cfg_.initial.arc_offset + unit_double(rng) * cfg_.initial.arc_length);
      }
    }

    if (cfg_.theorem_check) {
      const double arc0 = containing_arc(phases);
      if (!(arc0 < 0.5)) {
        throw std::invalid_argument(
            "theorem_check: initial containing arc must be < 1/2");
      }
      if (!(cfg_.algorithm.refractory + arc0 < 1.0)) {
        throw std::invalid_argument(
            "theorem_check: refractory period incompatible with initial arc");
      }
    }

    osc_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      osc_[i].theta = phases[i];
      osc_[i].plan = null_plan(cfg_.continuity.omega0, 0.0);
    }

    std::uint64_t alpha_seed = cfg_.alpha_schedule.seed;
    if (alpha_seed == 0) {
      alpha_seed = cfg_.initial.seed * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL;
    }
    alpha_rng_.seed(alpha_seed);

    trace_.n = n;
    record_sample();
    update_sync_tracking();
    if (cfg_.horizon <= 0.0 || finished_) finished_ = true;
  }

  bool finished() const { return finished_; }
  double now() const { return t_; }
  const Trace& trace() const { return trace_; }
  const std::vector<OscillatorState>& oscillators() const { return osc_; }
  const SimConfig& config() const { return cfg_; }

  /// Advance to the next event instant and process the whole batch there.
  /// Returns the events processed; empty once the run has finished.
  std::vector<Event> step() {
    if (finished_) return {};

    double t_next = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < osc_.size(); ++i) {
      if (osc_[i].plan.in_flight()) {
        t_next = std::min(t_next, t_ + osc_[i].plan.remaining);
      }
      if (auto dt = time_to_threshold(osc_[i], cfg_.continuity.omega0)) {
        t_next = std::min(t_next, t_ + *dt);
      }
    }
    const double tick = static_cast<double>(next_tick_) * cfg_.sample_dt;
    t_next = std::min(t_next, tick);

    if (t_next > cfg_.horizon) {
      advance_to(cfg_.horizon);
      record_sample();
      finished_ = true;
      return {};
    }

    std::vector<Event> batch;

    // Firers are identified by closed-form crossing times before advancing.
    std::vector<std::size_t> firers;
    std::vector<bool> was_in_flight(osc_.size());
    for (std::size_t i = 0; i < osc_.size(); ++i) {
      was_in_flight[i] = osc_[i].plan.in_flight();
      if (auto dt = time_to_threshold(osc_[i], cfg_.continuity.omega0)) {
        if (t_ + *dt <= t_next + kTimeTol) firers.push_back(i);
      }
    }

    advance_to(t_next);

    for (std::size_t i = 0; i < osc_.size(); ++i) {
      if (was_in_flight[i] && osc_[i].plan.remaining <= kTimeTol) {
        expire_plan(osc_[i]);
        batch.push_back({t_, EventKind::plan_expiry, i});
      }
    }

    // Anything fp rounding pushed past the threshold crossed within tolerance.
    for (std::size_t i = 0; i < osc_.size(); ++i) {
      if (osc_[i].theta >= 1.0 &&
          std::find(firers.begin(), firers.end(), i) == firers.end()) {
        firers.push_back(i);
      }
    }
    std::sort(firers.begin(), firers.end());

    process_instant(firers, batch);

    while (static_cast<double>(next_tick_) * cfg_.sample_dt <= t_ + kTimeTol) {
      batch.push_back({t_, EventKind::sample, 0});
      ++next_tick_;
    }

    record_sample();
    ++trace_.stats.batches;
    update_sync_tracking();
    if (t_ >= cfg_.horizon) finished_ = true;
    return batch;
  }

  static Trace run(const SimConfig& cfg) {
    Simulation sim(cfg);
    while (!sim.finished()) sim.step();
    return std::move(sim.trace_);
  }

 private:
  static double unit_double(std::mt19937_64& rng) {  // [0,1)
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }

  void validate() const {
    cfg_.continuity.validate();
    const std::size_t n = cfg_.n();
    if (n == 0) throw std::invalid_argument("sim: graph must have n >= 1");
    if (!cfg_.allow_disconnected && !is_strongly_connected(cfg_.graph)) {
      throw std::invalid_argument(
          "sim: graph is not strongly connected (set allow_disconnected to override)");
    }
    if (!(cfg_.alpha > 0.0 && cfg_.alpha <= 1.0)) {
      throw std::invalid_argument("sim: alpha must be in (0,1]");
    }
    if (cfg_.algorithm.is_state_map()) {
      if (cfg_.alpha != 1.0) {
        throw std::invalid_argument(
            "sim: state-map algorithms require alpha = 1 (the state increment "
            "epsilon sets the coupling)");
      }
      if (cfg_.alpha_schedule.kind != AlphaSchedule::Kind::constant) {
        throw std::invalid_argument(
            "sim: state-map algorithms do not support an alpha schedule");
      }
      if (!(cfg_.algorithm.epsilon > 0.0)) {
        throw std::invalid_argument("sim: epsilon must be > 0");
      }
      if (cfg_.algorithm.kind == Algorithm::peskin && !(cfg_.algorithm.gamma > 0.0)) {
        throw std::invalid_argument("sim: gamma must be > 0");
      }
      if (cfg_.algorithm.kind == Algorithm::mirollo_strogatz && !(cfg_.algorithm.b > 0.0)) {
        throw std::invalid_argument("sim: b must be > 0");
      }
    } else {
      if (!(cfg_.algorithm.refractory >= 0.0 && cfg_.algorithm.refractory < 1.0)) {
        throw std::invalid_argument("sim: refractory period must be in [0,1)");
      }
    }
    if (cfg_.alpha_schedule.kind == AlphaSchedule::Kind::random) {
      if (!(cfg_.alpha_schedule.lo >= 0.0 && cfg_.alpha_schedule.lo < cfg_.alpha_schedule.hi &&
            cfg_.alpha_schedule.hi <= 1.0)) {
        throw std::invalid_argument("sim: random alpha bounds must satisfy 0 <= lo < hi <= 1");
      }
    }
    if (!cfg_.initial.explicit_phases.empty()) {
      if (cfg_.initial.explicit_phases.size() != n) {
        throw std::invalid_argument("sim: initial phase count must equal n");
      }
      for (double th : cfg_.initial.explicit_phases) {
        if (!(th >= 0.0 && th < 1.0)) {
          throw std::invalid_argument("sim: initial phases must lie in [0,1)");
        }
      }
    } else {
      if (!(cfg_.initial.arc_length >= 0.0 && cfg_.initial.arc_length < 1.0)) {
        throw std::invalid_argument("sim: arc_length must lie in [0,1)");
      }
      if (!std::isfinite(cfg_.initial.arc_offset)) {
        throw std::invalid_argument("sim: arc_offset must be finite");
      }
    }
    if (!(cfg_.sample_dt > 0.0)) throw std::invalid_argument("sim: sample_dt must be > 0");
    if (cfg_.horizon < 0.0) throw std::invalid_argument("sim: horizon must be >= 0");
    if (!(cfg_.sync_tol > 0.0)) throw std::invalid_argument("sim: sync_tol must be > 0");
  }

  void advance_to(double t_next) {
    const double dt = t_next - t_;
    if (dt < 0.0) throw SimulationError("advance_to: event time moved backward");
    for (auto& o : osc_) {
      o.theta += o.rate(cfg_.continuity.omega0) * dt;
      if (o.plan.in_flight()) o.plan.remaining = std::max(o.plan.remaining - dt, 0.0);
      if (o.theta < 0.0) {
        if (o.theta < -kTimeTol) {
          throw SimulationError("advance_to: phase crossed below zero");
        }
        o.theta = 0.0;
      }
    }
    t_ = t_next;
  }

  static void expire_plan(OscillatorState& o) {
    // Back to the fundamental frequency; keep psi/duration/started_at so the
    // completed adjustment is still accounted for when superseded.
    o.plan.remaining = 0.0;
  }

  void maybe_record_plan(std::size_t i) {
    const AdjustmentPlan& p = osc_[i].plan;
    if (p.psi == 0.0) return;
    const double t0 = t_ - p.started_at;
    const double fraction = realized_fraction(p, t0);
    if (fraction <= 0.0) return;  // superseded in the same instant: realized nothing
    trace_.couplings.push_back({i, t_, t0, p.duration, fraction * osc_[i].plan_alpha});
  }

  /// Replace oscillator i's plan with a fresh one for psi. Returns true when
  /// an instantaneous jump carried the phase to the threshold.
  bool apply_adjustment(std::size_t i, double psi, double alpha_used) {
    maybe_record_plan(i);
    osc_[i].plan = plan(psi, cfg_.continuity, t_);
    osc_[i].plan_alpha = alpha_used;
    if (cfg_.continuity.mode == ContinuityMode::jump && psi != 0.0) {
      osc_[i].theta += psi;
      if (osc_[i].theta < 0.0) {
        if (osc_[i].theta < -kTimeTol) {
          throw SimulationError("apply_adjustment: jump drove phase below zero");
        }
        osc_[i].theta = 0.0;
      }
      if (osc_[i].theta >= 1.0) return true;
    }
    return false;
  }

  double draw_alpha() {
    if (cfg_.alpha_schedule.kind == AlphaSchedule::Kind::constant) return cfg_.alpha;
    const double u = 1.0 - unit_double(alpha_rng_);  // (0,1]
    return cfg_.alpha_schedule.lo + (cfg_.alpha_schedule.hi - cfg_.alpha_schedule.lo) * u;
  }

  /// Process all firings and zero-delay pulse deliveries at the current
  /// instant. Firings come before receptions; pulses are delivered in
  /// emission order; absorption-triggered firings cascade, each oscillator
  /// firing at most once per instant. A pulse landing at the instant an
  /// oscillator fires folds into that firing: the firer does not process it.
  /// Without this, simultaneous state-map firers would re-excite each other
  /// at phase zero and a synchronized cluster could never stay exact.
  void process_instant(const std::vector<std::size_t>& initial_firers,
                       std::vector<Event>& batch) {
    std::deque<std::size_t> fire_queue(initial_firers.begin(), initial_firers.end());
    std::deque<std::size_t> pulse_queue;
    std::vector<bool> fired(osc_.size(), false);

    auto trigger_fire = [&](std::size_t j) { fire_queue.push_back(j); };

    while (!fire_queue.empty() || !pulse_queue.empty()) {
      while (!fire_queue.empty()) {
        const std::size_t i = fire_queue.front();
        fire_queue.pop_front();
        if (fired[i]) continue;
        fired[i] = true;
        do_fire(i);
        batch.push_back({t_, EventKind::fire, i});
        pulse_queue.push_back(i);
      }
      if (pulse_queue.empty()) break;
      const std::size_t sender = pulse_queue.front();
      pulse_queue.pop_front();
      for (std::size_t j : cfg_.graph.out_edges[sender]) {
        ++trace_.stats.pulses_delivered;
        if (fired[j]) continue;  // folded into j's firing at this instant
        deliver_pulse(j, trigger_fire);
      }
    }
  }

  void do_fire(std::size_t i) {
    // The reset is a threshold wrap, not a new pulse: an in-flight rate
    // adjustment keeps running across it. Cancelling here would strand the
    // advance corrections of heavily-refractory constant-time networks at an
    // O(arc/tau) realized fraction and stall convergence near the fixed point.
    osc_[i].theta = 0.0;
    osc_[i].last_fire_time = t_;
    trace_.firings.push_back({t_, i});

    if (cfg_.algorithm.kind == Algorithm::rfa) {
      auto [total, drained] = rfa_flush(osc_[i].rfa);
      osc_[i].rfa = drained;
      if (total != 0.0) {
        // The flushed total is a fresh adjustment from phase zero; it
        // supersedes whatever was left of the previous flush plan.
        if (apply_adjustment(i, total, 1.0)) {
          throw SimulationError(
              "rfa flush adjustment reached the firing threshold in one instant");
        }
      }
    }
  }

  template <typename TriggerFire>
  void deliver_pulse(std::size_t j, TriggerFire&& trigger_fire) {
    const double theta = osc_[j].theta;
    switch (cfg_.algorithm.kind) {
      case Algorithm::delay_advance: {
        const PulseResponse r =
            prc_delay_advance(theta, {cfg_.algorithm.refractory});
        if (r.phi == 0.0) return;  // refractory or exactly at zero: no response
        const double alpha = draw_alpha();
        const double psi = alpha * r.phi;
        if (psi == 0.0) return;
        if (apply_adjustment(j, psi, alpha)) trigger_fire(j);
        return;
      }
      case Algorithm::peskin:
      case Algorithm::mirollo_strogatz: {
        const PulseResponse r = state_map_jump(theta, cfg_.algorithm.state_map_params());
        if (r.absorb) {
          trigger_fire(j);
          return;
        }
        if (r.phi == 0.0) return;
        if (apply_adjustment(j, r.phi, 1.0)) {
          throw SimulationError("state-map jump reached the firing threshold");
        }
        return;
      }
      case Algorithm::rfa:
        osc_[j].rfa = rfa_record(osc_[j].rfa, theta, cfg_.algorithm.state_map_params());
        return;
    }
  }

  void record_sample() {
    TraceSample row;
    row.time = t_;
    row.theta.reserve(osc_.size());
    row.omega.reserve(osc_.size());
    for (const auto& o : osc_) {
      row.theta.push_back(o.theta);
      row.omega.push_back(o.rate(cfg_.continuity.omega0));
    }
    if (!trace_.samples.empty() && trace_.samples.back().time == t_) {
      trace_.samples.back() = std::move(row);
    } else {
      trace_.samples.push_back(std::move(row));
    }
  }

  void update_sync_tracking() {
    if (!cfg_.early_stop) return;
    std::vector<double> phases;
    phases.reserve(osc_.size());
    for (const auto& o : osc_) phases.push_back(o.theta);
    if (containing_arc(phases) < cfg_.sync_tol) {
      if (below_tol_since_ < 0.0) below_tol_since_ = t_;
      if (t_ - below_tol_since_ >= cfg_.hold()) finished_ = true;
    } else {
      below_tol_since_ = -1.0;
    }
  }

  SimConfig cfg_;
  std::vector<OscillatorState> osc_;
  double t_ = 0.0;
  std::uint64_t next_tick_ = 1;
  Trace trace_;
  std::mt19937_64 alpha_rng_;
  bool finished_ = false;
  double below_tol_since_ = -1.0;
};

inline Trace run(const SimConfig& cfg) { return Simulation::run(cfg); }

}  // namespace pcosync
