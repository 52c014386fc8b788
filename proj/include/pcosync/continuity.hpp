#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

namespace pcosync {

/// How a desired phase change psi is realized over time.
///   jump:               applied instantaneously (the classic discontinuous model)
///   constant_frequency: rate offset fixed at +/- omega_a, duration |psi|/omega_a
///   constant_time:      duration fixed at tau, rate offset psi/tau
enum class ContinuityMode { jump, constant_frequency, constant_time };

struct ContinuityConfig {
  ContinuityMode mode = ContinuityMode::jump;
  double omega_a_up = 0.0;    // rate boost when psi > 0 (cycles/s)
  double omega_a_down = 0.0;  // rate cut when psi < 0 (cycles/s)
  double tau_fixed = 0.0;     // fixed adjustment duration (s)
  double omega0 = 1.0;        // fundamental frequency (cycles/s)

  void validate() const {
    if (!(omega0 > 0.0)) {
      throw std::invalid_argument("continuity: omega0 must be > 0");
    }
    if (mode == ContinuityMode::constant_frequency &&
        (!(omega_a_up > 0.0) || !(omega_a_down > 0.0))) {
      throw std::invalid_argument(
          "continuity: constant_frequency mode requires omega_a > 0");
    }
    if (mode == ContinuityMode::constant_time && !(tau_fixed > 0.0)) {
      throw std::invalid_argument("continuity: constant_time mode requires tau > 0");
    }
  }
};

/// An in-flight phase adjustment: evolve at rate omega for `remaining`
/// seconds, then return to the fundamental frequency. A jump or an expired
/// plan has remaining = 0 but keeps psi/duration/started_at so the realized
/// fraction can still be accounted for when the plan is superseded.
struct AdjustmentPlan {
  double omega = 1.0;      // evolution rate while remaining > 0 (may be negative)
  double remaining = 0.0;  // time left at omega (s)
  double duration = 0.0;   // original adjustment duration tau_i (0 for jumps)
  double psi = 0.0;        // total phase change this plan realizes
  double started_at = 0.0;

  bool in_flight() const { return remaining > 0.0; }
};

inline AdjustmentPlan null_plan(double omega0, double now = 0.0) {
  return {omega0, 0.0, 0.0, 0.0, now};
}

/// Turn a desired phase change psi into an adjustment plan.
inline AdjustmentPlan plan(double psi, const ContinuityConfig& cfg, double now) {
  if (!std::isfinite(psi)) throw std::domain_error("plan: non-finite psi");
  if (psi == 0.0) return null_plan(cfg.omega0, now);
  switch (cfg.mode) {
    case ContinuityMode::jump:
      // Caller applies psi instantaneously; the plan only carries accounting.
      return {cfg.omega0, 0.0, 0.0, psi, now};
    case ContinuityMode::constant_frequency: {
      const double omega_a = psi > 0.0 ? cfg.omega_a_up : cfg.omega_a_down;
      const double tau_i = std::abs(psi) / omega_a;
      const double omega_i = psi > 0.0 ? cfg.omega0 + omega_a : cfg.omega0 - omega_a;
      return {omega_i, tau_i, tau_i, psi, now};
    }
    case ContinuityMode::constant_time:
      return {cfg.omega0 + psi / cfg.tau_fixed, cfg.tau_fixed, cfg.tau_fixed, psi, now};
  }
  throw std::logic_error("plan: unknown continuity mode");
}

/// Fraction of a plan's psi realized after `elapsed` seconds. Jumps and
/// completed plans realize everything; a plan with no adjustment counts as
/// fully realized (nothing to interrupt).
inline double realized_fraction(const AdjustmentPlan& old_plan, double elapsed) {
  if (elapsed < 0.0) throw std::invalid_argument("realized_fraction: negative elapsed");
  if (old_plan.duration <= 0.0) return 1.0;
  return std::min(elapsed / old_plan.duration, 1.0);
}

/// Discard the remainder of an in-flight plan and plan the freshly determined
/// psi instead. Returns the new plan and the fraction of the old psi that was
/// realized before the interruption.
inline std::pair<AdjustmentPlan, double> replan(const AdjustmentPlan& old_plan,
                                                double elapsed, double new_psi,
                                                const ContinuityConfig& cfg, double now) {
  const double fraction = realized_fraction(old_plan, elapsed);
  return {plan(new_psi, cfg, now), fraction};
}

/// Effective coupling strength of an adjustment that ran for t0 seconds out
/// of a planned tau_i: alpha scaled by the realized fraction, capped at alpha
/// since a completed adjustment realizes exactly psi. tau_i = 0 is the jump
/// limit (instantaneous completion).
inline double effective_coupling(double t0, double tau_i, double alpha) {
  if (t0 < 0.0 || tau_i < 0.0) {
    throw std::invalid_argument("effective_coupling: negative interval");
  }
  if (t0 == 0.0) return 0.0;
  if (tau_i == 0.0) return alpha;
  return std::min(t0 / tau_i, 1.0) * alpha;
}

/// Unwrapped phase reached after dt seconds under a plan: the plan segment at
/// plan.omega, then fundamental drift. The caller handles threshold wrapping.
inline double phase_at(const AdjustmentPlan& p, double theta_start, double dt,
                       double omega0) {
  if (dt < 0.0) throw std::invalid_argument("phase_at: negative dt");
  const double in_plan = std::min(dt, p.remaining);
  return theta_start + p.omega * in_plan + omega0 * std::max(dt - p.remaining, 0.0);
}

}  // namespace pcosync
