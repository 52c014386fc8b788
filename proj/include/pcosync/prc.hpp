#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace pcosync {

/// Result of evaluating a synchronization algorithm for one received pulse.
/// phi is the desired phase change; absorb means the state-map increment
/// reached the firing state and the receiver must fire immediately instead
/// of jumping.
struct PulseResponse {
  double phi = 0.0;
  bool absorb = false;
};

/// Delay-advance response parameters: pulses received at phases below the
/// refractory bound are ignored.
struct DelayAdvanceParams {
  double refractory = 0.0;  // D in [0,1)
};

/// Phase change for the delay-advance response curve: delay toward 0 in the
/// first half-cycle, advance toward 1 in the second, no response in [0,D).
inline PulseResponse prc_delay_advance(double theta, const DelayAdvanceParams& params) {
  if (theta < params.refractory) return {0.0, false};
  if (theta <= 0.5) return {-theta, false};
  return {1.0 - theta, false};
}

/// State-variable curves for the integrate-and-fire style algorithms. Each
/// defines a smooth increasing map f from phase to state and its inverse g.
enum class StateCurve { peskin, mirollo_strogatz, rfa };

struct StateMapParams {
  double epsilon = 0.002;  // state increment per received pulse
  StateCurve curve = StateCurve::peskin;
  double gamma = 3.0;  // peskin curvature
  double b = 5.0;      // mirollo-strogatz curvature
};

/// f(theta): maps a phase to its state value.
///   peskin:            f(theta) = (1 - e^-gamma)(1 - e^(-gamma*theta))
///   mirollo_strogatz:  f(theta) = (1/b) ln(1 + (e^b - 1) theta)
///   rfa:               f(theta) = ln(theta), theta > 0
inline double state_forward(double theta, const StateMapParams& params) {
  switch (params.curve) {
    case StateCurve::peskin:
      return -std::expm1(-params.gamma) * -std::expm1(-params.gamma * theta);
    case StateCurve::mirollo_strogatz:
      return std::log1p(std::expm1(params.b) * theta) / params.b;
    case StateCurve::rfa:
      if (theta <= 0.0) {
        throw std::domain_error("state_forward: rfa curve undefined at theta = 0");
      }
      return std::log(theta);
  }
  throw std::logic_error("state_forward: unknown curve");
}

/// State value at the firing phase; the absorption cutoff for the increment.
inline double state_at_threshold(const StateMapParams& params) {
  switch (params.curve) {
    case StateCurve::peskin: {
      const double c = -std::expm1(-params.gamma);
      return c * c;
    }
    case StateCurve::mirollo_strogatz:
      return 1.0;
    case StateCurve::rfa:
      return 0.0;
  }
  throw std::logic_error("state_at_threshold: unknown curve");
}

/// g(x) = f^-1(x): maps a state value back to a phase in [0,1]. Valid for x
/// in the image of f up to the firing state; beyond that the oscillator must
/// absorb (fire) rather than invert.
inline double state_inverse(double x, const StateMapParams& params) {
  const double x_fire = state_at_threshold(params);
  if (x > x_fire) {
    throw std::domain_error("state_inverse: state " + std::to_string(x) +
                            " beyond firing state; caller must absorb");
  }
  switch (params.curve) {
    case StateCurve::peskin: {
      const double c = -std::expm1(-params.gamma);
      if (x < 0.0) throw std::domain_error("state_inverse: negative peskin state");
      return std::log(c / (c - x)) / params.gamma;
    }
    case StateCurve::mirollo_strogatz:
      if (x < 0.0) throw std::domain_error("state_inverse: negative mirollo-strogatz state");
      return std::expm1(params.b * x) / std::expm1(params.b);
    case StateCurve::rfa:
      return std::exp(x);
  }
  throw std::logic_error("state_inverse: unknown curve");
}

/// One received pulse under a state-map algorithm: increment the state by
/// epsilon and map back. If the incremented state reaches the firing state
/// the receiver absorbs (fires immediately); otherwise phi = g(f(theta) +
/// epsilon) - theta, which is nonnegative since f is increasing.
inline PulseResponse state_map_jump(double theta, const StateMapParams& params) {
  const double x = state_forward(theta, params);
  if (x + params.epsilon >= state_at_threshold(params)) return {0.0, true};
  return {state_inverse(x + params.epsilon, params) - theta, false};
}

/// Reachback accumulator: pulse-induced jumps recorded during a cycle and
/// applied in one total at the oscillator's own firing instant.
struct RfaAccumulator {
  double pending = 0.0;
};

/// Record the jump the oscillator would have made for a pulse received at
/// theta. At theta = 0 the would-be jump theta*(e^epsilon - 1) vanishes, so
/// nothing is recorded; a jump that would overshoot the threshold is capped
/// at the distance to it.
inline RfaAccumulator rfa_record(RfaAccumulator acc, double theta,
                                 const StateMapParams& params) {
  if (params.curve != StateCurve::rfa) {
    throw std::invalid_argument("rfa_record: params must select the rfa curve");
  }
  if (theta <= 0.0) return acc;
  const PulseResponse r = state_map_jump(theta, params);
  acc.pending += r.absorb ? (1.0 - theta) : r.phi;
  return acc;
}

/// Drain the accumulator at the firing instant: the returned total is the
/// phase adjustment to apply for the new cycle.
inline std::pair<double, RfaAccumulator> rfa_flush(RfaAccumulator acc) {
  const double total = acc.pending;
  acc.pending = 0.0;
  return {total, acc};
}

}  // namespace pcosync
