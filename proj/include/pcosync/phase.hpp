#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace pcosync {

/// Oscillator phases live on the unit circle [0,1); a full cycle has length 1.
/// Raw arithmetic (drift, adjustments) produces unwrapped values which are
/// normalized back into the domain with wrap_phase.
inline double wrap_phase(double x) {
  if (!std::isfinite(x)) {
    throw std::domain_error("wrap_phase: non-finite phase value");
  }
  double w = x - std::floor(x);
  if (w >= 1.0) w -= 1.0;  // floor rounding can land exactly on 1
  if (w < 0.0) w = 0.0;
  return w;
}

/// Forward arc from phase a to phase b, walking in the direction of
/// increasing phase. Equal phases map to 0 so that a fully synchronized
/// network has no residual arc.
inline double gap(double theta_a, double theta_b) {
  if (theta_b > theta_a) return theta_b - theta_a;
  if (theta_a > theta_b) return 1.0 - (theta_a - theta_b);
  return 0.0;
}

/// Permutation of oscillator indices (0-based) in ascending phase order,
/// ties broken by ascending index.
inline std::vector<std::size_t> order_by_phase(const std::vector<double>& phases) {
  if (phases.empty()) {
    throw std::invalid_argument("order_by_phase: empty phase vector");
  }
  std::vector<std::size_t> idx(phases.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return phases[a] < phases[b]; });
  return idx;
}

/// Length of the smallest circular arc containing every phase: one minus the
/// largest gap between cyclically adjacent phases in sorted order. Zero for a
/// single oscillator or a fully coincident network; always < 1 otherwise.
inline double containing_arc(const std::vector<double>& phases) {
  if (phases.empty()) {
    throw std::invalid_argument("containing_arc: empty phase vector");
  }
  const std::size_t n = phases.size();
  if (n == 1) return 0.0;

  std::vector<double> sorted(phases);
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) return 0.0;  // all coincident

  double max_gap = gap(sorted[n - 1], sorted[0]);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    max_gap = std::max(max_gap, gap(sorted[i], sorted[i + 1]));
  }
  return 1.0 - max_gap;
}

}  // namespace pcosync
