#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pcosync/engine.hpp"
#include "pcosync/phase.hpp"

namespace pcosync {

struct ArcPoint {
  double time = 0.0;
  double lambda = 0.0;
};

/// Containing-arc length as a function of time, one point per trace sample
/// (samples cover every event batch, so firing instants are included).
struct ArcSeries {
  std::vector<ArcPoint> points;
};

inline ArcSeries arc_series(const Trace& trace) {
  if (trace.samples.empty()) {
    throw std::invalid_argument("arc_series: empty trace");
  }
  ArcSeries series;
  series.points.reserve(trace.samples.size());
  for (const auto& s : trace.samples) {
    series.points.push_back({s.time, containing_arc(s.theta)});
  }
  return series;
}

struct SyncReport {
  bool synced = false;
  std::optional<double> sync_time;
  double tolerance = 0.0;
  std::optional<std::size_t> cycles_to_sync;
};

/// First time the arc drops below tol and stays there for `hold` seconds of
/// recorded series. Consecutive below-tolerance points are treated as
/// below-tolerance throughout the interval between them.
inline SyncReport sync_time(const ArcSeries& series, double tol, double hold) {
  if (!(tol > 0.0)) throw std::invalid_argument("sync_time: tol must be > 0");
  if (hold < 0.0) throw std::invalid_argument("sync_time: hold must be >= 0");
  SyncReport report;
  report.tolerance = tol;

  std::optional<double> run_start;
  double run_last = 0.0;
  auto finish_run = [&]() -> bool {
    return run_start && run_last - *run_start >= hold;
  };
  for (const auto& p : series.points) {
    if (p.lambda < tol) {
      if (!run_start) run_start = p.time;
      run_last = p.time;
    } else {
      if (finish_run()) break;
      run_start.reset();
    }
  }
  if (finish_run()) {
    report.synced = true;
    report.sync_time = *run_start;
  }
  return report;
}

struct MonotonicityViolation {
  double time = 0.0;
  double previous = 0.0;
  double current = 0.0;
};

/// Cycle boundaries are the instants at which every oscillator has fired at
/// least once since the previous boundary (starting from t = 0).
struct CycleReport {
  bool monotone = true;
  std::vector<double> boundary_times;
  std::vector<MonotonicityViolation> violations;
  std::size_t multi_fire_count = 0;  // oscillators firing more than once in a cycle
};

inline std::vector<double> cycle_boundaries(const std::vector<FiringRecord>& firings,
                                            std::size_t n,
                                            std::size_t* multi_fire_count = nullptr) {
  std::vector<double> boundaries;
  std::vector<std::size_t> fired_count(n, 0);
  std::size_t distinct = 0;
  for (const auto& f : firings) {
    if (f.oscillator >= n) throw std::invalid_argument("cycle_boundaries: bad oscillator index");
    if (fired_count[f.oscillator]++ == 0) {
      ++distinct;
    } else if (multi_fire_count) {
      ++(*multi_fire_count);
    }
    if (distinct == n) {
      boundaries.push_back(f.time);
      std::fill(fired_count.begin(), fired_count.end(), 0);
      distinct = 0;
    }
  }
  return boundaries;
}

inline double arc_at(const ArcSeries& series, double time) {
  auto it = std::lower_bound(series.points.begin(), series.points.end(), time,
                             [](const ArcPoint& p, double t) { return p.time < t; });
  if (it == series.points.end() || (it->time != time && it != series.points.begin())) {
    // No exact row (shouldn't happen for boundary instants); take the last
    // point at or before the requested time.
    --it;
  }
  return it->lambda;
}

inline CycleReport cycle_monotonicity(const ArcSeries& series,
                                      const std::vector<FiringRecord>& firings,
                                      std::size_t n, double tol = 1e-12) {
  if (series.points.empty()) throw std::invalid_argument("cycle_monotonicity: empty series");
  CycleReport report;
  report.boundary_times = cycle_boundaries(firings, n, &report.multi_fire_count);

  double prev = series.points.front().lambda;  // arc at t = 0
  for (double bt : report.boundary_times) {
    const double cur = arc_at(series, bt);
    if (cur > prev + tol) {
      report.monotone = false;
      report.violations.push_back({bt, prev, cur});
    }
    prev = cur;
  }
  return report;
}

struct CouplingSummary {
  std::size_t count = 0;
  double min_alpha_e = 0.0;
  double max_alpha_e = 0.0;
  double mean_alpha_e = 0.0;
  double interrupted_fraction = 0.0;
};

inline CouplingSummary coupling_summary(const Trace& trace) {
  CouplingSummary s;
  if (trace.couplings.empty()) return s;
  s.count = trace.couplings.size();
  double sum = 0.0;
  std::size_t interrupted = 0;
  s.min_alpha_e = s.max_alpha_e = trace.couplings.front().alpha_effective;
  for (const auto& r : trace.couplings) {
    s.min_alpha_e = std::min(s.min_alpha_e, r.alpha_effective);
    s.max_alpha_e = std::max(s.max_alpha_e, r.alpha_effective);
    sum += r.alpha_effective;
    if (r.tau_i > 0.0 && r.t0 < r.tau_i) ++interrupted;
  }
  s.mean_alpha_e = sum / static_cast<double>(s.count);
  s.interrupted_fraction = static_cast<double>(interrupted) / static_cast<double>(s.count);
  return s;
}

/// Sync report over a full trace, with the number of completed all-fired
/// cycles before synchronization.
inline SyncReport sync_report(const Trace& trace, double tol, double hold) {
  SyncReport report = sync_time(arc_series(trace), tol, hold);
  if (report.synced) {
    const auto boundaries = cycle_boundaries(trace.firings, trace.n);
    report.cycles_to_sync = static_cast<std::size_t>(
        std::count_if(boundaries.begin(), boundaries.end(),
                      [&](double t) { return t <= *report.sync_time; }));
  }
  return report;
}

}  // namespace pcosync
