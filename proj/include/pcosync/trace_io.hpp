#pragma once

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcosync/engine.hpp"
#include "pcosync/metrics.hpp"

namespace pcosync {

/// Full-precision decimal formatting: 17 significant digits round-trip a
/// binary64 exactly.
inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_phases_csv(std::ostream& out, const Trace& trace) {
  out << "time";
  for (std::size_t i = 1; i <= trace.n; ++i) out << ",theta_" << i;
  for (std::size_t i = 1; i <= trace.n; ++i) out << ",omega_" << i;
  out << '\n';
  for (const auto& s : trace.samples) {
    out << fmt_double(s.time);
    for (double th : s.theta) out << ',' << fmt_double(th);
    for (double w : s.omega) out << ',' << fmt_double(w);
    out << '\n';
  }
}

inline void write_firings_csv(std::ostream& out, const Trace& trace) {
  out << "time,oscillator\n";
  for (const auto& f : trace.firings) {
    out << fmt_double(f.time) << ',' << (f.oscillator + 1) << '\n';
  }
}

inline void write_arc_csv(std::ostream& out, const ArcSeries& series) {
  out << "time,lambda\n";
  for (const auto& p : series.points) {
    out << fmt_double(p.time) << ',' << fmt_double(p.lambda) << '\n';
  }
}

inline void write_coupling_csv(std::ostream& out, const Trace& trace) {
  out << "oscillator,fire_time,t0,tau_i,alpha_effective\n";
  for (const auto& r : trace.couplings) {
    out << (r.oscillator + 1) << ',' << fmt_double(r.fire_time) << ','
        << fmt_double(r.t0) << ',' << fmt_double(r.tau_i) << ','
        << fmt_double(r.alpha_effective) << '\n';
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

inline double parse_double(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) {
    throw std::invalid_argument("csv line " + std::to_string(line_no) +
                                ": expected a number, got '" + s + "'");
  }
  return v;
}

}  // namespace detail

/// Parse a phases.csv stream back into trace samples (exact values).
inline std::vector<TraceSample> read_phases_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("phases csv: missing header");
  }
  const auto header = detail::split_csv_line(line);
  if (header.size() < 3 || header[0] != "time" || (header.size() - 1) % 2 != 0) {
    throw std::invalid_argument("phases csv: malformed header");
  }
  const std::size_t n = (header.size() - 1) / 2;

  std::vector<TraceSample> samples;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 1 + 2 * n) {
      throw std::invalid_argument("csv line " + std::to_string(line_no) +
                                  ": wrong field count");
    }
    TraceSample s;
    s.time = detail::parse_double(fields[0], line_no);
    for (std::size_t i = 0; i < n; ++i) {
      s.theta.push_back(detail::parse_double(fields[1 + i], line_no));
    }
    for (std::size_t i = 0; i < n; ++i) {
      s.omega.push_back(detail::parse_double(fields[1 + n + i], line_no));
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

inline std::vector<ArcPoint> read_arc_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("time,lambda", 0) != 0) {
    throw std::invalid_argument("arc csv: malformed header");
  }
  std::vector<ArcPoint> points;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 2) {
      throw std::invalid_argument("csv line " + std::to_string(line_no) +
                                  ": wrong field count");
    }
    points.push_back({detail::parse_double(fields[0], line_no),
                      detail::parse_double(fields[1], line_no)});
  }
  return points;
}

inline void write_report(std::ostream& out, const SyncReport& sync,
                         const CycleReport& cycles, const CouplingSummary& coupling) {
  out << "synced: " << (sync.synced ? "true" : "false") << '\n';
  out << "sync_time: " << (sync.sync_time ? fmt_double(*sync.sync_time) : "none") << '\n';
  out << "sync_tolerance: " << fmt_double(sync.tolerance) << '\n';
  out << "cycles_to_sync: "
      << (sync.cycles_to_sync ? std::to_string(*sync.cycles_to_sync) : "none") << '\n';
  out << "cycles_completed: " << cycles.boundary_times.size() << '\n';
  out << "cycle_monotonic: " << (cycles.monotone ? "true" : "false") << '\n';
  out << "monotonicity_violations: " << cycles.violations.size() << '\n';
  for (const auto& v : cycles.violations) {
    out << "  violation at t=" << fmt_double(v.time) << ": " << fmt_double(v.previous)
        << " -> " << fmt_double(v.current) << '\n';
  }
  out << "multi_fire_cycles: " << cycles.multi_fire_count << '\n';
  out << "coupling_records: " << coupling.count << '\n';
  if (coupling.count > 0) {
    out << "alpha_effective_min: " << fmt_double(coupling.min_alpha_e) << '\n';
    out << "alpha_effective_max: " << fmt_double(coupling.max_alpha_e) << '\n';
    out << "alpha_effective_mean: " << fmt_double(coupling.mean_alpha_e) << '\n';
    out << "interrupted_fraction: " << fmt_double(coupling.interrupted_fraction) << '\n';
  }
}

/// A self-contained matplotlib script that renders the phase-evolution and
/// containing-arc figures from the CSVs next to it.
inline void write_plot_script(std::ostream& out) {
  out << R"PY(#!/usr/bin/env python3
"""Render phase-evolution and containing-arc figures from the CSVs in this directory."""
import csv
import math
import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def read_rows(name):
    with open(os.path.join(HERE, name), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(x) for x in row] for row in reader]
    return header, rows


def main():
    header, rows = read_rows("phases.csv")
    n = (len(header) - 1) // 2
    times = [r[0] for r in rows]

    fig, ax = plt.subplots(figsize=(8, 4))
    for i in range(n):
        xs, ys = [], []
        prev = None
        for r in rows:
            th = r[1 + i]
            if prev is not None and abs(th - prev) > 0.5:
                xs.append(math.nan)
                ys.append(math.nan)
            xs.append(r[0])
            ys.append(th)
            prev = th
        ax.plot(xs, ys, lw=0.8, label=f"osc {i + 1}")
    ax.set_xlabel("time (s)")
    ax.set_ylabel("phase")
    ax.set_ylim(0, 1)
    if n <= 8:
        ax.legend(loc="upper right", fontsize="small")
    fig.tight_layout()
    fig.savefig(os.path.join(HERE, "phase_evolution.png"), dpi=150)

    _, arc_rows = read_rows("arc.csv")
    fig2, ax2 = plt.subplots(figsize=(8, 4))
    ax2.plot([r[0] for r in arc_rows], [r[1] for r in arc_rows], lw=1.0)
    ax2.set_xlabel("time (s)")
    ax2.set_ylabel("containing arc")
    floor = min((r[1] for r in arc_rows if r[1] > 0), default=0)
    if floor > 0:
        ax2.set_yscale("log")
    fig2.tight_layout()
    fig2.savefig(os.path.join(HERE, "containing_arc.png"), dpi=150)
    print("wrote", os.path.join(HERE, "phase_evolution.png"))
    print("wrote", os.path.join(HERE, "containing_arc.png"))


if __name__ == "__main__":
    main()
)PY";
}

}  // namespace pcosync
