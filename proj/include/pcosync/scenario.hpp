#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pcosync/engine.hpp"
#include "pcosync/metrics.hpp"
#include "pcosync/trace_io.hpp"

namespace pcosync {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OutputOptions {
  std::string label = "scenario";
  std::string out_dir;  // may be overridden by the CLI
};

struct SweepSpec {
  std::string parameter;  // empty when the file declares no sweep
  std::vector<double> values;
  std::size_t seeds = 1;
  std::uint64_t seed_base = 1;

  bool active() const { return !parameter.empty(); }
};

struct Scenario {
  SimConfig sim;
  OutputOptions out;
  SweepSpec sweep;
};

namespace cfgdetail {

struct Entry {
  std::string value;
  std::size_t line = 0;
  bool consumed = false;
};

/// key = value lines with '#' comments; every key tracked with its line
/// number so validation errors can point at the offending line.
class Reader {
 public:
  Reader(const std::string& text, std::string source) : source_(std::move(source)) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos) {
        fail(line_no, "expected 'key = value'");
      }
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty()) fail(line_no, "missing key before '='");
      if (entries_.count(key)) {
        fail(line_no, "duplicate key '" + key + "'");
      }
      entries_[key] = Entry{value, line_no, false};
    }
  }

  [[noreturn]] void fail(std::size_t line, const std::string& message) const {
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + message);
  }

  [[noreturn]] void fail_key(const std::string& key, const std::string& message) const {
    const auto it = entries_.find(key);
    const std::size_t line = it == entries_.end() ? 0 : it->second.line;
    throw ConfigError(source_ + ":" + std::to_string(line) + ": " + message);
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::optional<std::string> take(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    it->second.consumed = true;
    return it->second.value;
  }

  std::string require(const std::string& key) {
    auto v = take(key);
    if (!v) throw ConfigError(source_ + ": missing required key '" + key + "'");
    return *v;
  }

  double take_double(const std::string& key, double fallback) {
    auto v = take(key);
    return v ? parse_double(key, *v) : fallback;
  }

  std::optional<double> take_double_opt(const std::string& key) {
    auto v = take(key);
    if (!v) return std::nullopt;
    return parse_double(key, *v);
  }

  std::uint64_t take_uint(const std::string& key, std::uint64_t fallback) {
    auto v = take(key);
    if (!v) return fallback;
    try {
      if (v->find('-') != std::string::npos) throw std::invalid_argument("negative");
      std::size_t pos = 0;
      const unsigned long long parsed = std::stoull(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument("trailing junk");
      return parsed;
    } catch (const std::exception&) {
      fail_key(key, "'" + key + "' must be a non-negative integer, got '" + *v + "'");
    }
  }

  bool take_bool(const std::string& key, bool fallback) {
    auto v = take(key);
    if (!v) return fallback;
    if (*v == "true") return true;
    if (*v == "false") return false;
    fail_key(key, "'" + key + "' must be true or false, got '" + *v + "'");
  }

  std::vector<double> take_list(const std::string& key) {
    auto v = take(key);
    std::vector<double> values;
    if (!v || trim(*v).empty()) return values;
    std::istringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      values.push_back(parse_double(key, trim(item)));
    }
    return values;
  }

  double parse_double(const std::string& key, const std::string& raw) {
    char* end = nullptr;
    const double parsed = std::strtod(raw.c_str(), &end);
    if (end == raw.c_str() || *end != '\0') {
      fail_key(key, "'" + key + "' must be a number, got '" + raw + "'");
    }
    return parsed;
  }

  void reject_unknown() const {
    for (const auto& [key, entry] : entries_) {
      if (!entry.consumed) {
        fail(entry.line, "unknown key '" + key + "'");
      }
    }
  }

  const std::string& source() const { return source_; }

 private:
  static std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  }

  std::string source_;
  std::map<std::string, Entry> entries_;
};

}  // namespace cfgdetail

/// Parse a scenario document. base_dir resolves relative edges_file paths.
inline Scenario parse_scenario_text(const std::string& text, const std::string& source,
                                    const std::filesystem::path& base_dir) {
  cfgdetail::Reader reader(text, source);
  Scenario scenario;
  SimConfig& cfg = scenario.sim;

  const std::string algorithm = reader.require("algorithm");
  if (algorithm == "prc") {
    cfg.algorithm.kind = Algorithm::delay_advance;
  } else if (algorithm == "peskin") {
    cfg.algorithm.kind = Algorithm::peskin;
  } else if (algorithm == "mirollo_strogatz") {
    cfg.algorithm.kind = Algorithm::mirollo_strogatz;
  } else if (algorithm == "rfa") {
    cfg.algorithm.kind = Algorithm::rfa;
  } else {
    reader.fail_key("algorithm",
                    "algorithm must be one of prc, peskin, mirollo_strogatz, rfa");
  }
  const bool state_map = cfg.algorithm.kind != Algorithm::delay_advance;

  if (!reader.has("n")) throw ConfigError(reader.source() + ": missing required key 'n'");
  const std::uint64_t n = reader.take_uint("n", 0);
  if (n == 0) reader.fail_key("n", "n must be a positive oscillator count");

  const std::string topology = reader.require("topology");
  if (topology == "custom") {
    const std::string edges_file = reader.require("edges_file");
    const std::filesystem::path path = base_dir / edges_file;
    std::ifstream in(path);
    if (!in) reader.fail_key("edges_file", "cannot open edge list '" + path.string() + "'");
    try {
      cfg.graph = parse_edge_list(in, n);
    } catch (const std::exception& e) {
      reader.fail_key("edges_file", std::string("bad edge list: ") + e.what());
    }
  } else {
    if (reader.has("edges_file")) {
      reader.fail_key("edges_file", "edges_file is only valid with topology = custom");
    }
    if (topology == "all_to_all") {
      cfg.graph = all_to_all(n);
    } else if (topology == "ring") {
      if (n < 2) reader.fail_key("topology", "ring topology requires n >= 2");
      cfg.graph = ring(n);
    } else {
      reader.fail_key("topology", "topology must be all_to_all, ring, or custom");
    }
  }

  if (state_map) {
    cfg.alpha = reader.take_double("alpha", 1.0);
    if (cfg.alpha != 1.0) {
      reader.fail_key("alpha", "state-map algorithms require alpha = 1");
    }
  } else {
    cfg.alpha = reader.parse_double("alpha", reader.require("alpha"));
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0)) {
    reader.fail_key("alpha", "alpha must be in (0,1]");
  }

  if (state_map) {
    if (reader.has("refractory")) {
      reader.fail_key("refractory", "refractory is only valid for algorithm = prc");
    }
    cfg.algorithm.epsilon = reader.take_double("epsilon", 0.002);
    if (!(cfg.algorithm.epsilon > 0.0)) reader.fail_key("epsilon", "epsilon must be > 0");
    if (cfg.algorithm.kind == Algorithm::peskin) {
      cfg.algorithm.gamma = reader.take_double("gamma", 3.0);
      if (!(cfg.algorithm.gamma > 0.0)) reader.fail_key("gamma", "gamma must be > 0");
    } else if (reader.has("gamma")) {
      reader.fail_key("gamma", "gamma is only valid for algorithm = peskin");
    }
    if (cfg.algorithm.kind == Algorithm::mirollo_strogatz) {
      cfg.algorithm.b = reader.take_double("b", 5.0);
      if (!(cfg.algorithm.b > 0.0)) reader.fail_key("b", "b must be > 0");
    } else if (reader.has("b")) {
      reader.fail_key("b", "b is only valid for algorithm = mirollo_strogatz");
    }
  } else {
    cfg.algorithm.refractory = reader.take_double("refractory", 0.0);
    if (!(cfg.algorithm.refractory >= 0.0 && cfg.algorithm.refractory < 1.0)) {
      reader.fail_key("refractory", "refractory must lie in [0,1)");
    }
    for (const char* key : {"epsilon", "gamma", "b"}) {
      if (reader.has(key)) {
        reader.fail_key(key, std::string("'") + key + "' is only valid for state-map algorithms");
      }
    }
  }

  cfg.continuity.omega0 = reader.take_double("omega0", 1.0);
  if (!(cfg.continuity.omega0 > 0.0)) reader.fail_key("omega0", "omega0 must be > 0");

  const std::string mode = reader.require("mode");
  if (mode == "jump") {
    cfg.continuity.mode = ContinuityMode::jump;
  } else if (mode == "constant_frequency") {
    cfg.continuity.mode = ContinuityMode::constant_frequency;
  } else if (mode == "constant_time") {
    cfg.continuity.mode = ContinuityMode::constant_time;
  } else {
    reader.fail_key("mode", "mode must be jump, constant_frequency, or constant_time");
  }

  if (cfg.continuity.mode == ContinuityMode::constant_frequency) {
    const auto omega_a = reader.take_double_opt("omega_a");
    const auto omega_a_ratio = reader.take_double_opt("omega_a_ratio");
    const auto up = reader.take_double_opt("omega_a_up");
    const auto down = reader.take_double_opt("omega_a_down");
    if (omega_a && omega_a_ratio) {
      reader.fail_key("omega_a_ratio", "give omega_a or omega_a_ratio, not both");
    }
    if (up.has_value() != down.has_value()) {
      reader.fail_key(up ? "omega_a_up" : "omega_a_down",
                      "omega_a_up and omega_a_down must be given together");
    }
    if (up) {
      cfg.continuity.omega_a_up = *up;
      cfg.continuity.omega_a_down = *down;
    } else if (omega_a) {
      cfg.continuity.omega_a_up = cfg.continuity.omega_a_down = *omega_a;
    } else if (omega_a_ratio) {
      cfg.continuity.omega_a_up = cfg.continuity.omega_a_down =
          *omega_a_ratio * cfg.continuity.omega0;
    } else {
      reader.fail_key("mode",
                      "mode = constant_frequency requires omega_a (cycles/s), "
                      "omega_a_ratio (multiples of omega0), or omega_a_up/omega_a_down");
    }
    if (!(cfg.continuity.omega_a_up > 0.0 && cfg.continuity.omega_a_down > 0.0)) {
      reader.fail_key("mode", "frequency offsets must be > 0");
    }
  } else {
    for (const char* key : {"omega_a", "omega_a_ratio", "omega_a_up", "omega_a_down"}) {
      if (reader.has(key)) {
        reader.fail_key(key, std::string("'") + key +
                                 "' is only valid with mode = constant_frequency");
      }
    }
  }

  if (cfg.continuity.mode == ContinuityMode::constant_time) {
    const auto tau = reader.take_double_opt("tau");
    if (!tau) reader.fail_key("mode", "mode = constant_time requires tau (seconds)");
    cfg.continuity.tau_fixed = *tau;
    if (!(cfg.continuity.tau_fixed > 0.0)) reader.fail_key("tau", "tau must be > 0");
  } else if (reader.has("tau")) {
    reader.fail_key("tau", "'tau' is only valid with mode = constant_time");
  }

  cfg.horizon = reader.take_double("horizon", 60.0);
  if (cfg.horizon < 0.0) reader.fail_key("horizon", "horizon must be >= 0");
  cfg.sample_dt = reader.take_double("sample_dt", 0.01);
  if (!(cfg.sample_dt > 0.0)) reader.fail_key("sample_dt", "sample_dt must be > 0");

  cfg.initial.seed = reader.take_uint("seed", 1);
  cfg.initial.explicit_phases = reader.take_list("initial_phases");
  if (!cfg.initial.explicit_phases.empty()) {
    if (cfg.initial.explicit_phases.size() != n) {
      reader.fail_key("initial_phases", "initial_phases must list exactly n values");
    }
    for (double th : cfg.initial.explicit_phases) {
      if (!(th >= 0.0 && th < 1.0)) {
        reader.fail_key("initial_phases", "phases must lie in [0,1)");
      }
    }
    for (const char* key : {"arc_length", "arc_offset"}) {
      if (reader.has(key)) {
        reader.fail_key(key, std::string("'") + key +
                                 "' conflicts with explicit initial_phases");
      }
    }
  } else {
    cfg.initial.arc_length = reader.take_double("arc_length", 0.4);
    if (!(cfg.initial.arc_length >= 0.0 && cfg.initial.arc_length < 1.0)) {
      reader.fail_key("arc_length", "arc_length must lie in [0,1)");
    }
    cfg.initial.arc_offset = reader.take_double("arc_offset", 0.0);
  }

  const std::string schedule = reader.take("alpha_schedule").value_or("constant");
  if (schedule == "constant") {
    cfg.alpha_schedule.kind = AlphaSchedule::Kind::constant;
    for (const char* key : {"alpha_lo", "alpha_hi", "alpha_seed"}) {
      if (reader.has(key)) {
        reader.fail_key(key, std::string("'") + key +
                                 "' is only valid with alpha_schedule = random");
      }
    }
  } else if (schedule == "random") {
    if (state_map) {
      reader.fail_key("alpha_schedule",
                      "state-map algorithms do not support an alpha schedule");
    }
    cfg.alpha_schedule.kind = AlphaSchedule::Kind::random;
    cfg.alpha_schedule.lo = reader.take_double("alpha_lo", 0.05);
    cfg.alpha_schedule.hi = reader.take_double("alpha_hi", 1.0);
    cfg.alpha_schedule.seed = reader.take_uint("alpha_seed", 0);
    if (!(cfg.alpha_schedule.lo >= 0.0 && cfg.alpha_schedule.lo < cfg.alpha_schedule.hi &&
          cfg.alpha_schedule.hi <= 1.0)) {
      reader.fail_key("alpha_lo", "alpha bounds must satisfy 0 <= lo < hi <= 1");
    }
  } else {
    reader.fail_key("alpha_schedule", "alpha_schedule must be constant or random");
  }

  cfg.theorem_check = reader.take_bool("theorem_check", false);
  cfg.allow_disconnected = reader.take_bool("allow_disconnected", false);
  cfg.early_stop = reader.take_bool("early_stop", true);
  cfg.sync_tol = reader.take_double("sync_tol", 1e-6);
  if (!(cfg.sync_tol > 0.0)) reader.fail_key("sync_tol", "sync_tol must be > 0");
  cfg.sync_hold = reader.take_double("sync_hold", -1.0);

  scenario.out.label = reader.take("label").value_or("scenario");
  scenario.out.out_dir = reader.take("out_dir").value_or("");

  scenario.sweep.parameter = reader.take("sweep_param").value_or("");
  if (scenario.sweep.active()) {
    static const std::vector<std::string> kSweepable = {
        "alpha", "omega_a", "tau", "refractory", "epsilon", "arc_length"};
    if (std::find(kSweepable.begin(), kSweepable.end(), scenario.sweep.parameter) ==
        kSweepable.end()) {
      reader.fail_key("sweep_param",
                      "sweep_param must be one of alpha, omega_a, tau, refractory, "
                      "epsilon, arc_length");
    }
    scenario.sweep.values = reader.take_list("sweep_values");
    scenario.sweep.seeds = reader.take_uint("sweep_seeds", 1);
    if (scenario.sweep.seeds == 0) {
      reader.fail_key("sweep_seeds", "sweep_seeds must be >= 1");
    }
    scenario.sweep.seed_base = reader.take_uint("sweep_seed_base", 1);
  } else {
    for (const char* key : {"sweep_values", "sweep_seeds", "sweep_seed_base"}) {
      if (reader.has(key)) {
        reader.fail_key(key, std::string("'") + key + "' requires sweep_param");
      }
    }
  }

  reader.reject_unknown();

  // Cross-field checks that the engine would also reject; surfacing them here
  // attaches the file context.
  try {
    Simulation probe(cfg);
    (void)probe;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(reader.source() + ": " + e.what());
  }
  return scenario;
}

inline Scenario parse_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario_text(text.str(), path.string(), path.parent_path());
}

struct ScenarioResult {
  Trace trace;
  ArcSeries series;
  SyncReport sync;
  CycleReport cycles;
  CouplingSummary coupling;
};

inline ScenarioResult analyze_trace(const SimConfig& cfg, Trace trace) {
  ScenarioResult result;
  result.trace = std::move(trace);
  result.series = arc_series(result.trace);
  result.sync = sync_report(result.trace, cfg.sync_tol, cfg.hold());
  result.cycles = cycle_monotonicity(result.series, result.trace.firings, result.trace.n);
  result.coupling = coupling_summary(result.trace);
  return result;
}

inline ScenarioResult run_scenario(const SimConfig& cfg) {
  return analyze_trace(cfg, Simulation::run(cfg));
}

inline void write_output_set(const std::filesystem::path& dir, const ScenarioResult& r) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot write '" + (dir / name).string() + "'");
    }
    return out;
  };
  {
    auto out = open("phases.csv");
    write_phases_csv(out, r.trace);
  }
  {
    auto out = open("firings.csv");
    write_firings_csv(out, r.trace);
  }
  {
    auto out = open("arc.csv");
    write_arc_csv(out, r.series);
  }
  {
    auto out = open("coupling.csv");
    write_coupling_csv(out, r.trace);
  }
  {
    auto out = open("report.txt");
    write_report(out, r.sync, r.cycles, r.coupling);
  }
  {
    auto out = open("plot.py");
    write_plot_script(out);
  }
}

/// Built-in reference scenarios: the delay-advance network with and without a
/// refractory period, the ring variant, and the three state-map algorithms,
/// each meant to run in all three continuity modes.
struct BuiltinScenario {
  std::string label;
  SimConfig base;    // jump-mode configuration
  double omega_a;    // constant-frequency offset (cycles/s)
  double tau;        // constant-time duration (s)
};

inline SimConfig with_mode(SimConfig cfg, ContinuityMode mode, double omega_a, double tau) {
  cfg.continuity.mode = mode;
  cfg.continuity.omega_a_up = cfg.continuity.omega_a_down =
      mode == ContinuityMode::constant_frequency ? omega_a : 0.0;
  cfg.continuity.tau_fixed = mode == ContinuityMode::constant_time ? tau : 0.0;
  return cfg;
}

inline const std::vector<BuiltinScenario>& builtin_scenarios() {
  static const std::vector<BuiltinScenario> scenarios = [] {
    std::vector<BuiltinScenario> list;

    auto prc_base = [](std::uint64_t seed) {
      SimConfig cfg;
      cfg.graph = all_to_all(6);
      cfg.alpha = 0.5;
      cfg.initial.seed = seed;
      cfg.initial.arc_length = 0.45;
      cfg.initial.arc_offset = 0.5;
      cfg.horizon = 60.0;
      cfg.sync_tol = 1e-6;
      return cfg;
    };

    {
      BuiltinScenario s{"prc_all_to_all", prc_base(41), 0.3, 0.3};
      list.push_back(std::move(s));
    }
    {
      BuiltinScenario s{"prc_refractory", prc_base(61), 0.3, 0.3};
      s.base.algorithm.refractory = 0.5;
      list.push_back(std::move(s));
    }
    {
      BuiltinScenario s{"prc_ring", prc_base(71), 0.3, 0.3};
      s.base.graph = ring(6);
      s.base.horizon = 120.0;
      list.push_back(std::move(s));
    }

    auto state_map_base = [](Algorithm kind, std::uint64_t seed) {
      SimConfig cfg;
      cfg.graph = all_to_all(6);
      cfg.alpha = 1.0;
      cfg.algorithm.kind = kind;
      cfg.algorithm.epsilon = 0.002;
      cfg.initial.seed = seed;
      cfg.initial.arc_length = 0.45;
      cfg.initial.arc_offset = 0.5;
      cfg.horizon = 200.0;
      cfg.sync_tol = 1e-4;
      return cfg;
    };

    {
      BuiltinScenario s{"peskin", state_map_base(Algorithm::peskin, 91), 0.3, 0.1};
      s.base.algorithm.gamma = 3.0;
      list.push_back(std::move(s));
    }
    {
      BuiltinScenario s{"mirollo_strogatz",
                        state_map_base(Algorithm::mirollo_strogatz, 101), 0.3, 0.1};
      s.base.algorithm.b = 5.0;
      list.push_back(std::move(s));
    }
    {
      BuiltinScenario s{"rfa", state_map_base(Algorithm::rfa, 43), 0.007, 1.1};
      // The reachback sum overshoots near the fixed point, so the network
      // settles into a bounded residual rather than exact synchrony; report
      // sync at the residual scale.
      s.base.sync_tol = 1e-3;
      list.push_back(std::move(s));
    }
    return list;
  }();
  return scenarios;
}

inline const char* mode_name(ContinuityMode mode) {
  switch (mode) {
    case ContinuityMode::jump: return "jump";
    case ContinuityMode::constant_frequency: return "constant_frequency";
    case ContinuityMode::constant_time: return "constant_time";
  }
  return "unknown";
}

struct FigureRun {
  std::string label;
  ContinuityMode mode;
  SimConfig config;
  ScenarioResult result;
};

/// Run every built-in scenario in all three continuity modes, writing one
/// output set per (scenario, mode) plus a top-level summary CSV.
inline std::vector<FigureRun> reproduce_figures(const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<FigureRun> runs;
  std::ofstream summary(out_dir / "figures_summary.csv", std::ios::binary);
  if (!summary) {
    throw std::runtime_error("cannot write '" + (out_dir / "figures_summary.csv").string() + "'");
  }
  summary << "scenario,mode,seed,synced,sync_time,cycles_to_sync,min_alpha_e,monotone\n";

  for (const BuiltinScenario& scenario : builtin_scenarios()) {
    for (ContinuityMode mode : {ContinuityMode::jump, ContinuityMode::constant_frequency,
                                ContinuityMode::constant_time}) {
      FigureRun run;
      run.label = scenario.label;
      run.mode = mode;
      run.config = with_mode(scenario.base, mode, scenario.omega_a, scenario.tau);
      run.result = run_scenario(run.config);
      write_output_set(out_dir / (scenario.label + std::string("_") + mode_name(mode)),
                       run.result);

      summary << scenario.label << ',' << mode_name(mode) << ','
              << run.config.initial.seed << ','
              << (run.result.sync.synced ? "true" : "false") << ','
              << (run.result.sync.sync_time ? fmt_double(*run.result.sync.sync_time) : "none")
              << ','
              << (run.result.sync.cycles_to_sync
                      ? std::to_string(*run.result.sync.cycles_to_sync)
                      : "none")
              << ','
              << (run.result.coupling.count > 0 ? fmt_double(run.result.coupling.min_alpha_e)
                                                : "none")
              << ',' << (run.result.cycles.monotone ? "true" : "false") << '\n';
      runs.push_back(std::move(run));
    }
  }
  return runs;
}

inline void apply_sweep_value(SimConfig& cfg, const std::string& parameter, double value) {
  if (parameter == "alpha") {
    cfg.alpha = value;
  } else if (parameter == "omega_a") {
    if (cfg.continuity.mode != ContinuityMode::constant_frequency) {
      throw ConfigError("sweep over omega_a requires mode = constant_frequency");
    }
    cfg.continuity.omega_a_up = cfg.continuity.omega_a_down = value;
  } else if (parameter == "tau") {
    if (cfg.continuity.mode != ContinuityMode::constant_time) {
      throw ConfigError("sweep over tau requires mode = constant_time");
    }
    cfg.continuity.tau_fixed = value;
  } else if (parameter == "refractory") {
    cfg.algorithm.refractory = value;
  } else if (parameter == "epsilon") {
    cfg.algorithm.epsilon = value;
  } else if (parameter == "arc_length") {
    cfg.initial.arc_length = value;
  } else {
    throw ConfigError("unknown sweep parameter '" + parameter + "'");
  }
}

struct SweepRow {
  double value = 0.0;
  std::uint64_t seed = 0;
  bool synced = false;
  std::optional<double> sync_time;
  std::optional<double> min_alpha_e;
  bool monotone = true;
};

/// Run the sweep grid; jobs execute concurrently and rows come back in grid
/// order (value-major, seed-minor).
inline std::vector<SweepRow> run_sweep(const Scenario& scenario) {
  if (!scenario.sweep.active()) {
    throw ConfigError("scenario declares no sweep (missing sweep_param)");
  }
  struct Job {
    double value;
    std::uint64_t seed;
    SimConfig cfg;
  };
  std::vector<Job> jobs;
  for (double value : scenario.sweep.values) {
    for (std::size_t k = 0; k < scenario.sweep.seeds; ++k) {
      Job job{value, scenario.sweep.seed_base + k, scenario.sim};
      apply_sweep_value(job.cfg, scenario.sweep.parameter, value);
      job.cfg.initial.seed = job.seed;
      jobs.push_back(std::move(job));
    }
  }

  std::vector<std::future<SweepRow>> futures;
  futures.reserve(jobs.size());
  for (const Job& job : jobs) {
    futures.push_back(std::async(std::launch::async, [job]() {
      const ScenarioResult r = run_scenario(job.cfg);
      SweepRow row;
      row.value = job.value;
      row.seed = job.seed;
      row.synced = r.sync.synced;
      row.sync_time = r.sync.sync_time;
      if (r.coupling.count > 0) row.min_alpha_e = r.coupling.min_alpha_e;
      row.monotone = r.cycles.monotone;
      return row;
    }));
  }

  std::vector<SweepRow> rows;
  rows.reserve(futures.size());
  for (auto& f : futures) rows.push_back(f.get());
  return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::string& parameter,
                            const std::vector<SweepRow>& rows) {
  out << "parameter,value,seed,synced,sync_time,min_alpha_e,monotone\n";
  for (const auto& row : rows) {
    out << parameter << ',' << fmt_double(row.value) << ',' << row.seed << ','
        << (row.synced ? "true" : "false") << ','
        << (row.sync_time ? fmt_double(*row.sync_time) : "none") << ','
        << (row.min_alpha_e ? fmt_double(*row.min_alpha_e) : "none") << ','
        << (row.monotone ? "true" : "false") << '\n';
  }
}

}  // namespace pcosync
