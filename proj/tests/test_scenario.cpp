#include <catch2/catch_amalgamated.hpp>

#include "pcosync/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace pcosync;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

Scenario parse(const std::string& text) {
  return parse_scenario_text(text, "test.cfg", std::filesystem::temp_directory_path());
}

const std::string kMinimal =
    "algorithm = prc\n"
    "n = 6\n"
    "topology = all_to_all\n"
    "alpha = 0.5\n"
    "mode = jump\n";

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("pcosync_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("minimal scenario parses with documented defaults", "[scenario]") {
  const Scenario s = parse(kMinimal);
  CHECK(s.sim.n() == 6);
  CHECK(s.sim.alpha == 0.5);
  CHECK(s.sim.algorithm.kind == Algorithm::delay_advance);
  CHECK(s.sim.continuity.mode == ContinuityMode::jump);
  CHECK(s.sim.continuity.omega0 == 1.0);
  CHECK(s.sim.sample_dt == 0.01);
  CHECK(s.sim.horizon == 60.0);
  CHECK(s.sim.graph.edge_count() == 30);
  CHECK_FALSE(s.sweep.active());
}

TEST_CASE("constraint violations carry line numbers", "[scenario][errors]") {
  CHECK_THROWS_WITH(parse("algorithm = prc\n"
                          "n = 6\n"
                          "topology = all_to_all\n"
                          "alpha = 1.5\n"
                          "mode = jump\n"),
                    ContainsSubstring("test.cfg:4") &&
                        ContainsSubstring("alpha must be in (0,1]"));

  CHECK_THROWS_WITH(parse("algorithm = prc\n"
                          "n = 6\n"
                          "topology = all_to_all\n"
                          "alpha = 0.5\n"
                          "mode = constant_frequency\n"),
                    ContainsSubstring("requires omega_a"));

  CHECK_THROWS_WITH(parse(kMinimal + "no_such_option = 1\n"),
                    ContainsSubstring("test.cfg:6") &&
                        ContainsSubstring("unknown key 'no_such_option'"));

  CHECK_THROWS_WITH(parse(kMinimal + "alpha = 0.7\n"),
                    ContainsSubstring("duplicate key 'alpha'"));

  CHECK_THROWS_WITH(parse("algorithm = prc\nn = 6\ntopology = all_to_all\nmode = jump\n"),
                    ContainsSubstring("missing required key 'alpha'"));

  CHECK_THROWS_WITH(parse("algorithm = peskin\n"
                          "n = 6\n"
                          "topology = all_to_all\n"
                          "alpha = 0.5\n"
                          "mode = jump\n"),
                    ContainsSubstring("state-map algorithms require alpha = 1"));

  CHECK_THROWS_WITH(parse("algorithm = peskin\n"
                          "n = 6\n"
                          "topology = all_to_all\n"
                          "mode = jump\n"
                          "refractory = 0.2\n"),
                    ContainsSubstring("only valid for algorithm = prc"));

  CHECK_THROWS_WITH(parse(kMinimal + "tau = 0.3\n"),
                    ContainsSubstring("only valid with mode = constant_time"));

  CHECK_THROWS_WITH(parse(kMinimal + "sweep_values = 1,2\n"),
                    ContainsSubstring("requires sweep_param"));
}

TEST_CASE("frequency offsets accept absolute and ratio forms", "[scenario]") {
  const std::string base =
      "algorithm = prc\nn = 6\ntopology = all_to_all\nalpha = 0.5\n"
      "mode = constant_frequency\nomega0 = 2.0\n";
  CHECK(parse(base + "omega_a = 0.3\n").sim.continuity.omega_a_up == 0.3);
  CHECK(parse(base + "omega_a_ratio = 0.3\n").sim.continuity.omega_a_up ==
        Approx(0.6).margin(1e-15));
  const Scenario asym = parse(base + "omega_a_up = 0.4\nomega_a_down = 0.2\n");
  CHECK(asym.sim.continuity.omega_a_up == 0.4);
  CHECK(asym.sim.continuity.omega_a_down == 0.2);
  CHECK_THROWS_WITH(parse(base + "omega_a = 0.3\nomega_a_ratio = 0.3\n"),
                    ContainsSubstring("not both"));
  CHECK_THROWS_WITH(parse(base + "omega_a_up = 0.4\n"),
                    ContainsSubstring("must be given together"));
}

TEST_CASE("custom topology loads an edge-list file", "[scenario]") {
  const auto dir = fresh_dir("edges");
  {
    std::ofstream edges(dir / "ring3.txt");
    edges << "1 2\n2 3\n3 1\n";
  }
  std::ofstream cfg_file(dir / "scenario.cfg");
  cfg_file << "algorithm = prc\nn = 3\ntopology = custom\nedges_file = ring3.txt\n"
              "alpha = 0.5\nmode = jump\n";
  cfg_file.close();

  const Scenario s = parse_scenario_file(dir / "scenario.cfg");
  CHECK(s.sim.graph.edge_count() == 3);
  CHECK(is_strongly_connected(s.sim.graph));
}

TEST_CASE("explicit initial phases round through the parser", "[scenario]") {
  const Scenario s = parse(
      "algorithm = prc\nn = 3\ntopology = all_to_all\nalpha = 0.5\nmode = jump\n"
      "initial_phases = 0.1, 0.2, 0.9\n");
  CHECK(s.sim.initial.explicit_phases == std::vector<double>{0.1, 0.2, 0.9});

  CHECK_THROWS_WITH(
      parse("algorithm = prc\nn = 3\ntopology = all_to_all\nalpha = 0.5\nmode = jump\n"
            "initial_phases = 0.1, 0.2\n"),
      ContainsSubstring("exactly n values"));

  CHECK_THROWS_WITH(
      parse("algorithm = prc\nn = 2\ntopology = all_to_all\nalpha = 0.5\nmode = jump\n"
            "initial_phases = 0.1, 0.2\narc_length = 0.4\n"),
      ContainsSubstring("conflicts with explicit initial_phases"));
}

TEST_CASE("phases csv round-trips exactly", "[scenario][csv]") {
  SimConfig cfg;
  cfg.graph = all_to_all(3);
  cfg.alpha = 0.5;
  cfg.initial.seed = 9;
  cfg.initial.arc_length = 0.3;
  cfg.horizon = 5.0;
  const Trace trace = Simulation::run(cfg);

  std::ostringstream out;
  write_phases_csv(out, trace);
  std::istringstream in(out.str());
  const auto samples = read_phases_csv(in);

  REQUIRE(samples.size() == trace.samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    REQUIRE(samples[k].time == trace.samples[k].time);
    REQUIRE(samples[k].theta == trace.samples[k].theta);
    REQUIRE(samples[k].omega == trace.samples[k].omega);
  }
}

TEST_CASE("run_scenario writes the full output set", "[scenario]") {
  const auto dir = fresh_dir("outputs");
  const Scenario s = parse(kMinimal + "seed = 4\n");
  const ScenarioResult result = run_scenario(s.sim);
  write_output_set(dir, result);

  for (const char* name :
       {"phases.csv", "firings.csv", "arc.csv", "coupling.csv", "report.txt", "plot.py"}) {
    INFO(name);
    CHECK(std::filesystem::exists(dir / name));
  }

  std::ifstream arc_in(dir / "arc.csv");
  const auto points = read_arc_csv(arc_in);
  REQUIRE(!points.empty());
  CHECK(points.back().lambda < 1e-6);
}

TEST_CASE("zero horizon emits the initial sample only", "[scenario]") {
  Scenario s = parse(kMinimal);
  s.sim.horizon = 0.0;
  const ScenarioResult result = run_scenario(s.sim);
  CHECK(result.trace.samples.size() == 1);
  CHECK(result.trace.firings.empty());
  CHECK(result.series.points.size() == 1);
}

TEST_CASE("single-oscillator scenario has a constant zero arc", "[scenario]") {
  const Scenario s = parse(
      "algorithm = prc\nn = 1\ntopology = all_to_all\nalpha = 0.5\nmode = jump\n"
      "horizon = 3\nearly_stop = false\n");
  const ScenarioResult result = run_scenario(s.sim);
  for (const auto& p : result.series.points) REQUIRE(p.lambda == 0.0);
}

TEST_CASE("reproduce_figures emits one output set per scenario and mode",
          "[scenario][figures]") {
  REQUIRE(builtin_scenarios().size() == 6);
  for (const auto& s : builtin_scenarios()) {
    if (s.label == "rfa") {
      CHECK(s.omega_a == 0.007);
      CHECK(s.tau == 1.1);
      CHECK(s.base.algorithm.epsilon == 0.002);
    }
  }

  const auto dir = fresh_dir("figures");
  const auto runs = reproduce_figures(dir);
  REQUIRE(runs.size() == 18);

  for (const auto& run : runs) {
    const auto set_dir = dir / (run.label + std::string("_") + mode_name(run.mode));
    for (const char* name : {"phases.csv", "arc.csv", "report.txt", "plot.py"}) {
      INFO(set_dir.string() << "/" << name);
      REQUIRE(std::filesystem::exists(set_dir / name));
    }
    if (run.config.algorithm.kind == Algorithm::delay_advance) {
      INFO(run.label << " " << mode_name(run.mode));
      CHECK(run.result.sync.synced);
    }
  }
  CHECK(std::filesystem::exists(dir / "figures_summary.csv"));
}

TEST_CASE("sweep produces one row per grid point and seed", "[scenario][sweep]") {
  const Scenario s = parse(
      "algorithm = prc\nn = 4\ntopology = all_to_all\nalpha = 0.5\n"
      "mode = constant_frequency\nomega_a = 0.3\nhorizon = 40\n"
      "sweep_param = omega_a\nsweep_values = 0.2, 0.5\nsweep_seeds = 2\n");
  const auto rows = run_sweep(s);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].value == 0.2);
  CHECK(rows[0].seed == 1);
  CHECK(rows[1].seed == 2);
  CHECK(rows[2].value == 0.5);
  for (const auto& row : rows) {
    CHECK(row.synced);
    CHECK(row.monotone);
  }

  std::ostringstream out;
  write_sweep_csv(out, s.sweep.parameter, rows);
  std::istringstream lines(out.str());
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) ++count;
  CHECK(count == 5);  // header + 4 rows

  const Scenario empty_grid = parse(
      "algorithm = prc\nn = 4\ntopology = all_to_all\nalpha = 0.5\nmode = jump\n"
      "sweep_param = alpha\nsweep_values =\n");
  CHECK(run_sweep(empty_grid).empty());
}

TEST_CASE("faster frequency offsets do not slow convergence", "[scenario][sweep]") {
  // Larger omega_a realizes each correction sooner, approaching the jump
  // behaviour; the median sync time over seeds should not increase with it.
  const Scenario s = parse(
      "algorithm = prc\nn = 6\ntopology = all_to_all\nalpha = 0.5\n"
      "mode = constant_frequency\nomega_a = 0.3\nhorizon = 60\n"
      "sweep_param = omega_a\nsweep_values = 0.1, 0.3, 1.0\nsweep_seeds = 20\n");
  const auto rows = run_sweep(s);
  REQUIRE(rows.size() == 60);

  std::map<double, std::vector<double>> times;
  for (const auto& row : rows) {
    REQUIRE(row.synced);
    times[row.value].push_back(*row.sync_time);
  }
  auto median_of = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v.size() % 2 == 1 ? v[v.size() / 2]
                             : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
  };
  const double m01 = median_of(times[0.1]);
  const double m03 = median_of(times[0.3]);
  const double m10 = median_of(times[1.0]);
  INFO("medians: " << m01 << " " << m03 << " " << m10);
  CHECK(m03 <= m01);
  CHECK(m10 <= m03);
}
