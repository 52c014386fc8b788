// pcosim: run pulse-coupled oscillator scenarios, reproduce the built-in
// reference figures, and sweep parameter grids. Outputs are CSV files plus a
// plot script per output set; see README.md for the scenario file format.

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "pcosync/scenario.hpp"

namespace fs = std::filesystem;

namespace {

struct GlobalOpts {
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

void report_scenario(const pcosync::ScenarioResult& result, const std::string& name,
                     bool quiet) {
  if (quiet) return;
  std::cout << name << ": "
            << (result.sync.synced ? "synced at t = " + pcosync::fmt_double(
                                                            *result.sync.sync_time)
                                   : "did not synchronize")
            << ", firings = " << result.trace.firings.size()
            << ", cycle monotone = " << (result.cycles.monotone ? "yes" : "no") << '\n';
}

int cmd_run(const std::string& config_path, const GlobalOpts& opts) {
  pcosync::Scenario scenario = pcosync::parse_scenario_file(config_path);
  if (opts.seed) scenario.sim.initial.seed = *opts.seed;

  fs::path out_dir = !opts.out_dir.empty() ? fs::path(opts.out_dir)
                     : !scenario.out.out_dir.empty()
                         ? fs::path(scenario.out.out_dir)
                         : fs::path("pcosim_out") / scenario.out.label;

  const pcosync::ScenarioResult result = pcosync::run_scenario(scenario.sim);
  pcosync::write_output_set(out_dir, result);
  report_scenario(result, scenario.out.label, opts.quiet);
  if (!opts.quiet) std::cout << "outputs written to " << out_dir.string() << '\n';
  return 0;
}

int cmd_figures(const GlobalOpts& opts) {
  const fs::path out_dir =
      opts.out_dir.empty() ? fs::path("pcosim_out") / "figures" : fs::path(opts.out_dir);
  const auto runs = pcosync::reproduce_figures(out_dir);
  for (const auto& run : runs) {
    report_scenario(run.result,
                    run.label + std::string("_") + pcosync::mode_name(run.mode),
                    opts.quiet);
  }
  if (!opts.quiet) {
    std::cout << runs.size() << " output sets written to " << out_dir.string() << '\n';
  }
  return 0;
}

int cmd_sweep(const std::string& template_path, const GlobalOpts& opts) {
  pcosync::Scenario scenario = pcosync::parse_scenario_file(template_path);
  if (opts.seed) scenario.sweep.seed_base = *opts.seed;

  const fs::path out_dir = !opts.out_dir.empty() ? fs::path(opts.out_dir)
                           : !scenario.out.out_dir.empty()
                               ? fs::path(scenario.out.out_dir)
                               : fs::path("pcosim_out") / (scenario.out.label + "_sweep");
  fs::create_directories(out_dir);

  const auto rows = pcosync::run_sweep(scenario);
  const fs::path csv_path = out_dir / "sweep.csv";
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + csv_path.string() + "'");
  }
  pcosync::write_sweep_csv(out, scenario.sweep.parameter, rows);
  if (!opts.quiet) {
    std::cout << rows.size() << " sweep rows written to " << csv_path.string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulse-coupled oscillator network simulator"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOpts opts;
  app.add_option("--out-dir", opts.out_dir, "Directory for output files")
      ->type_name("DIR");
  std::uint64_t seed_value = 0;
  auto* seed_opt =
      app.add_option("--seed", seed_value, "Override the scenario seed")->type_name("N");
  app.add_flag("--quiet", opts.quiet, "Suppress progress output");

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run one scenario file");
  run_cmd->add_option("config", config_path, "Scenario file")->required();

  auto* figures_cmd =
      app.add_subcommand("figures", "Run the built-in reference scenarios in all modes");

  std::string template_path;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep from a template");
  sweep_cmd->add_option("template", template_path, "Scenario template with sweep keys")
      ->required();

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count() > 0) opts.seed = seed_value;

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, opts);
    if (figures_cmd->parsed()) return cmd_figures(opts);
    if (sweep_cmd->parsed()) return cmd_sweep(template_path, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
