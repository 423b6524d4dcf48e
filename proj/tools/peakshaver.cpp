// peakshaver command-line front end.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "peakshaver/config.hpp"
#include "peakshaver/csv_io.hpp"
#include "peakshaver/errors.hpp"
#include "peakshaver/experiment.hpp"
#include "peakshaver/manifest.hpp"
#include "peakshaver/problems.hpp"
#include "peakshaver/pvusa.hpp"
#include "peakshaver/simulator.hpp"
#include "peakshaver/sky_class.hpp"
#include "peakshaver/synth.hpp"
#include "peakshaver/text_format.hpp"

namespace fs = std::filesystem;
using namespace peakshaver;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out;
};

RunConfig load_config(const Common& c) {
  const std::string text = c.config_path.empty() ? std::string() : read_file(c.config_path);
  return parse_run_config(text, c.overrides, seed_from_environment());
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void write_manifest(RunManifest& m, const std::string& dir) {
  write_file_atomic(join(dir, "manifest.json"), m.to_json().dump(2) + "\n");
}

void add_config_options(CLI::App* cmd, Common& c, bool needs_out) {
  cmd->add_option("-c,--config", c.config_path, "flat key = value config file");
  cmd->add_option("-s,--set", c.overrides, "override a config key (key=value)");
  auto* out = cmd->add_option("-o,--out", c.out, "output directory");
  if (needs_out) out->required();
}

int cmd_synth(const Common& c) {
  const RunConfig cfg = load_config(c);
  RunManifest m;
  m.command = "synth";
  m.seed = cfg.synth.seed;
  m.config = cfg.echo;
  for (const auto& [name, content] : synth_files(cfg)) {
    const auto path = join(c.out, name);
    write_file_atomic(path, content);
    m.add_output(path);
  }
  write_manifest(m, c.out);
  return 0;
}

int cmd_simulate(const Common& c) {
  const RunConfig cfg = load_config(c);
  const RunInputs in = load_inputs(cfg);
  auto source = make_source(cfg, in);
  SimResult r;
  try {
    r = run_closed_loop(cfg.sim, in.truth, *source, in.tariff, cfg.battery, in.calendar, cfg.e0);
  } catch (const SimulationError& e) {
    if (!e.problem_dump().empty()) write_file_atomic(join(c.out, "failed_step.lp"), e.problem_dump());
    throw;
  }
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";

  RunManifest m;
  m.command = "simulate";
  m.seed = cfg.sim.seed;
  m.config = cfg.echo;
  for (const auto& f : in.files) m.add_input(f);
  const auto traj = join(c.out, "trajectory.csv");
  const auto report = join(c.out, "cost_report.json");
  write_file_atomic(traj, format_trajectory_csv(in.grid, r.trajectory));
  write_file_atomic(report, to_json(r.report).dump(2) + "\n");
  m.add_output(traj);
  m.add_output(report);
  write_manifest(m, c.out);
  std::cout << to_json(r.report).dump() << "\n";
  return 0;
}

int cmd_sweep(const Common& c, const std::string& parameter, const std::vector<double>& values) {
  const RunConfig cfg = load_config(c);
  const RunInputs in = load_inputs(cfg);
  const SweepAxis axis{parameter, values};
  const auto rows = run_sweep(cfg.sim, axis, [&] { return make_source(cfg, in); }, in.truth, in.tariff,
                              cfg.battery, in.calendar, cfg.e0);
  RunManifest m;
  m.command = "sweep";
  m.seed = cfg.sim.seed;
  m.config = cfg.echo;
  m.config["sweep." + parameter] = [&] {
    std::string s;
    for (double v : values) s += (s.empty() ? "" : ",") + format_double(v);
    return s;
  }();
  for (const auto& f : in.files) m.add_input(f);
  const auto table = join(c.out, "sweep.csv");
  write_file_atomic(table, format_sweep_csv(rows));
  m.add_output(table);
  write_manifest(m, c.out);
  return 0;
}

int cmd_oracle(const Common& c, int steps, int levels) {
  const RunConfig cfg = load_config(c);
  const RunInputs in = load_inputs(cfg);
  if (steps < 1 || steps > 8 || steps > in.truth.steps()) throw ConfigError("oracle: steps must lie in [1, min(8, N)]");
  const auto data = in.truth.slice(0, steps);
  const TimeGrid grid(in.grid.start(), steps, in.grid.step_hours());
  const Tariff tariff = cfg.make_tariff(grid);
  const auto calendar = PeakCalendar::uniform(steps, steps, grid.step_hours());
  const auto sol = lp::solve(build_full_horizon(data, tariff, cfg.battery, calendar, cfg.e0));
  if (sol.status != lp::SolveStatus::Optimal) throw SimulationError("oracle LP not optimal", 0, "");
  const double dp = synth::dp_oracle(data, tariff, cfg.battery, calendar, cfg.e0, levels);
  const nlohmann::json out = {{"steps", steps},
                              {"energy_levels", levels},
                              {"lp", sol.objective_value},
                              {"dp", dp},
                              {"relative_gap", dp == 0.0 ? 0.0 : (dp - sol.objective_value) / std::abs(dp)}};
  std::cout << out.dump() << "\n";
  return 0;
}

int cmd_fit_pv(const std::string& samples_path, const std::string& out) {
  const auto samples = parse_pv_samples_csv(read_file(samples_path), samples_path);
  const auto g = fit_pvusa(samples);
  const nlohmann::json doc = {{"gamma1", g.gamma1}, {"gamma2", g.gamma2}, {"gamma3", g.gamma3}};
  if (out.empty()) {
    std::cout << doc.dump() << "\n";
  } else {
    write_file_atomic(out, doc.dump(2) + "\n");
  }
  return 0;
}

int cmd_classify(const std::string& weather_path, const std::string& clearsky_path, double threshold,
                 const std::string& out) {
  const auto w = parse_weather_csv(read_file(weather_path), weather_path);
  const auto cs = parse_clearsky_csv(read_file(clearsky_path), clearsky_path);
  if (w.grid.start() != cs.grid.start() || w.grid.steps() != cs.grid.steps()) {
    throw IngestError(clearsky_path + " does not cover the same hours as " + weather_path);
  }
  if (hour_of_day(w.grid.start()) != 0 || w.grid.steps() % 24 != 0) {
    throw IngestError(weather_path + ": classification needs whole days starting at midnight UTC");
  }
  std::string csv = "date,scenario_id,sky\n";
  for (int d = 0; d < w.grid.steps() / 24; ++d) {
    const auto date = format_timestamp(w.grid.time_at(d * 24)).substr(0, 10);
    for (std::size_t j = 0; j < w.irradiance.size(); ++j) {
      const auto sky = classify_day(std::span(w.irradiance[j]).subspan(d * 24, 24),
                                    std::span(cs.clearsky).subspan(d * 24, 24), threshold);
      csv += date + "," + std::to_string(j + 1) + "," + std::string(to_string(sky)) + "\n";
    }
  }
  if (out.empty()) {
    std::cout << csv;
  } else {
    write_file_atomic(out, csv);
  }
  return 0;
}

int report_error(std::string_view type, const std::string& message, int code, nlohmann::json extra = {}) {
  nlohmann::json err = {{"type", type}, {"message", message}};
  if (!extra.is_null()) err.update(extra);
  std::cerr << nlohmann::json{{"error", err}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Battery dispatch for demand-charge management"};
  app.set_version_flag("--version", PEAKSHAVER_VERSION);
  app.require_subcommand(1);

  Common synth_opts, sim_opts, sweep_opts, oracle_opts;
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset (data, scenarios, weather, clear sky)");
  add_config_options(synth, synth_opts, true);

  auto* simulate = app.add_subcommand("simulate", "closed-loop run: trajectory, cost report, manifest");
  add_config_options(simulate, sim_opts, true);

  std::string sweep_param;
  std::vector<double> sweep_values;
  auto* sweep = app.add_subcommand("sweep", "one run per parameter value, results table");
  add_config_options(sweep, sweep_opts, true);
  sweep->add_option("-p,--parameter", sweep_param, "theta, m1, horizon_m, filter_alpha, noise_rmse, m2, weighting_on")
      ->required();
  sweep->add_option("-v,--values", sweep_values, "comma separated values")->required()->delimiter(',');

  int oracle_steps = 6, oracle_levels = 64;
  auto* oracle = app.add_subcommand("oracle", "full-horizon LP against the discretized DP on the first steps");
  add_config_options(oracle, oracle_opts, false);
  oracle->add_option("--steps", oracle_steps, "number of steps (<= 8)");
  oracle->add_option("--levels", oracle_levels, "energy levels of the DP (<= 64)");

  std::string samples_path, fit_out;
  auto* fit_pv = app.add_subcommand("fit-pv", "least-squares PVUSA fit; prints the coefficients as JSON");
  fit_pv->add_option("samples", samples_path, "CSV irradiance_wm2,temp_c,pv_kw")->required();
  fit_pv->add_option("-o,--out", fit_out, "write JSON here instead of stdout");

  std::string weather_path, clearsky_path, classify_out;
  double threshold = kDefaultClearThreshold;
  auto* classify = app.add_subcommand("classify", "clear/cloudy label per scenario and day");
  classify->add_option("weather", weather_path, "weather CSV")->required();
  classify->add_option("clearsky", clearsky_path, "clear-sky CSV")->required();
  classify->add_option("--threshold", threshold, "clear-sky index threshold");
  classify->add_option("-o,--out", classify_out, "write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), 64);
  }

  try {
    if (*synth) return cmd_synth(synth_opts);
    if (*simulate) return cmd_simulate(sim_opts);
    if (*sweep) return cmd_sweep(sweep_opts, sweep_param, sweep_values);
    if (*oracle) return cmd_oracle(oracle_opts, oracle_steps, oracle_levels);
    if (*fit_pv) return cmd_fit_pv(samples_path, fit_out);
    if (*classify) return cmd_classify(weather_path, clearsky_path, threshold, classify_out);
  } catch (const ConfigError& e) {
    return report_error("config", e.what(), 2);
  } catch (const IngestError& e) {
    return report_error("ingest", e.what(), 3);
  } catch (const SimulationError& e) {
    return report_error("simulation", e.what(), 4, {{"step", e.step()}});
  } catch (const FitError& e) {
    return report_error("fit", e.what(), 5);
  } catch (const ClassificationError& e) {
    return report_error("classification", e.what(), 5);
  } catch (const DomainError& e) {
    return report_error("domain", e.what(), 6);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), 1);
  }
  return 1;
}
