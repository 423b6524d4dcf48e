#include "peakshaver/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "peakshaver/error_filter.hpp"
#include "peakshaver/errors.hpp"

namespace peakshaver {

std::string_view to_string(SimMode m) {
  switch (m) {
    case SimMode::FullHorizonOracle: return "full_horizon";
    case SimMode::DetMpc: return "det_mpc";
    case SimMode::StochMpc: return "stoch_mpc";
    case SimMode::NoStorage: return "no_storage";
    case SimMode::EnergyOnly: return "energy_only";
    case SimMode::DailyPeak: return "daily_peak";
  }
  return "?";
}

SimMode parse_sim_mode(std::string_view text) {
  for (auto m : {SimMode::FullHorizonOracle, SimMode::DetMpc, SimMode::StochMpc, SimMode::NoStorage,
                 SimMode::EnergyOnly, SimMode::DailyPeak}) {
    if (text == to_string(m)) return m;
  }
  throw ConfigError("unknown mode '" + std::string(text) +
                    "' (expected full_horizon, det_mpc, stoch_mpc, no_storage, energy_only, daily_peak)");
}

void SimConfig::validate() const {
  if (horizon_m < 1) throw ConfigError("horizon_m must be >= 1");
  if (!(filter_alpha >= 0.0 && filter_alpha <= 1.0)) throw ConfigError("filter_alpha must lie in [0, 1]");
  if (!(noise_rmse >= 0.0)) throw ConfigError("noise_rmse must be >= 0");
  try {
    mpc.intra.validate();
    structure.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

nlohmann::json to_json(const CostReport& r) {
  return {{"energy_cost", r.energy_cost},
          {"peak_cost", r.peak_cost},
          {"terminal_credit", r.terminal_credit},
          {"total", r.total},
          {"peaks", r.peaks}};
}

CostReport evaluate_true_cost(std::span<const double> p_grid, const Tariff& tariff, const PeakCalendar& calendar,
                              const BatteryParams& battery, double e_final) {
  const int n = static_cast<int>(p_grid.size());
  if (n < 1 || tariff.steps() != n || calendar.steps() != n) throw DomainError("evaluate_true_cost: length mismatch");
  CostReport r;
  r.peaks.assign(static_cast<std::size_t>(calendar.periods()), 0.0);
  const double h = calendar.step_hours();
  for (int t = 0; t < n; ++t) {
    r.energy_cost += tariff.buy(t) * h * p_grid[t];
    auto& peak = r.peaks[static_cast<std::size_t>(calendar.period_of(t))];
    peak = std::max(peak, p_grid[t]);
  }
  for (double p : r.peaks) r.peak_cost += tariff.peak_price() * p;
  r.terminal_credit = terminal_price(tariff, 0, n, battery) * e_final;
  r.total = r.energy_cost + r.peak_cost - r.terminal_credit;
  return r;
}

std::uint64_t step_seed(std::uint64_t run_seed, int t) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = run_seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(t) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

lp::LpSolution solve_or_throw(const lp::LpSolver& solver, const lp::LpProblem& problem, int step,
                              SimResult& result) {
  lp::LpSolution s = solver.solve(problem);
  ++result.lp_solves;
  result.lp_iterations += s.iterations;
  if (s.status != lp::SolveStatus::Optimal) {
    throw SimulationError("LP " + std::string(lp::to_string(s.status)) + " at step " + std::to_string(step), step,
                          lp::dump(problem));
  }
  return s;
}

// Replays the dispatch of a full-horizon solution.
void replay_full_horizon(const lp::LpProblem& problem, const lp::LpSolution& sol, const ExogenousData& truth,
                         const PeakCalendar& calendar, SimResult& result) {
  const int n = truth.steps();
  double running = 0.0;
  for (int t = 0; t < n; ++t) {
    const std::string k = std::to_string(t);
    TrajectoryRow row;
    row.t = t;
    row.p_grid = sol.value(problem, "grid[" + k + "]");
    row.p_c = sol.value(problem, "charge[" + k + "]");
    row.p_dc = sol.value(problem, "discharge[" + k + "]");
    row.energy = sol.value(problem, "energy[" + std::to_string(t + 1) + "]");
    row.curtailed_pv = std::max(row.p_grid - (truth.net_demand(t) + row.p_c - row.p_dc), 0.0);
    row.period_id = calendar.period_of(t);
    if (t > 0 && row.period_id != calendar.period_of(t - 1)) running = 0.0;
    running = std::max(running, row.p_grid);
    row.s_init = running;
    result.trajectory.push_back(row);
  }
  result.e_final = sol.value(problem, "energy[" + std::to_string(n) + "]");
}

}  // namespace

SimResult run_closed_loop(const SimConfig& config, const ExogenousData& truth, ForecastSource& forecasts,
                          const Tariff& tariff, const BatteryParams& battery, const PeakCalendar& calendar, double e0,
                          const lp::LpSolver* solver) {
  config.validate();
  truth.validate();
  battery.validate();
  const int n = truth.steps();
  if (n < 1 || tariff.steps() != n || calendar.steps() != n) {
    throw DomainError("run_closed_loop: truth, tariff and calendar must have equal lengths");
  }
  if (!(e0 >= 0.0 && e0 <= battery.e_max)) throw DomainError("run_closed_loop: e0 outside [0, e_max]");
  const lp::SimplexSolver default_solver;
  const lp::LpSolver& lp_solver = solver != nullptr ? *solver : default_solver;
  const double h = calendar.step_hours();

  SimResult result;
  switch (config.mode) {
    case SimMode::FullHorizonOracle:
    case SimMode::EnergyOnly:
    case SimMode::DailyPeak: {
      FullHorizonOptions opts;
      opts.include_peak = config.mode != SimMode::EnergyOnly;
      // Days are counted from the first step.
      const PeakCalendar cal = config.mode == SimMode::DailyPeak
                                   ? PeakCalendar::uniform(n, std::max(1, static_cast<int>(std::lround(24.0 / h))), h)
                                   : calendar;
      const auto problem = build_full_horizon(truth, tariff, battery, cal, e0, opts);
      const auto sol = solve_or_throw(lp_solver, problem, 0, result);
      replay_full_horizon(problem, sol, truth, calendar, result);
      break;
    }
    case SimMode::NoStorage: {
      double running = 0.0;
      for (int t = 0; t < n; ++t) {
        const double net = truth.net_demand(t);
        TrajectoryRow row;
        row.t = t;
        row.p_grid = std::max(net, 0.0);
        row.curtailed_pv = row.p_grid - net;
        row.energy = e0;
        row.period_id = calendar.period_of(t);
        if (t > 0 && row.period_id != calendar.period_of(t - 1)) running = 0.0;
        running = std::max(running, row.p_grid);
        row.s_init = running;
        result.trajectory.push_back(row);
      }
      result.e_final = e0;
      break;
    }
    case SimMode::DetMpc:
    case SimMode::StochMpc: {
      MpcState state{e0, 0.0, 0};
      FilterState filter{config.filter_alpha, 0.0};
      for (int t = 0; t < n; ++t) {
        state.t = t;
        const int m = std::min(config.horizon_m, n - t);
        forecasts.before_step(t, config.refit);
        ScenarioEnsemble ens = forecasts.forecast(t, m);
        if (ens.scenarios() == 0 || ens.steps() != m) {
          throw SimulationError("forecast source returned a malformed ensemble", t);
        }
        double raw_first = 0.0;
        for (const auto& s : ens.net) raw_first += s.front();
        raw_first /= ens.scenarios();
        if (config.filter_alpha > 0.0) {
          for (auto& s : ens.net) s = apply_error_filter(s, filter);
        }

        DecisionPolicy policy;
        if (config.mode == SimMode::DetMpc) {
          const auto problem = build_det_mpc(ens.mean(), state, config.mpc, tariff, battery, calendar);
          const auto sol = solve_or_throw(lp_solver, problem, t, result);
          policy = extract_policy(problem, sol);
        } else {
          std::vector<double> first;
          for (const auto& s : ens.net) first.push_back(s.front());
          const ScenarioNoise noise{scenario_noise_sigma(config.noise_rmse, first), step_seed(config.seed, t)};
          const auto problem =
              build_stochastic(ens, state, config.structure, config.mpc, tariff, battery, calendar, noise);
          const auto sol = solve_or_throw(lp_solver, problem.lp, t, result);
          policy = extract_policy(problem, sol);
        }

        const double realized = truth.net_demand(t);
        const double request = evaluate_policy(policy, realized);
        const AppliedStep step = repair_feasibility(request, realized, battery, state.e_t, truth.pv[t], h);
        const MpcState next = advance_state(state, step, battery, calendar);

        TrajectoryRow row;
        row.t = t;
        row.p_grid = step.p_grid;
        row.p_c = step.p_c;
        row.p_dc = step.p_dc;
        row.energy = next.e_t;
        row.curtailed_pv = step.curtailed_pv;
        row.s_init = std::max(state.s_init, step.p_grid);
        row.period_id = calendar.period_of(t);
        row.grid_slack = step.grid_slack_added;
        result.trajectory.push_back(row);

        filter.observe(raw_first, realized);
        forecasts.observe(t, truth.demand[t], truth.pv[t]);
        state = next;
      }
      result.e_final = state.e_t;
      break;
    }
  }

  std::vector<double> grid;
  grid.reserve(result.trajectory.size());
  for (const auto& r : result.trajectory) grid.push_back(r.p_grid);
  result.report = evaluate_true_cost(grid, tariff, calendar, battery, result.e_final);
  result.warnings = forecasts.warnings();
  return result;
}

void apply_parameter(SimConfig& c, std::string_view p, double v) {
  auto as_int = [&](const char* name) {
    if (v != std::floor(v)) throw ConfigError(std::string(name) + " must be an integer");
    return static_cast<int>(v);
  };
  if (p == "theta") {
    c.mpc.intra.theta = v;
  } else if (p == "m1") {
    c.mpc.intra.m1 = as_int("m1");
  } else if (p == "horizon_m") {
    c.horizon_m = as_int("horizon_m");
  } else if (p == "filter_alpha") {
    c.filter_alpha = v;
  } else if (p == "noise_rmse") {
    c.noise_rmse = v;
  } else if (p == "m2") {
    c.structure.m2 = as_int("m2");
  } else if (p == "weighting_on") {
    c.mpc.weighting_on = v != 0.0;
  } else {
    throw ConfigError("unknown sweep parameter '" + std::string(p) +
                      "' (valid: theta, m1, horizon_m, filter_alpha, noise_rmse, m2, weighting_on)");
  }
}

std::vector<SweepRow> run_sweep(const SimConfig& base, const SweepAxis& axis, const SourceFactory& make_source,
                                const ExogenousData& truth, const Tariff& tariff, const BatteryParams& battery,
                                const PeakCalendar& calendar, double e0) {
  if (axis.values.empty()) throw ConfigError("sweep axis '" + axis.parameter + "' has no values");
  std::vector<double> values = axis.values;
  std::sort(values.begin(), values.end());
  std::vector<SweepRow> rows;
  for (double v : values) {
    SimConfig c = base;
    apply_parameter(c, axis.parameter, v);
    auto source = make_source();
    const auto r = run_closed_loop(c, truth, *source, tariff, battery, calendar, e0);
    rows.push_back({axis.parameter, v, r.report});
  }
  return rows;
}

}  // namespace peakshaver
