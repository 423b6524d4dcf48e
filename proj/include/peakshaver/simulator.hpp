#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "peakshaver/core_types.hpp"
#include "peakshaver/forecast_source.hpp"
#include "peakshaver/lp.hpp"
#include "peakshaver/policy.hpp"
#include "peakshaver/problems.hpp"

namespace peakshaver {

enum class SimMode { FullHorizonOracle, DetMpc, StochMpc, NoStorage, EnergyOnly, DailyPeak };

std::string_view to_string(SimMode m);
SimMode parse_sim_mode(std::string_view text);

struct SimConfig {
  SimMode mode = SimMode::DetMpc;
  int horizon_m = 24;
  MpcOptions mpc{};
  PolicyStructure structure = PolicyStructure::constant_first_step();
  double filter_alpha = 0.0;
  double noise_rmse = 0.0;  // historical net-demand RMSE (kW) driving the first-step noise
  bool refit = false;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrajectoryRow {
  int t = 0;
  double p_grid = 0.0;
  double p_c = 0.0;
  double p_dc = 0.0;
  double energy = 0.0;  // after the step
  double curtailed_pv = 0.0;
  double s_init = 0.0;  // peak so far in the period, this step included
  int period_id = 0;
  double grid_slack = 0.0;
};

struct CostReport {
  double energy_cost = 0.0;
  double peak_cost = 0.0;
  double terminal_credit = 0.0;
  double total = 0.0;
  std::vector<double> peaks;
};

nlohmann::json to_json(const CostReport& r);

/// Realized cost of a grid-power trajectory: energy, per-period peaks, terminal credit
/// at the minimum price of the whole horizon.
CostReport evaluate_true_cost(std::span<const double> p_grid, const Tariff& tariff, const PeakCalendar& calendar,
                              const BatteryParams& battery, double e_final);

struct SimResult {
  std::vector<TrajectoryRow> trajectory;
  CostReport report;
  double e_final = 0.0;
  int lp_solves = 0;
  long lp_iterations = 0;
  std::vector<std::string> warnings;
};

/// Receding-horizon run over truth.steps() steps (or a single full-horizon solve for the
/// oracle and baseline modes). Throws SimulationError when a solve is not optimal.
SimResult run_closed_loop(const SimConfig& config, const ExogenousData& truth, ForecastSource& forecasts,
                          const Tariff& tariff, const BatteryParams& battery, const PeakCalendar& calendar, double e0,
                          const lp::LpSolver* solver = nullptr);

/// Per-step seed for the first-step noise draw.
std::uint64_t step_seed(std::uint64_t run_seed, int t);

struct SweepAxis {
  std::string parameter;  // theta, m1, horizon_m, filter_alpha, noise_rmse, m2, weighting_on
  std::vector<double> values;
};

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  CostReport report;
};

using SourceFactory = std::function<std::unique_ptr<ForecastSource>()>;

/// Sets one sweepable parameter. Throws ConfigError for unknown names.
void apply_parameter(SimConfig& config, std::string_view parameter, double value);

/// One run per axis value with a fresh forecast source; rows sorted by value.
std::vector<SweepRow> run_sweep(const SimConfig& base, const SweepAxis& axis, const SourceFactory& make_source,
                                const ExogenousData& truth, const Tariff& tariff, const BatteryParams& battery,
                                const PeakCalendar& calendar, double e0);

}  // namespace peakshaver
