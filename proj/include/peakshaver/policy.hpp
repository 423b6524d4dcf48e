#pragma once

#include <variant>
#include <vector>

#include "peakshaver/core_types.hpp"
#include "peakshaver/lp.hpp"
#include "peakshaver/problems.hpp"

namespace peakshaver {

struct Hull {
  double lo = 0.0;
  double hi = 0.0;
  double clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

struct ConstantPolicy {
  double value = 0.0;
};

/// p_grid = slope * clamp(realization, hull) + offset
struct SaturatedAffinePolicy {
  double slope = 0.0;
  double offset = 0.0;
  Hull hull;
};

/// p_grid = A P + B over the whole window; only row 0 is ever applied.
struct BandedAffinePolicy {
  std::vector<std::vector<double>> a;  // dense M x M, zero above the diagonal and outside the band
  std::vector<double> b;
  std::vector<Hull> hulls;  // per step
  int m2 = 0;
};

using DecisionPolicy = std::variant<ConstantPolicy, SaturatedAffinePolicy, BandedAffinePolicy>;

/// Grid power for the first step given the realized net demand; never negative.
double evaluate_policy(const DecisionPolicy& policy, double realization);

/// grid[0] of a deterministic problem.
DecisionPolicy extract_policy(const lp::LpProblem& det_problem, const lp::LpSolution& solution);
/// Policy matching the structure of a stochastic problem. ScenarioFree yields the
/// scenario mean of grid[0, j].
DecisionPolicy extract_policy(const StochasticProblem& problem, const lp::LpSolution& solution);

/// Dispatch actually applied in one step. p_grid = (realization + curtailed_pv) + p_c - p_dc exactly.
struct AppliedStep {
  double p_grid = 0.0;
  double p_c = 0.0;
  double p_dc = 0.0;
  double curtailed_pv = 0.0;
  double grid_slack_added = 0.0;  // p_grid minus the policy's request; negative when grid was reduced
};

/// Splits p_grid - realization into charging or discharging and resolves limit violations.
/// Surplus beyond the charge limits is curtailed from PV first, then taken off the grid;
/// a discharge shortfall is bought from the grid.
AppliedStep repair_feasibility(double p_grid, double realization, const BatteryParams& battery, double e_t,
                               double pv_available, double step_hours = 1.0);

/// State after applying `step` at state.t.
MpcState advance_state(const MpcState& state, const AppliedStep& step, const BatteryParams& battery,
                       const PeakCalendar& calendar);

}  // namespace peakshaver
