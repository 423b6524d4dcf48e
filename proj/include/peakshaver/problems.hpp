#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "peakshaver/core_types.hpp"
#include "peakshaver/lp.hpp"

namespace peakshaver {

/// How the current (u) and later (u+1, ...) billing periods inside one MPC window are weighted.
///   FF: every period fully.  PP: each period by its share of the window.
///   FP: the current period fully, later ones by the share of the window from them onwards.
enum class PeakStrategy { FF, PP, FP };

std::string_view to_string(PeakStrategy s);
PeakStrategy parse_peak_strategy(std::string_view text);

/// Blend of the peak over the first m1 steps (weight theta) with the window peak (1 - theta).
struct IntraPeakWeighting {
  double theta = 0.0;
  int m1 = 24;

  void validate() const;
};

struct PolicyStructure {
  enum class Kind { ScenarioFree, ConstantFirstStep, AffineFirstStep, BandedCausal };
  Kind kind = Kind::ScenarioFree;
  int m2 = 0;                   // band width, BandedCausal only
  bool constant_first = false;  // BandedCausal: drop A[0,0] so the applied step is constant

  static PolicyStructure scenario_free() { return {}; }
  static PolicyStructure constant_first_step() { return {Kind::ConstantFirstStep, 0, false}; }
  static PolicyStructure affine_first_step() { return {Kind::AffineFirstStep, 0, false}; }
  static PolicyStructure banded_causal(int m2, bool constant_first = false) {
    return {Kind::BandedCausal, m2, constant_first};
  }
  void validate() const;
};

std::string_view to_string(PolicyStructure::Kind k);
PolicyStructure::Kind parse_policy_structure(std::string_view text);

/// Closed-loop state at step t.
struct MpcState {
  double e_t = 0.0;     // stored energy (kWh)
  double s_init = 0.0;  // highest grid power so far in the current period (kW)
  int t = 0;

  void validate(const BatteryParams& battery) const;
};

struct FullHorizonOptions {
  bool include_peak = true;
  /// Lower bound on the first period's peak variable.
  double initial_peak_floor = 0.0;
};

/// Deterministic LP over the whole of `data`. Variables (in order): energy[0], then per step
/// grid[t], charge[t], discharge[t], energy[t+1], then peak[q]. `calendar` must cover data.steps().
lp::LpProblem build_full_horizon(const ExogenousData& data, const Tariff& tariff, const BatteryParams& battery,
                                 const PeakCalendar& calendar, double e0, const FullHorizonOptions& options = {});

/// Share of [t, t + m) lying in the period of t.
double compute_beta(int t, int m, const PeakCalendar& calendar);
/// Share of [t, t + m) in each period it touches, current period first. Requires t + m <= steps.
std::vector<double> window_fractions(int t, int m, const PeakCalendar& calendar);

/// Unscaled peak weights, one per period touched by the window.
std::vector<double> peak_weights(PeakStrategy strategy, const std::vector<double>& fractions);

struct PeakCostTerms {
  std::vector<double> full;   // on peak[i]
  std::vector<double> early;  // on early_peak[i]; empty when theta == 0
};

/// Objective weights (already multiplied by p_peak) for a two-period window with current share beta.
/// `reaches_next` false omits the next-period entry.
PeakCostTerms peak_cost_terms(PeakStrategy strategy, double beta, double p_peak, const IntraPeakWeighting& intra,
                              bool reaches_next = true);

struct MpcOptions {
  PeakStrategy strategy = PeakStrategy::FP;
  IntraPeakWeighting intra{};
  bool weighting_on = true;  // multiply the peak cost by M / period length
};

/// Deterministic MPC LP on a window of forecasts starting at state.t. Variable naming and order
/// match build_full_horizon, with peak indices relative to the current period.
lp::LpProblem build_det_mpc(const ExogenousData& window, const MpcState& state, const MpcOptions& options,
                            const Tariff& tariff, const BatteryParams& battery, const PeakCalendar& calendar);
/// Same, from net demand directly.
lp::LpProblem build_det_mpc(const std::vector<double>& net_window, const MpcState& state, const MpcOptions& options,
                            const Tariff& tariff, const BatteryParams& battery, const PeakCalendar& calendar);

/// max(err_rmse - range(first_step), 0)
double scenario_noise_sigma(double err_rmse, const std::vector<double>& first_step);

struct ScenarioNoise {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

struct StochasticProblem {
  lp::LpProblem lp;
  /// Scenario net demand actually used in the LP (first step perturbed), net[j][k].
  std::vector<std::vector<double>> net;
  PolicyStructure structure;
  int scenarios = 0;
  int steps = 0;

  std::vector<double> first_step() const;
};

/// Scenario LP: per-scenario copies of the MPC block (names suffixed ",j"), summed objective,
/// shared initial state, plus the rows of the requested policy structure.
StochasticProblem build_stochastic(const ScenarioEnsemble& ensemble, const MpcState& state,
                                   const PolicyStructure& structure, const MpcOptions& options, const Tariff& tariff,
                                   const BatteryParams& battery, const PeakCalendar& calendar,
                                   const ScenarioNoise& noise = {});

/// Variable names used by the builders.
std::string grid_name(int k);
std::string grid_name(int k, int j);

}  // namespace peakshaver
