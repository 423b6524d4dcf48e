#include "peakshaver/problems.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "peakshaver/errors.hpp"

namespace peakshaver {

using lp::LpBuilder;
using lp::Term;
using lp::VarId;

std::string_view to_string(PeakStrategy s) {
  switch (s) {
    case PeakStrategy::FF: return "FF";
    case PeakStrategy::PP: return "PP";
    case PeakStrategy::FP: return "FP";
  }
  return "?";
}

PeakStrategy parse_peak_strategy(std::string_view text) {
  if (text == "FF") return PeakStrategy::FF;
  if (text == "PP") return PeakStrategy::PP;
  if (text == "FP") return PeakStrategy::FP;
  throw DomainError("unknown peak strategy '" + std::string(text) + "' (expected FF, PP or FP)");
}

std::string_view to_string(PolicyStructure::Kind k) {
  switch (k) {
    case PolicyStructure::Kind::ScenarioFree: return "scenario_free";
    case PolicyStructure::Kind::ConstantFirstStep: return "constant_first_step";
    case PolicyStructure::Kind::AffineFirstStep: return "affine_first_step";
    case PolicyStructure::Kind::BandedCausal: return "banded_causal";
  }
  return "?";
}

PolicyStructure::Kind parse_policy_structure(std::string_view text) {
  for (auto k : {PolicyStructure::Kind::ScenarioFree, PolicyStructure::Kind::ConstantFirstStep,
                 PolicyStructure::Kind::AffineFirstStep, PolicyStructure::Kind::BandedCausal}) {
    if (text == to_string(k)) return k;
  }
  throw DomainError("unknown policy structure '" + std::string(text) + "'");
}

void IntraPeakWeighting::validate() const {
  if (!(theta >= 0.0 && theta <= 1.0)) throw DomainError("theta must lie in [0, 1]");
  if (m1 < 1) throw DomainError("m1 must be at least 1");
}

void PolicyStructure::validate() const {
  if (kind == Kind::BandedCausal && m2 < 0) throw DomainError("band width m2 must be >= 0");
}

void MpcState::validate(const BatteryParams& battery) const {
  if (!(e_t >= 0.0 && e_t <= battery.e_max)) throw DomainError("state energy outside [0, e_max]");
  if (!(s_init >= 0.0) || !std::isfinite(s_init)) throw DomainError("s_init must be finite and >= 0");
  if (t < 0) throw DomainError("negative time index");
}

std::string grid_name(int k) { return "grid[" + std::to_string(k) + "]"; }
std::string grid_name(int k, int j) { return "grid[" + std::to_string(k) + "," + std::to_string(j) + "]"; }

// ------------------------------------------------------------ weights

std::vector<double> window_fractions(int t, int m, const PeakCalendar& calendar) {
  if (m < 1) throw DomainError("window length must be >= 1");
  if (t < 0 || t + m > calendar.steps()) throw DomainError("window leaves the peak calendar");
  std::vector<double> out;
  int k = t;
  while (k < t + m) {
    const int end = std::min(calendar.period_end(calendar.period_of(k)), t + m);
    out.push_back(static_cast<double>(end - k) / m);
    k = end;
  }
  return out;
}

double compute_beta(int t, int m, const PeakCalendar& calendar) {
  if (m < 1) throw DomainError("window length must be >= 1");
  if (t < 0 || t >= calendar.steps()) throw DomainError("time index outside the peak calendar");
  const int end = std::min(calendar.period_end(calendar.period_of(t)), t + m);
  return static_cast<double>(end - t) / m;
}

std::vector<double> peak_weights(PeakStrategy strategy, const std::vector<double>& fractions) {
  std::vector<double> w(fractions.size());
  double before = 0.0;
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    switch (strategy) {
      case PeakStrategy::FF: w[i] = 1.0; break;
      case PeakStrategy::PP: w[i] = fractions[i]; break;
      case PeakStrategy::FP: w[i] = i == 0 ? 1.0 : 1.0 - before; break;
    }
    before += fractions[i];
  }
  return w;
}

PeakCostTerms peak_cost_terms(PeakStrategy strategy, double beta, double p_peak, const IntraPeakWeighting& intra,
                              bool reaches_next) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("beta must lie in [0, 1]");
  intra.validate();
  std::vector<double> fractions{beta};
  if (reaches_next) fractions.push_back(1.0 - beta);
  const auto w = peak_weights(strategy, fractions);
  PeakCostTerms out;
  for (double wi : w) {
    out.full.push_back(p_peak * ((1.0 - intra.theta) * wi));
    if (intra.theta > 0.0) out.early.push_back(p_peak * (intra.theta * wi));
  }
  return out;
}

// ------------------------------------------------------------ shared block

namespace {

struct Block {
  const std::vector<double>* net = nullptr;
  int t0 = 0;
  double e0 = 0.0;
  double peak_floor = 0.0;
  std::string suffix;               // "" or ",j"
  std::vector<int> period;          // relative period of each step
  std::vector<double> full_coef;    // objective on peak[i]; empty = no peak terms
  std::vector<double> early_coef;   // objective on early_peak[i]; empty = none
  int early_steps = 0;
  double p_term = 0.0;
};

struct BlockVars {
  std::vector<VarId> grid, charge, discharge, energy;
};

std::string indexed(std::string_view base, int k, const std::string& suffix) {
  return std::string(base) + "[" + std::to_string(k) + suffix + "]";
}

void add_peak_family(LpBuilder& b, const Block& blk, const BlockVars& v, std::string_view name,
                     const std::vector<double>& coef, int steps) {
  for (std::size_t i = 0; i < coef.size(); ++i) {
    const int q = static_cast<int>(i);
    std::vector<VarId> members;
    for (int k = 0; k < steps; ++k) {
      if (blk.period[k] == q) members.push_back(v.grid[k]);
    }
    if (members.empty()) continue;
    const VarId peak = b.add_variable(indexed(name, q, blk.suffix), q == 0 ? blk.peak_floor : 0.0, lp::kInf, coef[i]);
    lp::add_epigraph_max(b, peak, members, "epi_" + indexed(name, q, blk.suffix));
  }
}

BlockVars add_block(LpBuilder& b, const Block& blk, const Tariff& tariff, const BatteryParams& battery, double h) {
  const auto& net = *blk.net;
  const int m = static_cast<int>(net.size());
  BlockVars v;
  v.energy.push_back(b.add_variable(indexed("energy", 0, blk.suffix), blk.e0, blk.e0));
  for (int k = 0; k < m; ++k) {
    v.grid.push_back(b.add_variable(indexed("grid", k, blk.suffix), 0.0, lp::kInf, tariff.buy(blk.t0 + k) * h));
    v.charge.push_back(b.add_variable(indexed("charge", k, blk.suffix), 0.0, battery.p_c_max));
    v.discharge.push_back(b.add_variable(indexed("discharge", k, blk.suffix), 0.0, battery.p_dc_max));
    v.energy.push_back(b.add_variable(indexed("energy", k + 1, blk.suffix), 0.0, battery.e_max,
                                      k + 1 == m ? -blk.p_term : 0.0));
  }
  for (int k = 0; k < m; ++k) {
    // grid >= net + charge - discharge
    b.add_le(indexed("balance", k, blk.suffix), {{v.charge[k], 1.0}, {v.discharge[k], -1.0}, {v.grid[k], -1.0}},
             -net[k]);
    b.add_eq(indexed("dyn", k, blk.suffix),
             {{v.energy[k + 1], 1.0},
              {v.energy[k], -1.0},
              {v.charge[k], -(battery.m_c * h)},
              {v.discharge[k], h / battery.m_dc}},
             0.0);
  }
  add_peak_family(b, blk, v, "peak", blk.full_coef, m);
  add_peak_family(b, blk, v, "early_peak", blk.early_coef, blk.early_steps);
  return v;
}

void check_net(const std::vector<double>& net) {
  for (double x : net) {
    if (!std::isfinite(x)) throw DomainError("non-finite net demand");
  }
}

// Objective weights of an MPC window; shared by the deterministic and stochastic builders.
void mpc_weights(Block& blk, int m, const MpcState& state, const MpcOptions& options, const Tariff& tariff,
                 const BatteryParams& battery, const PeakCalendar& calendar) {
  options.intra.validate();
  const int t = state.t;
  if (t + m > calendar.steps() || t + m > tariff.steps()) {
    throw DomainError("MPC window [" + std::to_string(t) + ", " + std::to_string(t + m) +
                      ") exceeds the calendar or tariff");
  }
  const int u = calendar.period_of(t);
  blk.t0 = t;
  blk.e0 = state.e_t;
  blk.peak_floor = state.s_init;
  blk.period.resize(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) blk.period[k] = calendar.period_of(t + k) - u;
  const double factor = options.weighting_on ? static_cast<double>(m) / calendar.period_steps(u) : 1.0;
  const auto w = peak_weights(options.strategy, window_fractions(t, m, calendar));
  const double theta = options.intra.theta;
  const double p_peak = tariff.peak_price();
  for (double wi : w) blk.full_coef.push_back(p_peak * (factor * ((1.0 - theta) * wi)));
  if (theta > 0.0) {
    blk.early_steps = std::min(options.intra.m1, m);
    const int early_periods = blk.period[blk.early_steps - 1] + 1;
    for (int i = 0; i < early_periods; ++i) blk.early_coef.push_back(p_peak * (factor * (theta * w[i])));
  }
  blk.p_term = terminal_price(tariff, t, t + m, battery);
}

}  // namespace

// ------------------------------------------------------------ builders

lp::LpProblem build_full_horizon(const ExogenousData& data, const Tariff& tariff, const BatteryParams& battery,
                                 const PeakCalendar& calendar, double e0, const FullHorizonOptions& options) {
  data.validate();
  battery.validate();
  const int n = data.steps();
  if (n < 1) throw DomainError("full-horizon problem needs at least one step");
  if (tariff.steps() != n) throw DomainError("tariff length does not match the data");
  if (calendar.steps() != n) throw DomainError("peak calendar length does not match the data");
  if (!(e0 >= 0.0 && e0 <= battery.e_max)) throw DomainError("initial energy outside [0, e_max]");
  if (!(options.initial_peak_floor >= 0.0)) throw DomainError("initial peak floor must be >= 0");

  const auto net = data.net_demand();
  Block blk;
  blk.net = &net;
  blk.e0 = e0;
  blk.peak_floor = options.initial_peak_floor;
  blk.period.resize(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) blk.period[t] = calendar.period_of(t);
  if (options.include_peak) blk.full_coef.assign(static_cast<std::size_t>(calendar.periods()), tariff.peak_price());
  blk.p_term = terminal_price(tariff, 0, n, battery);

  LpBuilder b;
  const auto v = add_block(b, blk, tariff, battery, calendar.step_hours());
  b.set_tie_break({{v.grid[0], 1.0}});
  return std::move(b).build();
}

lp::LpProblem build_det_mpc(const std::vector<double>& net_window, const MpcState& state, const MpcOptions& options,
                            const Tariff& tariff, const BatteryParams& battery, const PeakCalendar& calendar) {
  battery.validate();
  state.validate(battery);
  const int m = static_cast<int>(net_window.size());
  if (m < 1) throw DomainError("MPC window must hold at least one step");
  check_net(net_window);
  Block blk;
  blk.net = &net_window;
  mpc_weights(blk, m, state, options, tariff, battery, calendar);
  LpBuilder b;
  const auto v = add_block(b, blk, tariff, battery, calendar.step_hours());
  b.set_tie_break({{v.grid[0], 1.0}});
  return std::move(b).build();
}

lp::LpProblem build_det_mpc(const ExogenousData& window, const MpcState& state, const MpcOptions& options,
                            const Tariff& tariff, const BatteryParams& battery, const PeakCalendar& calendar) {
  window.validate();
  return build_det_mpc(window.net_demand(), state, options, tariff, battery, calendar);
}

double scenario_noise_sigma(double err_rmse, const std::vector<double>& first_step) {
  if (first_step.empty()) throw DomainError("scenario_noise_sigma needs at least one scenario");
  const auto [lo, hi] = std::minmax_element(first_step.begin(), first_step.end());
  return std::max(err_rmse - (*hi - *lo), 0.0);
}

std::vector<double> StochasticProblem::first_step() const {
  std::vector<double> out;
  out.reserve(net.size());
  for (const auto& s : net) out.push_back(s.front());
  return out;
}

StochasticProblem build_stochastic(const ScenarioEnsemble& ensemble, const MpcState& state,
                                   const PolicyStructure& structure, const MpcOptions& options, const Tariff& tariff,
                                   const BatteryParams& battery, const PeakCalendar& calendar,
                                   const ScenarioNoise& noise) {
  battery.validate();
  state.validate(battery);
  structure.validate();
  if (ensemble.scenarios() == 0) throw DomainError("stochastic problem needs at least one scenario");
  ensemble.validate();
  if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma)) throw DomainError("noise sigma must be finite and >= 0");

  StochasticProblem out;
  out.structure = structure;
  out.scenarios = ensemble.scenarios();
  out.steps = ensemble.steps();
  out.net = ensemble.net;
  for (const auto& s : out.net) check_net(s);
  if (noise.sigma > 0.0) {
    // One independent draw per scenario.
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> omega(0.0, noise.sigma);
    for (auto& s : out.net) s.front() += omega(rng);
  }

  const int m = out.steps;
  const int jn = out.scenarios;
  Block shape;
  mpc_weights(shape, m, state, options, tariff, battery, calendar);

  LpBuilder b;
  std::vector<BlockVars> vars;
  vars.reserve(static_cast<std::size_t>(jn));
  for (int j = 0; j < jn; ++j) {
    Block blk = shape;
    blk.net = &out.net[j];
    blk.suffix = "," + std::to_string(j);
    vars.push_back(add_block(b, blk, tariff, battery, calendar.step_hours()));
  }

  using Kind = PolicyStructure::Kind;
  switch (structure.kind) {
    case Kind::ScenarioFree: break;
    case Kind::ConstantFirstStep:
      for (int j = 1; j < jn; ++j) {
        b.add_eq("same_first[" + std::to_string(j) + "]", {{vars[j].grid[0], 1.0}, {vars[0].grid[0], -1.0}}, 0.0);
      }
      break;
    case Kind::AffineFirstStep: {
      const VarId a = b.add_variable("a", -lp::kInf, lp::kInf);
      const VarId bb = b.add_variable("b", -lp::kInf, lp::kInf);
      for (int j = 0; j < jn; ++j) {
        b.add_eq("policy[0," + std::to_string(j) + "]",
                 {{vars[j].grid[0], 1.0}, {a, -out.net[j][0]}, {bb, -1.0}}, 0.0);
      }
      break;
    }
    case Kind::BandedCausal: {
      // A[i,k] exists for max(0, i - m2) <= k <= i.
      std::vector<std::vector<std::pair<int, VarId>>> a_row(static_cast<std::size_t>(m));
      std::vector<VarId> b_vec;
      for (int i = 0; i < m; ++i) {
        for (int k = std::max(0, i - structure.m2); k <= i; ++k) {
          if (i == 0 && structure.constant_first) continue;
          a_row[i].emplace_back(k, b.add_variable("A[" + std::to_string(i) + "," + std::to_string(k) + "]",
                                                  -lp::kInf, lp::kInf));
        }
        b_vec.push_back(b.add_variable("B[" + std::to_string(i) + "]", -lp::kInf, lp::kInf));
      }
      for (int j = 0; j < jn; ++j) {
        for (int i = 0; i < m; ++i) {
          std::vector<Term> terms{{vars[j].grid[i], 1.0}, {b_vec[i], -1.0}};
          for (const auto& [k, var] : a_row[i]) terms.push_back({var, -out.net[j][k]});
          b.add_eq("policy[" + std::to_string(i) + "," + std::to_string(j) + "]", std::move(terms), 0.0);
        }
      }
      break;
    }
  }

  std::vector<Term> tie;
  for (int j = 0; j < jn; ++j) tie.push_back({vars[j].grid[0], 1.0});
  b.set_tie_break(std::move(tie));
  out.lp = std::move(b).build();
  return out;
}

}  // namespace peakshaver
