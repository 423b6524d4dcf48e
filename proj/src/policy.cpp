#include "peakshaver/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "peakshaver/errors.hpp"

namespace peakshaver {

namespace {
constexpr double kEnergySlack = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;
}  // namespace

double evaluate_policy(const DecisionPolicy& policy, double realization) {
  const double p = std::visit(
      Overloaded{[](const ConstantPolicy& c) { return c.value; },
                 [&](const SaturatedAffinePolicy& a) { return a.slope * a.hull.clamp(realization) + a.offset; },
                 [&](const BandedAffinePolicy& b) {
                   return b.a.at(0).at(0) * b.hulls.at(0).clamp(realization) + b.b.at(0);
                 }},
      policy);
  return std::max(p, 0.0);
}

DecisionPolicy extract_policy(const lp::LpProblem& det_problem, const lp::LpSolution& solution) {
  if (solution.status != lp::SolveStatus::Optimal) throw DomainError("cannot extract a policy from a non-optimal solution");
  return ConstantPolicy{solution.value(det_problem, grid_name(0))};
}

DecisionPolicy extract_policy(const StochasticProblem& problem, const lp::LpSolution& solution) {
  if (solution.status != lp::SolveStatus::Optimal) throw DomainError("cannot extract a policy from a non-optimal solution");
  const auto& lp = problem.lp;
  const int jn = problem.scenarios;
  const int m = problem.steps;
  auto hull_at = [&](int k) {
    Hull h{problem.net[0][k], problem.net[0][k]};
    for (int j = 1; j < jn; ++j) {
      h.lo = std::min(h.lo, problem.net[j][k]);
      h.hi = std::max(h.hi, problem.net[j][k]);
    }
    return h;
  };
  using Kind = PolicyStructure::Kind;
  switch (problem.structure.kind) {
    case Kind::ScenarioFree: {
      double sum = 0.0;
      for (int j = 0; j < jn; ++j) sum += solution.value(lp, grid_name(0, j));
      return ConstantPolicy{sum / jn};
    }
    case Kind::ConstantFirstStep: return ConstantPolicy{solution.value(lp, grid_name(0, 0))};
    case Kind::AffineFirstStep:
      return SaturatedAffinePolicy{solution.value(lp, "a"), solution.value(lp, "b"), hull_at(0)};
    case Kind::BandedCausal: {
      BandedAffinePolicy p;
      p.m2 = problem.structure.m2;
      p.a.assign(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(m), 0.0));
      for (int i = 0; i < m; ++i) {
        for (int k = std::max(0, i - p.m2); k <= i; ++k) {
          if (auto v = lp.find("A[" + std::to_string(i) + "," + std::to_string(k) + "]")) p.a[i][k] = solution.value(*v);
        }
        p.b.push_back(solution.value(lp, "B[" + std::to_string(i) + "]"));
        p.hulls.push_back(hull_at(i));
      }
      return p;
    }
  }
  throw InternalError("unhandled policy structure");
}

AppliedStep repair_feasibility(double p_grid, double realization, const BatteryParams& battery, double e_t,
                               double pv_available, double step_hours) {
  battery.validate();
  if (!std::isfinite(p_grid) || p_grid < 0.0) throw DomainError("repair_feasibility: p_grid must be finite and >= 0");
  if (!std::isfinite(realization) || !std::isfinite(pv_available) || pv_available < 0.0) {
    throw DomainError("repair_feasibility: bad realization or PV");
  }
  if (realization < -pv_available) {
    throw DomainError("repair_feasibility: realization below -pv_available implies negative demand");
  }
  if (!(e_t >= -kEnergySlack && e_t <= battery.e_max + kEnergySlack)) {
    throw DomainError("repair_feasibility: stored energy outside [0, e_max]");
  }
  if (!(step_hours > 0.0)) throw DomainError("repair_feasibility: step_hours must be > 0");

  AppliedStep s;
  const double diff = p_grid - realization;
  if (diff > 0.0) {
    const double headroom = std::max(battery.e_max - e_t, 0.0) / (battery.m_c * step_hours);
    const double c_max = std::min(battery.p_c_max, headroom);
    if (diff <= c_max) {
      s.p_c = diff;
    } else {
      s.p_c = c_max;
      s.curtailed_pv = std::min(diff - c_max, pv_available);
    }
  } else if (diff < 0.0) {
    const double d_max = std::min(battery.p_dc_max, std::max(e_t, 0.0) * battery.m_dc / step_hours);
    s.p_dc = std::min(-diff, d_max);
  }
  s.p_grid = (realization + s.curtailed_pv) + s.p_c - s.p_dc;
  if (s.p_grid < 0.0 && s.p_dc > 0.0) {
    // Rounding residue of a full discharge; shave it off the discharge instead.
    s.p_dc = (realization + s.curtailed_pv) + s.p_c;
    s.p_grid = (realization + s.curtailed_pv) + s.p_c - s.p_dc;
  }
  // Same residue on the charge side: absorb it in curtailment, else in charging, a few ulps at a time.
  const double inf = std::numeric_limits<double>::infinity();
  while (s.p_grid < 0.0 && s.p_dc == 0.0 && s.curtailed_pv > 0.0 && s.curtailed_pv < pv_available) {
    s.curtailed_pv = std::min(std::nextafter(s.curtailed_pv, inf), pv_available);
    s.p_grid = (realization + s.curtailed_pv) + s.p_c;
  }
  while (s.p_grid < 0.0 && s.p_dc == 0.0 && s.p_c > 0.0 && s.p_c < battery.p_c_max) {
    s.p_c = std::min(std::nextafter(s.p_c, inf), battery.p_c_max);
    s.p_grid = (realization + s.curtailed_pv) + s.p_c;
  }
  if (s.p_grid < 0.0) throw InternalError("repair_feasibility: could not balance the step");
  s.grid_slack_added = s.p_grid - p_grid;
  return s;
}

MpcState advance_state(const MpcState& state, const AppliedStep& step, const BatteryParams& battery,
                       const PeakCalendar& calendar) {
  if (state.t < 0 || state.t >= calendar.steps()) throw DomainError("advance_state: time index outside calendar");
  double e = state.e_t + storage_delta(step.p_c, step.p_dc, battery, calendar.step_hours());
  if (e < -kEnergySlack || e > battery.e_max + kEnergySlack) {
    throw InternalError("advance_state: stored energy " + std::to_string(e) + " left [0, e_max] at step " +
                        std::to_string(state.t));
  }
  e = std::clamp(e, 0.0, battery.e_max);
  MpcState next;
  next.e_t = e;
  next.t = state.t + 1;
  const bool new_period = next.t < calendar.steps() && calendar.period_of(next.t) != calendar.period_of(state.t);
  next.s_init = new_period ? 0.0 : std::max(state.s_init, step.p_grid);
  return next;
}

}  // namespace peakshaver
