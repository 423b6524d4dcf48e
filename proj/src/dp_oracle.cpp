#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "peakshaver/errors.hpp"
#include "peakshaver/synth.hpp"

namespace peakshaver::synth {

namespace {

// Moves to the edge of the reachable range hit the power limit up to rounding.
constexpr double kLimitRounding = 1e-12;

// One point on the Pareto frontier of (cost so far, running peak) at some energy level.
struct Label {
  double cost;
  double peak;
  int parent;  // index into the previous step's label arena, -1 at the start
  int level;
};

struct Front {
  std::vector<int> ids;  // into the arena of the current step
};

void insert_label(std::vector<Label>& arena, Front& front, Label l) {
  for (int id : front.ids) {
    if (arena[id].cost <= l.cost && arena[id].peak <= l.peak) return;
  }
  std::erase_if(front.ids, [&](int id) { return l.cost <= arena[id].cost && l.peak <= arena[id].peak; });
  front.ids.push_back(static_cast<int>(arena.size()));
  arena.push_back(l);
}

struct Pass {
  double cost;
  std::vector<double> energy;  // n + 1 values
};

// Exact DP over the given per-step level sets (levels[0] = {e0}).
Pass solve_levels(const ExogenousData& data, const Tariff& tariff, const BatteryParams& battery,
                  const PeakCalendar& calendar, const std::vector<std::vector<double>>& levels) {
  const int n = data.steps();
  const double h = calendar.step_hours();
  const double p_term = terminal_price(tariff, 0, n, battery);

  std::vector<std::vector<Label>> arenas(static_cast<std::size_t>(n) + 1);
  std::vector<Front> fronts(1);
  arenas[0].push_back({0.0, 0.0, -1, 0});
  fronts[0].ids.push_back(0);
  for (int t = 0; t < n; ++t) {
    const auto& from_levels = levels[t];
    const auto& to_levels = levels[t + 1];
    auto& arena = arenas[t + 1];
    std::vector<Front> next(to_levels.size());
    const double net = data.net_demand(t);
    for (std::size_t from = 0; from < from_levels.size(); ++from) {
      if (fronts[from].ids.empty()) continue;
      for (std::size_t to = 0; to < to_levels.size(); ++to) {
        const double delta = to_levels[to] - from_levels[from];
        double p_c = 0.0;
        double p_dc = 0.0;
        if (delta > 0.0) {
          p_c = delta / (battery.m_c * h);
          if (p_c > battery.p_c_max * (1.0 + kLimitRounding)) continue;
          p_c = std::min(p_c, battery.p_c_max);
        } else if (delta < 0.0) {
          p_dc = -delta * battery.m_dc / h;
          if (p_dc > battery.p_dc_max * (1.0 + kLimitRounding)) continue;
          p_dc = std::min(p_dc, battery.p_dc_max);
        }
        const double grid = std::max(net + p_c - p_dc, 0.0);
        const double step_cost = tariff.buy(t) * grid * h;
        for (int id : fronts[from].ids) {
          const Label& l = arenas[t][id];
          insert_label(arena, next[to], {l.cost + step_cost, std::max(l.peak, grid), id, static_cast<int>(to)});
        }
      }
    }
    // Bill the peak when the period closes.
    if (t + 1 == n || calendar.period_of(t + 1) != calendar.period_of(t)) {
      for (auto& front : next) {
        if (front.ids.empty()) continue;
        int best = front.ids[0];
        for (int id : front.ids) {
          if (arena[id].cost + tariff.peak_price() * arena[id].peak <
              arena[best].cost + tariff.peak_price() * arena[best].peak) {
            best = id;
          }
        }
        arena[best].cost += tariff.peak_price() * arena[best].peak;
        arena[best].peak = 0.0;
        front.ids.assign(1, best);
      }
    }
    fronts = std::move(next);
  }

  Pass out{std::numeric_limits<double>::infinity(), {}};
  int best = -1;
  for (const Front& f : fronts) {
    for (int id : f.ids) {
      const Label& l = arenas[n][id];
      const double c = l.cost - p_term * levels[n][l.level];
      if (c < out.cost) {
        out.cost = c;
        best = id;
      }
    }
  }
  if (best < 0) throw InternalError("dp_oracle: no feasible path");
  out.energy.assign(static_cast<std::size_t>(n) + 1, 0.0);
  for (int t = n; t >= 0; --t) {
    const Label& l = arenas[t][best];
    out.energy[t] = levels[t][l.level];
    best = l.parent;
  }
  return out;
}

std::vector<double> grid_levels(double lo, double hi, int intervals, double keep, double e0) {
  std::vector<double> v;
  for (int i = 0; i <= intervals; ++i) v.push_back(lo + (hi - lo) * i / intervals);
  v.push_back(keep);
  v.push_back(e0);  // idling is always possible
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

double dp_oracle(const ExogenousData& data, const Tariff& tariff, const BatteryParams& battery,
                 const PeakCalendar& calendar, double e0, int energy_levels) {
  data.validate();
  battery.validate();
  const int n = data.steps();
  if (n < 1 || n > 8) throw DomainError("dp_oracle handles 1..8 steps, got " + std::to_string(n));
  if (energy_levels < 1 || energy_levels > 64) throw DomainError("dp_oracle handles 1..64 energy levels");
  if (tariff.steps() != n || calendar.steps() != n) throw DomainError("dp_oracle: length mismatch");
  if (!(e0 >= 0.0 && e0 <= battery.e_max)) throw DomainError("dp_oracle: e0 outside [0, e_max]");

  const double h = calendar.step_hours();
  const double up = battery.p_c_max * battery.m_c * h;
  const double down = battery.p_dc_max * h / battery.m_dc;
  std::vector<double> lo(n + 1), hi(n + 1);
  for (int t = 0; t <= n; ++t) {
    lo[t] = std::max(0.0, e0 - t * down);
    hi[t] = std::min(battery.e_max, e0 + t * up);
  }

  // Coarse pass over everything reachable, then passes on shrinking windows around the
  // incumbent path. Every level set keeps the incumbent, so the cost never increases.
  std::vector<std::vector<double>> levels(static_cast<std::size_t>(n) + 1);
  levels[0] = {e0};
  for (int t = 1; t <= n; ++t) levels[t] = grid_levels(lo[t], hi[t], energy_levels, lo[t], e0);
  Pass best = solve_levels(data, tariff, battery, calendar, levels);
  double width = 0.0;
  for (int t = 1; t <= n; ++t) width = std::max(width, (hi[t] - lo[t]) / 4.0);
  for (int pass = 0; pass < kDpRefinePasses && width > 1e-9; ++pass, width /= 4.0) {
    for (int t = 1; t <= n; ++t) {
      const double c = best.energy[t];
      levels[t] = grid_levels(std::max(lo[t], c - width), std::min(hi[t], c + width), energy_levels, c, e0);
    }
    Pass p = solve_levels(data, tariff, battery, calendar, levels);
    if (p.cost <= best.cost) best = std::move(p);
  }
  // Keep coarser results too, so doubling the level count never gives a worse bound.
  if (energy_levels > 1) return std::min(best.cost, dp_oracle(data, tariff, battery, calendar, e0, energy_levels / 2));
  return best.cost;
}

}  // namespace peakshaver::synth
