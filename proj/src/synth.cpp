#include "peakshaver/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "peakshaver/errors.hpp"

namespace peakshaver::synth {

namespace {

constexpr double kSunrise = 6.0;
constexpr double kSunset = 18.0;
constexpr double kClearSkyPeak = 1000.0;  // W/m^2

double sun_shape(int hour) {
  const double mid = hour + 0.5;
  if (mid <= kSunrise || mid >= kSunset) return 0.0;
  return std::sin(std::numbers::pi * (mid - kSunrise) / (kSunset - kSunrise));
}

// Office load: a plateau from 7 to 19 with soft shoulders.
double office_shape(int hour) {
  const double mid = hour + 0.5;
  if (mid <= 6.0 || mid >= 20.0) return 0.0;
  return std::pow(std::sin(std::numbers::pi * (mid - 6.0) / 14.0), 0.5);
}

}  // namespace

void SynthSpec::validate() const {
  if (days < 1) throw DomainError("synth: days must be >= 1");
  if (pv_peak_kw < 0 || demand_base_kw < 0 || demand_peak_kw < 0 || noise_sd < 0 || scenario_spread_sd < 0) {
    throw DomainError("synth: magnitudes must be >= 0");
  }
  if (!(weekend_factor >= 0.0 && weekend_factor <= 1.0)) throw DomainError("synth: weekend_factor must lie in [0, 1]");
  if (scenarios < 1) throw DomainError("synth: scenarios must be >= 1");
}

SynthData generate(const SynthSpec& spec) {
  spec.validate();
  const int n = spec.days * 24;
  SynthData d{TimeGrid(spec.start, n), {}, {}, {}, {}};
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> clearness_dist(0.25, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  d.truth.demand.resize(static_cast<std::size_t>(n));
  d.truth.pv.resize(static_cast<std::size_t>(n));
  d.clearsky.resize(static_cast<std::size_t>(n));
  d.irradiance.resize(static_cast<std::size_t>(n));
  d.temperature.resize(static_cast<std::size_t>(n));
  for (int day = 0; day < spec.days; ++day) {
    const double clearness = clearness_dist(rng);
    const double temp_offset = 2.0 * noise(rng);
    for (int h = 0; h < 24; ++h) {
      const int t = day * 24 + h;
      const Timestamp ts = d.grid.time_at(t);
      const int hour = hour_of_day(ts);
      const bool weekend = day_of_week(ts) >= 5;
      const double sun = sun_shape(hour);
      d.clearsky[t] = kClearSkyPeak * sun;
      d.irradiance[t] = d.clearsky[t] * clearness;
      d.temperature[t] = 8.0 + temp_offset + 6.0 * std::sin(2.0 * std::numbers::pi * (hour - 9.0) / 24.0);

      double pv = spec.pv_peak_kw * sun * clearness;
      const double pv_noise = noise(rng);
      if (sun > 0.0) pv += spec.noise_sd * pv_noise;
      d.truth.pv[t] = std::max(pv, 0.0);

      const double bump = (spec.demand_peak_kw - spec.demand_base_kw) * office_shape(hour);
      const double load = spec.demand_base_kw + (weekend ? spec.weekend_factor * bump : bump);
      d.truth.demand[t] = std::max(load + spec.noise_sd * noise(rng), 0.0);
    }
  }
  return d;
}

WeatherEnsemble generate_weather_ensemble(const SynthSpec& spec, const SynthData& data) {
  spec.validate();
  const int n = data.grid.steps();
  WeatherEnsemble w;
  std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double rel_spread = spec.pv_peak_kw > 0.0 ? spec.scenario_spread_sd / spec.pv_peak_kw : 0.0;
  for (int j = 0; j < spec.scenarios; ++j) {
    std::vector<double> irr(static_cast<std::size_t>(n)), temp(static_cast<std::size_t>(n));
    for (int day = 0; day * 24 < n; ++day) {
      const double factor = std::max(0.0, 1.0 + rel_spread * noise(rng));
      const double dtemp = noise(rng);
      for (int h = 0; h < 24 && day * 24 + h < n; ++h) {
        const int t = day * 24 + h;
        irr[t] = std::min(data.irradiance[t] * factor, data.clearsky[t] * 1.1);
        temp[t] = data.temperature[t] + dtemp;
      }
    }
    w.irradiance.push_back(std::move(irr));
    w.temperature.push_back(std::move(temp));
  }
  return w;
}

SyntheticEnsembleSource::SyntheticEnsembleSource(ExogenousData truth, int scenarios, double spread_sd,
                                                 std::uint64_t seed, double correlation)
    : scenarios_(scenarios), spread_sd_(spread_sd), seed_(seed), correlation_(correlation) {
  truth.validate();
  if (scenarios < 1) throw DomainError("ensemble needs at least one scenario");
  if (!(spread_sd >= 0.0)) throw DomainError("spread must be >= 0");
  if (!(correlation >= 0.0 && correlation < 1.0)) throw DomainError("correlation must lie in [0, 1)");
  net_ = truth.net_demand();
}

ScenarioEnsemble SyntheticEnsembleSource::forecast(int t, int m) {
  if (t < 0 || m < 1 || t + m > static_cast<int>(net_.size())) throw DomainError("forecast window out of range");
  ScenarioEnsemble e;
  std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                    static_cast<std::uint32_t>(t)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double innovation = std::sqrt(1.0 - correlation_ * correlation_);
  for (int j = 0; j < scenarios_; ++j) {
    std::vector<double> s(static_cast<std::size_t>(m));
    double z = noise(rng);
    for (int k = 0; k < m; ++k) {
      if (k > 0) z = correlation_ * z + innovation * noise(rng);
      const double sd = spread_sd_ * (k + 1) / 24.0;
      s[k] = net_[t + k] + (spread_sd_ > 0.0 ? sd * z : 0.0);
    }
    e.net.push_back(std::move(s));
  }
  return e;
}

double no_storage_cost(const ExogenousData& data, const Tariff& tariff, const BatteryParams& battery,
                       const PeakCalendar& calendar, double e0) {
  data.validate();
  const int n = data.steps();
  if (tariff.steps() != n || calendar.steps() != n) throw DomainError("no_storage_cost: length mismatch");
  double energy = 0.0;
  std::vector<double> peaks(static_cast<std::size_t>(calendar.periods()), 0.0);
  for (int t = 0; t < n; ++t) {
    const double grid = std::max(data.net_demand(t), 0.0);
    energy += tariff.buy(t) * grid * calendar.step_hours();
    auto& p = peaks[static_cast<std::size_t>(calendar.period_of(t))];
    p = std::max(p, grid);
  }
  double peak_cost = 0.0;
  for (double p : peaks) peak_cost += tariff.peak_price() * p;
  return energy + peak_cost - terminal_price(tariff, 0, n, battery) * e0;
}

}  // namespace peakshaver::synth
