#pragma once

#include <cstdint>
#include <vector>

#include "peakshaver/core_types.hpp"
#include "peakshaver/forecast_source.hpp"
#include "peakshaver/lp.hpp"

namespace peakshaver::synth {

struct SynthSpec {
  int days = 7;
  double pv_peak_kw = 40.0;
  double demand_base_kw = 30.0;
  double demand_peak_kw = 90.0;
  double weekend_factor = 0.3;
  double noise_sd = 2.0;
  double scenario_spread_sd = 3.0;  // ensemble spread (kW) at 24 h lead
  int scenarios = 21;
  std::uint64_t seed = 1;
  Timestamp start = Timestamp{std::chrono::sys_days{std::chrono::year{2018} / 3 / 1}};

  void validate() const;
};

/// Hourly synthetic weather; PV follows gamma1 = pv_peak_kw / 1000 on the realized irradiance.
struct SynthData {
  TimeGrid grid;
  ExogenousData truth;
  std::vector<double> clearsky;     // W/m^2
  std::vector<double> irradiance;   // realized, W/m^2
  std::vector<double> temperature;  // realized, degC
};

SynthData generate(const SynthSpec& spec);

/// Weather ensemble around the realized series, one series per scenario over the whole grid.
struct WeatherEnsemble {
  std::vector<std::vector<double>> irradiance;  // [j][t]
  std::vector<std::vector<double>> temperature;
};
WeatherEnsemble generate_weather_ensemble(const SynthSpec& spec, const SynthData& data);

/// Truth plus AR(1)-correlated perturbations whose standard deviation grows linearly with lead
/// time (spread_sd at 24 h). Deterministic in (seed, t); the first-step perturbation is included.
class SyntheticEnsembleSource final : public ForecastSource {
 public:
  SyntheticEnsembleSource(ExogenousData truth, int scenarios, double spread_sd, std::uint64_t seed,
                          double correlation = 0.8);
  ScenarioEnsemble forecast(int t, int m) override;

 private:
  std::vector<double> net_;
  int scenarios_;
  double spread_sd_;
  std::uint64_t seed_;
  double correlation_;
};

/// Optimum of the storage problem with stored energy restricted to discrete levels. A first
/// pass uses `energy_levels` equal intervals of the range reachable from e0; later passes put
/// the same number of levels on shrinking windows around the best path. Grid power follows
/// exactly from each energy move and the running peak is tracked exactly, so the result is an
/// upper bound on the LP optimum. The result is the best over energy_levels, energy_levels / 2,
/// ... down to 1, hence non-increasing under doubling. Limits: N <= 8 steps, 1 <= energy_levels <= 64.
inline constexpr int kDpRefinePasses = 8;
double dp_oracle(const ExogenousData& data, const Tariff& tariff, const BatteryParams& battery,
                 const PeakCalendar& calendar, double e0, int energy_levels);

/// Cost without storage: energy on max(net, 0), per-period peaks, credit p_term * e0.
double no_storage_cost(const ExogenousData& data, const Tariff& tariff, const BatteryParams& battery,
                       const PeakCalendar& calendar, double e0);

}  // namespace peakshaver::synth
