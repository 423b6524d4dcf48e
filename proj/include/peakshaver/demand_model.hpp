#pragma once

#include <span>
#include <vector>

#include "peakshaver/mlp.hpp"

namespace peakshaver {

/// Min-max scaling of weather inputs onto [0, 1]. Demand stays in kW.
struct WeatherScaling {
  double irradiance_max = 1000.0;
  double temperature_min = -20.0;
  double temperature_max = 40.0;

  double irradiance(double v) const { return v / irradiance_max; }
  double temperature(double v) const { return (v - temperature_min) / (temperature_max - temperature_min); }
};

/// 24 scaled irradiance values followed by 24 scaled temperatures.
std::vector<double> weather_features(std::span<const double> irradiance24, std::span<const double> temperature24,
                                     const WeatherScaling& scaling);

/// Hourly weather and realized demand on a common grid starting at midnight.
struct DemandHistory {
  std::vector<double> irradiance;
  std::vector<double> temperature;
  std::vector<double> demand;
};

/// Day-ahead network for the first 24 h of a window, multi-day network beyond it.
class DemandModel {
 public:
  DemandModel(Mlp day_ahead, Mlp multi_day, WeatherScaling scaling = {});

  /// Trains both networks on every 12-hourly sample of `history`
  /// (needs at least 12 + 24 hours). Seeds derive from options.seed.
  static DemandModel train(const DemandHistory& history, const TrainOptions& options,
                           const WeatherScaling& scaling = {});

  /// Demand forecast over the length of the weather series. `previous12` is the
  /// realized demand of the 12 hours before the window.
  std::vector<double> forecast(std::span<const double> irradiance, std::span<const double> temperature,
                               std::span<const double> previous12) const;

  const Mlp& day_ahead() const { return day_ahead_; }
  const Mlp& multi_day() const { return multi_day_; }
  const WeatherScaling& scaling() const { return scaling_; }

 private:
  Mlp day_ahead_;
  Mlp multi_day_;
  WeatherScaling scaling_;
};

}  // namespace peakshaver
