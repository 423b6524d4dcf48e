#pragma once

#include <deque>
#include <map>
#include <vector>

#include "peakshaver/core_types.hpp"
#include "peakshaver/demand_model.hpp"
#include "peakshaver/forecast_source.hpp"
#include "peakshaver/model_registry.hpp"

namespace peakshaver {

/// Net-demand ensemble built from weather scenarios: PVUSA models picked by issue time and
/// the scenario day's sky class, demand from the two demand networks.
class WeatherModelSource final : public ForecastSource {
 public:
  struct Inputs {
    TimeGrid grid{Timestamp{}, 1};
    std::vector<std::vector<double>> irradiance;   // forecast [j][t]
    std::vector<std::vector<double>> temperature;  // forecast [j][t]
    std::vector<double> clearsky;                  // [t]
  };

  /// `previous12` is the realized demand of the 12 hours before the grid starts; `history`
  /// seeds the refit window.
  WeatherModelSource(Inputs inputs, ModelRegistry registry, DemandModel demand, std::vector<double> previous12,
                     std::vector<PvHistoryRecord> history = {}, int window_days = 10,
                     double clear_threshold = kDefaultClearThreshold);

  void before_step(int t, bool refit) override;
  ScenarioEnsemble forecast(int t, int m) override;
  void observe(int t, double demand, double pv) override;
  std::vector<std::string> warnings() const override { return warnings_; }

  const ModelRegistry& registry() const { return registry_; }

 private:
  SkyClass sky(int j, int t);

  Inputs in_;
  ModelRegistry registry_;
  DemandModel demand_;
  std::deque<double> last12_;
  std::vector<PvHistoryRecord> history_;
  int window_days_;
  double threshold_;
  std::map<std::pair<int, int>, SkyClass> sky_cache_;  // (scenario, day index)
  std::vector<std::string> warnings_;
};

}  // namespace peakshaver
