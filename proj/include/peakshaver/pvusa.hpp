#pragma once

#include <span>
#include <vector>

#include "peakshaver/core_types.hpp"

namespace peakshaver {

/// P = g1 I + g2 I^2 + g3 I T
struct PvusaCoefficients {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma3 = 0.0;
  friend bool operator==(const PvusaCoefficients&, const PvusaCoefficients&) = default;
};

struct PvSample {
  double irradiance = 0.0;   // W/m^2
  double temperature = 0.0;  // degC
  double pv = 0.0;           // kW
};

/// One member of a weather forecast ensemble.
struct WeatherScenario {
  std::vector<double> irradiance;
  std::vector<double> temperature;
  Timestamp issue_time{};
  int scenario_id = 1;

  int steps() const { return static_cast<int>(irradiance.size()); }
  void validate() const;
};

/// Least-squares fit. Throws FitError naming the degenerate regressor when the
/// design matrix (I, I^2, I*T) is rank deficient, DomainError for < 3 samples.
PvusaCoefficients fit_pvusa(std::span<const PvSample> samples);

/// Model output, clamped at 0 kW.
double predict_pvusa(const PvusaCoefficients& c, double irradiance, double temperature);
std::vector<double> predict_pvusa(const PvusaCoefficients& c, const WeatherScenario& scenario);

}  // namespace peakshaver
