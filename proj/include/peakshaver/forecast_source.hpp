#pragma once

#include <string>
#include <vector>

#include "peakshaver/core_types.hpp"

namespace peakshaver {

/// Supplies the net-demand ensemble the controller sees at each step.
class ForecastSource {
 public:
  virtual ~ForecastSource() = default;

  /// Ensemble for the window [t, t + m), issued at step t.
  virtual ScenarioEnsemble forecast(int t, int m) = 0;
  /// Called at the start of step t; sources with trainable models refit here when asked.
  virtual void before_step(int /*t*/, bool /*refit*/) {}
  /// Realized demand and PV of step t, revealed after the step was applied.
  virtual void observe(int /*t*/, double /*demand*/, double /*pv*/) {}
  /// Non-fatal issues (e.g. skipped refits) collected so far.
  virtual std::vector<std::string> warnings() const { return {}; }
};

/// J copies of the truth.
class PerfectForesight final : public ForecastSource {
 public:
  PerfectForesight(ExogenousData truth, int scenarios = 1);
  ScenarioEnsemble forecast(int t, int m) override;

 private:
  std::vector<double> net_;
  int scenarios_;
};

/// Fixed scenario series over the whole run (net[j][t]); window t reads rows t..t+m-1.
class StaticEnsembleSource final : public ForecastSource {
 public:
  explicit StaticEnsembleSource(ScenarioEnsemble series);
  ScenarioEnsemble forecast(int t, int m) override;

 private:
  ScenarioEnsemble series_;
};

}  // namespace peakshaver
