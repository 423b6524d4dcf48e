#include "peakshaver/forecast_source.hpp"

#include <string>

#include "peakshaver/errors.hpp"

namespace peakshaver {

PerfectForesight::PerfectForesight(ExogenousData truth, int scenarios) : scenarios_(scenarios) {
  truth.validate();
  if (scenarios < 1) throw DomainError("PerfectForesight needs at least one scenario");
  net_ = truth.net_demand();
}

ScenarioEnsemble PerfectForesight::forecast(int t, int m) {
  if (t < 0 || m < 1 || t + m > static_cast<int>(net_.size())) throw DomainError("forecast window out of range");
  ScenarioEnsemble e;
  e.net.assign(static_cast<std::size_t>(scenarios_), std::vector<double>(net_.begin() + t, net_.begin() + t + m));
  return e;
}

StaticEnsembleSource::StaticEnsembleSource(ScenarioEnsemble series) : series_(std::move(series)) {
  if (series_.scenarios() == 0) throw DomainError("scenario series is empty");
  series_.validate();
}

ScenarioEnsemble StaticEnsembleSource::forecast(int t, int m) {
  if (t < 0 || m < 1 || t + m > series_.steps()) {
    throw DomainError("scenario series ends before step " + std::to_string(t + m - 1));
  }
  ScenarioEnsemble e;
  for (const auto& s : series_.net) e.net.emplace_back(s.begin() + t, s.begin() + t + m);
  return e;
}

}  // namespace peakshaver
