#include "peakshaver/weather_source.hpp"

#include <algorithm>
#include <string>

#include "peakshaver/errors.hpp"
#include "peakshaver/pvusa.hpp"

namespace peakshaver {

WeatherModelSource::WeatherModelSource(Inputs inputs, ModelRegistry registry, DemandModel demand,
                                       std::vector<double> previous12, std::vector<PvHistoryRecord> history,
                                       int window_days, double clear_threshold)
    : in_(std::move(inputs)),
      registry_(std::move(registry)),
      demand_(std::move(demand)),
      last12_(previous12.begin(), previous12.end()),
      history_(std::move(history)),
      window_days_(window_days),
      threshold_(clear_threshold) {
  const int n = in_.grid.steps();
  if (in_.irradiance.empty() || in_.irradiance.size() != in_.temperature.size()) {
    throw DomainError("weather source needs matching irradiance and temperature scenarios");
  }
  for (std::size_t j = 0; j < in_.irradiance.size(); ++j) {
    if (static_cast<int>(in_.irradiance[j].size()) != n || static_cast<int>(in_.temperature[j].size()) != n) {
      throw DomainError("weather scenario " + std::to_string(j) + " does not cover the time grid");
    }
  }
  if (static_cast<int>(in_.clearsky.size()) != n) throw DomainError("clear-sky curve does not cover the time grid");
  if (last12_.size() != 12) throw DomainError("weather source needs 12 hours of previous demand");
  if (!registry_.complete()) throw DomainError("weather source needs a complete PV model registry");
}

SkyClass WeatherModelSource::sky(int j, int t) {
  const int day = t / 24;
  const auto key = std::make_pair(j, day);
  if (auto it = sky_cache_.find(key); it != sky_cache_.end()) return it->second;
  const int begin = day * 24;
  const int count = std::min(24, in_.grid.steps() - begin);
  SkyClass c = SkyClass::Cloudy;
  try {
    c = classify_day(std::span(in_.irradiance[j]).subspan(begin, count), std::span(in_.clearsky).subspan(begin, count),
                     threshold_);
  } catch (const ClassificationError&) {
    // No daylight in the slice; the class does not matter since PV is zero.
  }
  sky_cache_.emplace(key, c);
  return c;
}

void WeatherModelSource::before_step(int t, bool refit) {
  if (!refit) return;
  auto r = refit_models(history_, in_.grid.time_at(t), registry_, window_days_);
  if (!r.ran) return;
  registry_ = std::move(r.registry);
  warnings_.insert(warnings_.end(), r.warnings.begin(), r.warnings.end());
}

ScenarioEnsemble WeatherModelSource::forecast(int t, int m) {
  if (t < 0 || m < 1 || t + m > in_.grid.steps()) throw DomainError("forecast window out of range");
  const IssueTime issue = latest_issue(in_.grid.time_at(t));
  const std::vector<double> prev(last12_.begin(), last12_.end());
  ScenarioEnsemble e;
  for (std::size_t j = 0; j < in_.irradiance.size(); ++j) {
    const auto irr = std::span(in_.irradiance[j]).subspan(static_cast<std::size_t>(t), static_cast<std::size_t>(m));
    const auto temp = std::span(in_.temperature[j]).subspan(static_cast<std::size_t>(t), static_cast<std::size_t>(m));
    const auto demand = demand_.forecast(irr, temp, prev);
    std::vector<double> net(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
      const auto& c = registry_.at({issue, sky(static_cast<int>(j), t + k)}).coefficients;
      net[k] = demand[k] - predict_pvusa(c, irr[k], temp[k]);
    }
    e.net.push_back(std::move(net));
  }
  return e;
}

void WeatherModelSource::observe(int t, double demand, double pv) {
  last12_.pop_front();
  last12_.push_back(demand);
  const Timestamp ts = in_.grid.time_at(t);
  const IssueTime issue = latest_issue(ts);
  for (std::size_t j = 0; j < in_.irradiance.size(); ++j) {
    history_.push_back({ts, issue, sky(static_cast<int>(j), t), in_.irradiance[j][t], in_.temperature[j][t], pv});
  }
}

}  // namespace peakshaver
