#include "peakshaver/experiment.hpp"

#include <algorithm>
#include <numeric>

#include "peakshaver/csv_io.hpp"
#include "peakshaver/demand_model.hpp"
#include "peakshaver/errors.hpp"
#include "peakshaver/model_registry.hpp"
#include "peakshaver/synth.hpp"
#include "peakshaver/weather_source.hpp"

namespace peakshaver {

namespace {

void require_same_grid(const TimeGrid& a, const TimeGrid& b, const std::string& what) {
  if (a.start() != b.start() || a.steps() != b.steps()) {
    throw IngestError(what + " does not cover the same hours as data_file");
  }
}

std::vector<double> slice(const std::vector<double>& v, int begin, int count) {
  return {v.begin() + begin, v.begin() + begin + count};
}

std::unique_ptr<ForecastSource> make_weather_source(const RunConfig& config, const RunInputs& in) {
  const auto weather = parse_weather_csv(read_file(config.weather_file), config.weather_file);
  const auto clearsky = parse_clearsky_csv(read_file(config.clearsky_file), config.clearsky_file);
  const TimeGrid full_grid(in.grid.time_at(0) - std::chrono::hours{in.offset}, in.full.steps());
  require_same_grid(weather.grid, full_grid, config.weather_file);
  require_same_grid(clearsky.grid, full_grid, config.clearsky_file);
  if (hour_of_day(full_grid.start()) != 0) throw IngestError("forecast = weather needs data starting at midnight UTC");

  const int warm = in.offset;
  const int J = static_cast<int>(weather.irradiance.size());

  // Ensemble mean weather stands in for the realized weather when training demand.
  DemandHistory hist;
  for (int t = 0; t < warm; ++t) {
    double irr = 0.0, temp = 0.0;
    for (int j = 0; j < J; ++j) {
      irr += weather.irradiance[j][t];
      temp += weather.temperature[j][t];
    }
    hist.irradiance.push_back(irr / J);
    hist.temperature.push_back(temp / J);
    hist.demand.push_back(in.full.demand[t]);
  }
  TrainOptions opts;
  opts.epochs = config.train_epochs;
  opts.seed = config.sim.seed;
  DemandModel demand = DemandModel::train(hist, opts);

  std::vector<PvHistoryRecord> history;
  std::vector<PvSample> samples;
  for (int t = 0; t < warm; ++t) {
    const int day = t / 24;
    for (int j = 0; j < J; ++j) {
      SkyClass sky = SkyClass::Cloudy;
      try {
        sky = classify_day(std::span(weather.irradiance[j]).subspan(day * 24, 24),
                           std::span(clearsky.clearsky).subspan(day * 24, 24), config.clear_threshold);
      } catch (const ClassificationError&) {
      }
      const Timestamp ts = full_grid.time_at(t);
      history.push_back({ts, latest_issue(ts), sky, weather.irradiance[j][t], weather.temperature[j][t], in.full.pv[t]});
      samples.push_back({weather.irradiance[j][t], weather.temperature[j][t], in.full.pv[t]});
    }
  }
  const auto base = ModelRegistry::uniform(fit_pvusa(samples));
  const auto fitted = refit_models(history, in.grid.time_at(0), base, config.refit_window_days);

  WeatherModelSource::Inputs inputs;
  inputs.grid = in.grid;
  for (int j = 0; j < J; ++j) {
    inputs.irradiance.push_back(slice(weather.irradiance[j], warm, in.grid.steps()));
    inputs.temperature.push_back(slice(weather.temperature[j], warm, in.grid.steps()));
  }
  inputs.clearsky = slice(clearsky.clearsky, warm, in.grid.steps());
  return std::make_unique<WeatherModelSource>(std::move(inputs), fitted.registry, std::move(demand),
                                              slice(in.full.demand, warm - 12, 12), std::move(history),
                                              config.refit_window_days, config.clear_threshold);
}

}  // namespace

RunInputs load_inputs(const RunConfig& config) {
  RunInputs in;
  TimeGrid full_grid(config.synth.start, 1);
  if (!config.data_file.empty()) {
    auto series = parse_exogenous_csv(read_file(config.data_file), config.data_file);
    full_grid = series.grid;
    in.full = std::move(series.data);
    in.files.push_back(config.data_file);
  } else {
    auto data = synth::generate(config.synth);
    full_grid = data.grid;
    in.full = std::move(data.truth);
  }
  if (config.forecast == ForecastKind::Weather) {
    in.offset = config.warmup_days * 24;
    if (in.offset < 36 || in.offset >= full_grid.steps()) {
      throw ConfigError("warmup_days must leave at least one simulated step and cover 36 hours");
    }
    in.files.push_back(config.weather_file);
    in.files.push_back(config.clearsky_file);
  }
  if (config.forecast == ForecastKind::ScenarioFile) in.files.push_back(config.scenario_file);
  const int n = full_grid.steps() - in.offset;
  in.grid = TimeGrid(full_grid.time_at(in.offset), n, full_grid.step_hours());
  in.truth = in.full.slice(in.offset, n);
  in.tariff = config.make_tariff(in.grid);
  in.calendar = config.make_calendar(in.grid);
  return in;
}

std::unique_ptr<ForecastSource> make_source(const RunConfig& config, const RunInputs& in) {
  const int J = config.synth.scenarios;
  switch (config.forecast) {
    case ForecastKind::Perfect:
      return std::make_unique<PerfectForesight>(in.truth, J);
    case ForecastKind::Synthetic:
      return std::make_unique<synth::SyntheticEnsembleSource>(in.truth, J, config.synth.scenario_spread_sd,
                                                              config.sim.seed);
    case ForecastKind::ScenarioFile: {
      auto s = parse_scenario_csv(read_file(config.scenario_file), config.scenario_file);
      require_same_grid(s.grid, in.grid, config.scenario_file);
      return std::make_unique<StaticEnsembleSource>(std::move(s.ensemble));
    }
    case ForecastKind::Weather:
      return make_weather_source(config, in);
  }
  throw InternalError("unhandled forecast kind");
}

std::vector<std::pair<std::string, std::string>> synth_files(const RunConfig& config) {
  const auto data = synth::generate(config.synth);
  const auto ens = synth::generate_weather_ensemble(config.synth, data);
  const int n = data.grid.steps();

  // Scenario series issued once a day at midnight for the following 24 hours.
  synth::SyntheticEnsembleSource source(data.truth, config.synth.scenarios, config.synth.scenario_spread_sd,
                                        config.synth.seed);
  ScenarioEnsemble series;
  series.net.assign(static_cast<std::size_t>(config.synth.scenarios), {});
  for (int t = 0; t < n; t += 24) {
    const auto e = source.forecast(t, std::min(24, n - t));
    for (int j = 0; j < e.scenarios(); ++j) series.net[j].insert(series.net[j].end(), e.net[j].begin(), e.net[j].end());
  }
  WeatherSeries weather{data.grid, ens.irradiance, ens.temperature};
  return {{"data.csv", format_exogenous_csv(data.grid, data.truth)},
          {"scenarios.csv", format_scenario_csv(data.grid, series)},
          {"weather.csv", format_weather_csv(weather)},
          {"clearsky.csv", format_clearsky_csv(data.grid, data.clearsky)}};
}

}  // namespace peakshaver
