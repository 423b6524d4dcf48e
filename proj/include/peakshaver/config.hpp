#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "peakshaver/core_types.hpp"
#include "peakshaver/simulator.hpp"
#include "peakshaver/synth.hpp"

namespace peakshaver {

enum class ForecastKind { Perfect, Synthetic, ScenarioFile, Weather };

std::string_view to_string(ForecastKind k);

/// Everything a run needs, parsed from a flat `key = value` document.
struct RunConfig {
  SimConfig sim;
  BatteryParams battery;
  double e0 = 1250.0;

  double peak_price = 3.05;
  std::string tariff = "day_night";  // day_night | flat
  DayNightRule day_night;
  double flat_price = 0.12;
  std::string period = "monthly";  // monthly | daily | <hours>h

  ForecastKind forecast = ForecastKind::Synthetic;
  synth::SynthSpec synth;  // synth.scenarios doubles as the ensemble size J

  double clear_threshold = 0.8;
  int refit_window_days = 10;
  int warmup_days = 10;
  int train_epochs = 200;

  std::string data_file;
  std::string scenario_file;
  std::string weather_file;
  std::string clearsky_file;

  /// Effective key/value pairs after defaults, overrides and the environment (canonical text).
  std::map<std::string, std::string> echo;

  Tariff make_tariff(const TimeGrid& grid) const;
  PeakCalendar make_calendar(const TimeGrid& grid) const;
};

/// Every recognized key, sorted.
const std::vector<std::string>& config_keys();

/// Parses `text`, then applies `overrides` (key=value strings) and, when `env_seed` is set,
/// the seed override. Unknown keys, bad values and mode/structure conflicts raise ConfigError.
RunConfig parse_run_config(std::string_view text, const std::vector<std::string>& overrides = {},
                           std::optional<std::string> env_seed = std::nullopt);

/// Reads PEAKSHAVER_SEED from the environment.
std::optional<std::string> seed_from_environment();

/// Canonical `key = value` lines of `config.echo`; parsing them gives back the same config.
std::string format_run_config(const RunConfig& config);

}  // namespace peakshaver
