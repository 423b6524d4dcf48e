#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "peakshaver/core_types.hpp"
#include "peakshaver/pvusa.hpp"
#include "peakshaver/simulator.hpp"

namespace peakshaver {

// All readers require a header row, ISO-8601 UTC timestamps on a gap-free hourly grid, and
// plain decimal numbers. Violations raise IngestError naming the source, row and column.
// Writers emit the canonical form (shortest round-trip numbers, '\n' line ends), so reading
// a canonical file and writing it back reproduces it byte for byte.

struct ExogenousSeries {
  TimeGrid grid{Timestamp{}, 1};
  ExogenousData data;
};

/// timestamp,demand_kw,pv_kw
ExogenousSeries parse_exogenous_csv(std::string_view text, std::string_view source = "<input>");
std::string format_exogenous_csv(const TimeGrid& grid, const ExogenousData& data);

struct ScenarioSeries {
  TimeGrid grid{Timestamp{}, 1};
  ScenarioEnsemble ensemble;  // net[j][t]
};

/// timestamp,s01,...,sJ (net demand, kW; may be negative)
ScenarioSeries parse_scenario_csv(std::string_view text, std::string_view source = "<input>");
std::string format_scenario_csv(const TimeGrid& grid, const ScenarioEnsemble& ensemble);

struct WeatherSeries {
  TimeGrid grid{Timestamp{}, 1};
  std::vector<std::vector<double>> irradiance;  // [j][t], scenario ids 1..J
  std::vector<std::vector<double>> temperature;
};

/// timestamp,scenario_id,irradiance_wm2,temp_c; one row per (timestamp, scenario)
WeatherSeries parse_weather_csv(std::string_view text, std::string_view source = "<input>");
std::string format_weather_csv(const WeatherSeries& weather);

struct ClearskySeries {
  TimeGrid grid{Timestamp{}, 1};
  std::vector<double> clearsky;
};

/// timestamp,clearsky_wm2
ClearskySeries parse_clearsky_csv(std::string_view text, std::string_view source = "<input>");
std::string format_clearsky_csv(const TimeGrid& grid, const std::vector<double>& clearsky);

/// irradiance_wm2,temp_c,pv_kw (training samples for the PV model)
std::vector<PvSample> parse_pv_samples_csv(std::string_view text, std::string_view source = "<input>");

/// timestamp,p_grid,p_c,p_dc,energy,curtailed_pv,s_init,period_id
std::string format_trajectory_csv(const TimeGrid& grid, const std::vector<TrajectoryRow>& rows);
/// parameter,value,energy_cost,peak_cost,terminal_credit,total
std::string format_sweep_csv(const std::vector<SweepRow>& rows);

std::string read_file(const std::string& path);
/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace peakshaver
