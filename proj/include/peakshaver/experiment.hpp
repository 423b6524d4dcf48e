#pragma once

#include <memory>
#include <string>
#include <vector>

#include "peakshaver/config.hpp"
#include "peakshaver/forecast_source.hpp"
#include "peakshaver/simulator.hpp"

namespace peakshaver {

/// Data a run operates on. With forecast = weather the first warmup_days of the input train
/// the models and the simulated grid starts after them.
struct RunInputs {
  TimeGrid grid{Timestamp{}, 1};  // simulated steps
  ExogenousData truth;
  Tariff tariff{{1.0}, 1.0};
  PeakCalendar calendar{{0}, 1};
  std::vector<std::string> files;  // inputs read from disk

  ExogenousData full;  // input before the warm-up cut
  int offset = 0;
};

/// Reads data_file or, without one, generates the synthetic dataset of `config.synth`.
RunInputs load_inputs(const RunConfig& config);

/// Forecast source named by `config.forecast`. Weather sources are trained on the warm-up days.
std::unique_ptr<ForecastSource> make_source(const RunConfig& config, const RunInputs& inputs);

/// Synthetic data in the CLI schemas; file name -> content.
std::vector<std::pair<std::string, std::string>> synth_files(const RunConfig& config);

}  // namespace peakshaver
