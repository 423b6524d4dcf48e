#include "peakshaver/demand_model.hpp"

#include <algorithm>
#include <string>

#include "peakshaver/errors.hpp"

namespace peakshaver {

namespace {

constexpr int kDay = 24;
constexpr int kLags = 12;

// 24 values starting at `begin`, repeating the last available value past the end.
std::vector<double> padded_day(std::span<const double> series, std::size_t begin) {
  std::vector<double> out(kDay);
  for (int h = 0; h < kDay; ++h) out[h] = series[std::min(begin + h, series.size() - 1)];
  return out;
}

}  // namespace

std::vector<double> weather_features(std::span<const double> irradiance24, std::span<const double> temperature24,
                                     const WeatherScaling& scaling) {
  if (irradiance24.size() != kDay || temperature24.size() != kDay) {
    throw DomainError("weather_features expects 24 irradiance and 24 temperature values");
  }
  std::vector<double> x;
  x.reserve(2 * kDay);
  for (double v : irradiance24) x.push_back(scaling.irradiance(v));
  for (double v : temperature24) x.push_back(scaling.temperature(v));
  return x;
}

DemandModel::DemandModel(Mlp day_ahead, Mlp multi_day, WeatherScaling scaling)
    : day_ahead_(std::move(day_ahead)), multi_day_(std::move(multi_day)), scaling_(scaling) {
  if (day_ahead_.input_width() != 2 * kDay + kLags || day_ahead_.output_width() != kDay) {
    throw DomainError("day-ahead demand network must map 60 inputs to 24 outputs");
  }
  if (multi_day_.input_width() != 2 * kDay || multi_day_.output_width() != kDay) {
    throw DomainError("multi-day demand network must map 48 inputs to 24 outputs");
  }
}

DemandModel DemandModel::train(const DemandHistory& h, const TrainOptions& options, const WeatherScaling& scaling) {
  const std::size_t n = h.demand.size();
  if (h.irradiance.size() != n || h.temperature.size() != n) throw DomainError("demand history lengths differ");
  if (n < static_cast<std::size_t>(kLags + kDay)) {
    throw DomainError("demand history needs at least 36 hours, got " + std::to_string(n));
  }
  std::vector<std::size_t> starts;
  for (std::size_t s = kLags; s + kDay <= n; s += 12) starts.push_back(s);
  const auto rows = static_cast<Eigen::Index>(starts.size());
  Eigen::MatrixXd x_day(rows, 2 * kDay + kLags), x_multi(rows, 2 * kDay), y(rows, kDay);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::size_t s = starts[static_cast<std::size_t>(i)];
    const auto w = weather_features(std::span(h.irradiance).subspan(s, kDay),
                                    std::span(h.temperature).subspan(s, kDay), scaling);
    for (int c = 0; c < 2 * kDay; ++c) {
      x_day(i, c) = w[c];
      x_multi(i, c) = w[c];
    }
    for (int c = 0; c < kLags; ++c) x_day(i, 2 * kDay + c) = h.demand[s - kLags + c];
    for (int c = 0; c < kDay; ++c) y(i, c) = h.demand[s + c];
  }
  TrainOptions second = options;
  second.seed = options.seed + 1;
  auto day = train_mlp(Mlp::demand_day_ahead_model(options.seed), x_day, y, options);
  auto multi = train_mlp(Mlp::demand_multi_day_model(second.seed), x_multi, y, second);
  return DemandModel(std::move(day.model), std::move(multi.model), scaling);
}

std::vector<double> DemandModel::forecast(std::span<const double> irradiance, std::span<const double> temperature,
                                          std::span<const double> previous12) const {
  if (irradiance.size() != temperature.size() || irradiance.empty()) {
    throw DomainError("demand forecast: weather series must be nonempty and of equal length");
  }
  if (previous12.size() != kLags) throw DomainError("demand forecast: need the previous 12 hours of demand");
  std::vector<double> out;
  out.reserve(irradiance.size());
  for (std::size_t begin = 0; begin < irradiance.size(); begin += kDay) {
    auto x = weather_features(padded_day(irradiance, begin), padded_day(temperature, begin), scaling_);
    std::vector<double> y;
    if (begin == 0) {
      x.insert(x.end(), previous12.begin(), previous12.end());
      y = day_ahead_.predict(x);
    } else {
      y = multi_day_.predict(x);
    }
    for (std::size_t h = 0; h < kDay && out.size() < irradiance.size(); ++h) out.push_back(std::max(y[h], 0.0));
  }
  return out;
}

}  // namespace peakshaver
