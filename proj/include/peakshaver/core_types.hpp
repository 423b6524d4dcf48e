#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace peakshaver {

using Timestamp = std::chrono::sys_seconds;

/// "2018-03-01T00:00:00Z"
std::string format_timestamp(Timestamp ts);
/// Accepts "YYYY-MM-DDTHH:MM:SSZ" (the trailing Z is optional). Throws DomainError.
Timestamp parse_timestamp(std::string_view text);
/// Hour of day in UTC, 0..23.
int hour_of_day(Timestamp ts);
/// 0 = Monday ... 6 = Sunday.
int day_of_week(Timestamp ts);

/// Uniform time axis. Index t in [0, steps) maps to start + t * step.
class TimeGrid {
 public:
  TimeGrid(Timestamp start, int steps, double step_hours = 1.0);

  Timestamp start() const { return start_; }
  int steps() const { return steps_; }
  double step_hours() const { return step_hours_; }
  std::chrono::seconds step() const { return step_; }

  Timestamp time_at(int t) const;
  /// Index of an on-grid timestamp; nullopt when off-grid or out of range.
  std::optional<int> index_of(Timestamp ts) const;

 private:
  Timestamp start_;
  int steps_;
  double step_hours_;
  std::chrono::seconds step_;
};

/// Partition of [0, steps) into Q consecutive billing periods.
///
/// Periods are indexed from 0: period_of(t) == q iff
/// boundaries[q] <= t < boundaries[q + 1], with boundaries[Q] == steps.
class PeakCalendar {
 public:
  PeakCalendar(std::vector<int> boundaries, int steps, double step_hours = 1.0);

  /// Periods of `period_steps` each; the last one may be shorter.
  static PeakCalendar uniform(int steps, int period_steps, double step_hours = 1.0);
  /// One period per calendar month (UTC).
  static PeakCalendar monthly(const TimeGrid& grid);
  /// One period per calendar day (UTC).
  static PeakCalendar daily(const TimeGrid& grid);

  int periods() const { return static_cast<int>(boundaries_.size()); }
  int steps() const { return steps_; }
  double step_hours() const { return step_hours_; }
  int period_of(int t) const;
  int period_begin(int q) const;
  int period_end(int q) const;
  int period_steps(int q) const { return period_end(q) - period_begin(q); }
  double period_length_hours(int q) const { return period_steps(q) * step_hours_; }
  const std::vector<int>& boundaries() const { return boundaries_; }

 private:
  std::vector<int> boundaries_;
  int steps_;
  double step_hours_;
};

/// Time-of-use rule: `day_rate` for hours in [day_start_hour, day_end_hour), else `night_rate`.
struct DayNightRule {
  double day_rate = 0.1398;
  double night_rate = 0.0933;
  int day_start_hour = 7;
  int day_end_hour = 20;
};

/// Energy price per step (currency/kWh) and a demand charge (currency/kW of period peak).
class Tariff {
 public:
  Tariff(std::vector<double> buy_price, double peak_price);

  static Tariff flat(int steps, double price, double peak_price);
  static Tariff day_night(const TimeGrid& grid, const DayNightRule& rule, double peak_price);

  const std::vector<double>& buy_price() const { return buy_price_; }
  double buy(int t) const { return buy_price_.at(static_cast<std::size_t>(t)); }
  double peak_price() const { return peak_price_; }
  int steps() const { return static_cast<int>(buy_price_.size()); }

 private:
  std::vector<double> buy_price_;
  double peak_price_;
};

struct BatteryParams {
  double e_max = 2500.0;    // kWh
  double p_c_max = 100.0;   // kW
  double p_dc_max = 100.0;  // kW
  double m_c = 0.9;
  double m_dc = 0.9;

  /// Throws DomainError when any invariant is violated.
  void validate() const;
};

/// Realized (or forecast) building demand and PV inflow, one value per step (kW).
struct ExogenousData {
  std::vector<double> demand;
  std::vector<double> pv;

  int steps() const { return static_cast<int>(demand.size()); }
  double net_demand(int t) const;
  std::vector<double> net_demand() const;
  ExogenousData slice(int begin, int count) const;
  /// Throws DomainError on length mismatch, negative or non-finite entries.
  void validate() const;
  void validate(int expected_steps) const;
};

/// J equally weighted net-demand trajectories over the same window.
struct ScenarioEnsemble {
  std::vector<std::vector<double>> net;  // net[j][k]

  int scenarios() const { return static_cast<int>(net.size()); }
  int steps() const { return net.empty() ? 0 : static_cast<int>(net.front().size()); }
  /// Values of every scenario at step k.
  std::vector<double> column(int k) const;
  std::vector<double> mean() const;
  void validate() const;
};

/// Change in stored energy (kWh) over one step: (m_c p_c - p_dc / m_dc) * step_hours.
double storage_delta(double p_c, double p_dc, const BatteryParams& battery, double step_hours);

/// Terminal value per stored kWh: minimum buy price over [begin, end) divided by m_c.
double terminal_price(const Tariff& tariff, int begin, int end, const BatteryParams& battery);

}  // namespace peakshaver
