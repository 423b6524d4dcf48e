#include "peakshaver/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "peakshaver/errors.hpp"

namespace peakshaver {

namespace {

using namespace std::chrono;

// Bound slack for powers coming out of an LP solve.
constexpr double kPowerSlack = 1e-9;

bool near_or_below(double value, double limit) {
  return value <= limit + kPowerSlack * std::max(1.0, std::abs(limit));
}

}  // namespace

std::string format_timestamp(Timestamp ts) {
  const auto day = floor<days>(ts);
  const year_month_day ymd{day};
  const hh_mm_ss hms{ts - day};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  std::string copy(text);
  char tail = 0;
  const int n = std::sscanf(copy.c_str(), "%4d-%2u-%2uT%2u:%2u:%2u%c", &y, &mo, &d, &h, &mi, &s, &tail);
  if (n < 6 || (n == 7 && tail != 'Z') || h > 23 || mi > 59 || s > 59) {
    throw DomainError("invalid timestamp '" + copy + "', expected YYYY-MM-DDTHH:MM:SSZ");
  }
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok()) throw DomainError("invalid calendar date in '" + copy + "'");
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

int hour_of_day(Timestamp ts) {
  const auto day = floor<days>(ts);
  return static_cast<int>(duration_cast<hours>(ts - day).count());
}

int day_of_week(Timestamp ts) {
  const weekday wd{floor<days>(ts)};
  return static_cast<int>(wd.iso_encoding()) - 1;
}

// ---------------------------------------------------------------- TimeGrid

TimeGrid::TimeGrid(Timestamp start, int steps, double step_hours)
    : start_(start), steps_(steps), step_hours_(step_hours) {
  if (steps < 1) throw DomainError("TimeGrid needs at least one step");
  if (!(step_hours > 0.0)) throw DomainError("TimeGrid step must be positive");
  step_ = seconds{std::llround(step_hours * 3600.0)};
  if (step_.count() <= 0) throw DomainError("TimeGrid step rounds to zero seconds");
}

Timestamp TimeGrid::time_at(int t) const { return start_ + step_ * t; }

std::optional<int> TimeGrid::index_of(Timestamp ts) const {
  const auto offset = ts - start_;
  if (offset.count() < 0 || offset.count() % step_.count() != 0) return std::nullopt;
  const auto idx = offset.count() / step_.count();
  if (idx >= steps_) return std::nullopt;
  return static_cast<int>(idx);
}

// ------------------------------------------------------------ PeakCalendar

PeakCalendar::PeakCalendar(std::vector<int> boundaries, int steps, double step_hours)
    : boundaries_(std::move(boundaries)), steps_(steps), step_hours_(step_hours) {
  if (steps < 1) throw DomainError("PeakCalendar needs at least one step");
  if (boundaries_.empty() || boundaries_.front() != 0) {
    throw DomainError("PeakCalendar boundaries must start at 0");
  }
  for (std::size_t i = 1; i < boundaries_.size(); ++i) {
    if (boundaries_[i] <= boundaries_[i - 1]) {
      throw DomainError("PeakCalendar boundaries must be strictly increasing");
    }
  }
  if (boundaries_.back() >= steps) throw DomainError("PeakCalendar boundary beyond the grid");
  if (!(step_hours > 0.0)) throw DomainError("PeakCalendar step must be positive");
}

PeakCalendar PeakCalendar::uniform(int steps, int period_steps, double step_hours) {
  if (period_steps < 1) throw DomainError("period length must be at least one step");
  std::vector<int> b;
  for (int t = 0; t < steps; t += period_steps) b.push_back(t);
  return PeakCalendar(std::move(b), steps, step_hours);
}

PeakCalendar PeakCalendar::monthly(const TimeGrid& grid) {
  std::vector<int> b{0};
  year_month_day prev{floor<days>(grid.time_at(0))};
  for (int t = 1; t < grid.steps(); ++t) {
    const year_month_day cur{floor<days>(grid.time_at(t))};
    if (cur.month() != prev.month() || cur.year() != prev.year()) b.push_back(t);
    prev = cur;
  }
  return PeakCalendar(std::move(b), grid.steps(), grid.step_hours());
}

PeakCalendar PeakCalendar::daily(const TimeGrid& grid) {
  std::vector<int> b{0};
  auto prev = floor<days>(grid.time_at(0));
  for (int t = 1; t < grid.steps(); ++t) {
    const auto cur = floor<days>(grid.time_at(t));
    if (cur != prev) b.push_back(t);
    prev = cur;
  }
  return PeakCalendar(std::move(b), grid.steps(), grid.step_hours());
}

int PeakCalendar::period_of(int t) const {
  if (t < 0 || t >= steps_) throw DomainError("timestep outside the calendar");
  const auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), t);
  return static_cast<int>(it - boundaries_.begin()) - 1;
}

int PeakCalendar::period_begin(int q) const { return boundaries_.at(static_cast<std::size_t>(q)); }

int PeakCalendar::period_end(int q) const {
  if (q < 0 || q >= periods()) throw DomainError("peak period index out of range");
  return q + 1 < periods() ? boundaries_[static_cast<std::size_t>(q) + 1] : steps_;
}

// ------------------------------------------------------------------ Tariff

Tariff::Tariff(std::vector<double> buy_price, double peak_price)
    : buy_price_(std::move(buy_price)), peak_price_(peak_price) {
  if (buy_price_.empty()) throw DomainError("tariff needs at least one price");
  for (double p : buy_price_) {
    if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("buy prices must be positive and finite");
  }
  if (!(peak_price_ > 0.0) || !std::isfinite(peak_price_)) {
    throw DomainError("peak price must be positive and finite");
  }
}

Tariff Tariff::flat(int steps, double price, double peak_price) {
  return Tariff(std::vector<double>(static_cast<std::size_t>(std::max(steps, 0)), price), peak_price);
}

Tariff Tariff::day_night(const TimeGrid& grid, const DayNightRule& rule, double peak_price) {
  std::vector<double> prices(static_cast<std::size_t>(grid.steps()));
  for (int t = 0; t < grid.steps(); ++t) {
    const int h = hour_of_day(grid.time_at(t));
    prices[static_cast<std::size_t>(t)] =
        (h >= rule.day_start_hour && h < rule.day_end_hour) ? rule.day_rate : rule.night_rate;
  }
  return Tariff(std::move(prices), peak_price);
}

// ----------------------------------------------------------- BatteryParams

void BatteryParams::validate() const {
  if (!(m_c > 0.0 && m_c <= 1.0)) throw DomainError("charge efficiency must lie in (0, 1]");
  if (!(m_dc > 0.0 && m_dc <= 1.0)) throw DomainError("discharge efficiency must lie in (0, 1]");
  if (!(e_max > 0.0) || !std::isfinite(e_max)) throw DomainError("battery capacity must be positive");
  if (!(p_c_max >= 0.0) || !std::isfinite(p_c_max)) throw DomainError("charge limit must be >= 0");
  if (!(p_dc_max >= 0.0) || !std::isfinite(p_dc_max)) throw DomainError("discharge limit must be >= 0");
}

// ----------------------------------------------------------- ExogenousData

double ExogenousData::net_demand(int t) const {
  const auto i = static_cast<std::size_t>(t);
  return demand.at(i) - pv.at(i);
}

std::vector<double> ExogenousData::net_demand() const {
  std::vector<double> out(demand.size());
  for (std::size_t i = 0; i < demand.size(); ++i) out[i] = demand[i] - pv.at(i);
  return out;
}

ExogenousData ExogenousData::slice(int begin, int count) const {
  if (begin < 0 || count < 0 || begin + count > steps()) throw DomainError("slice outside the data");
  const auto b = demand.begin() + begin;
  const auto p = pv.begin() + begin;
  return ExogenousData{{b, b + count}, {p, p + count}};
}

void ExogenousData::validate() const {
  if (demand.size() != pv.size()) throw DomainError("demand and pv lengths differ");
  for (std::size_t i = 0; i < demand.size(); ++i) {
    if (!std::isfinite(demand[i]) || demand[i] < 0.0) {
      throw DomainError("demand must be finite and >= 0 (step " + std::to_string(i) + ")");
    }
    if (!std::isfinite(pv[i]) || pv[i] < 0.0) {
      throw DomainError("pv must be finite and >= 0 (step " + std::to_string(i) + ")");
    }
  }
}

void ExogenousData::validate(int expected_steps) const {
  validate();
  if (steps() != expected_steps) {
    throw DomainError("data has " + std::to_string(steps()) + " steps, expected " +
                      std::to_string(expected_steps));
  }
}

// -------------------------------------------------------- ScenarioEnsemble

std::vector<double> ScenarioEnsemble::column(int k) const {
  std::vector<double> out;
  out.reserve(net.size());
  for (const auto& s : net) out.push_back(s.at(static_cast<std::size_t>(k)));
  return out;
}

std::vector<double> ScenarioEnsemble::mean() const {
  std::vector<double> out(static_cast<std::size_t>(steps()), 0.0);
  for (const auto& s : net) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += s[k];
  }
  for (double& v : out) v /= static_cast<double>(net.size());
  return out;
}

void ScenarioEnsemble::validate() const {
  if (net.empty()) throw DomainError("scenario ensemble is empty");
  const auto m = net.front().size();
  if (m == 0) throw DomainError("scenario ensemble has no steps");
  for (const auto& s : net) {
    if (s.size() != m) throw DomainError("scenarios differ in length");
    for (double v : s) {
      if (!std::isfinite(v)) throw DomainError("scenario value is not finite");
    }
  }
}

// --------------------------------------------------------------- physics

double storage_delta(double p_c, double p_dc, const BatteryParams& battery, double step_hours) {
  if (p_c < 0.0 || !near_or_below(p_c, battery.p_c_max)) {
    throw DomainError("charge power outside [0, p_c_max]");
  }
  if (p_dc < 0.0 || !near_or_below(p_dc, battery.p_dc_max)) {
    throw DomainError("discharge power outside [0, p_dc_max]");
  }
  return (battery.m_c * p_c - p_dc / battery.m_dc) * step_hours;
}

double terminal_price(const Tariff& tariff, int begin, int end, const BatteryParams& battery) {
  if (begin < 0 || end > tariff.steps() || begin >= end) {
    throw DomainError("terminal price window is empty or outside the tariff");
  }
  const auto& p = tariff.buy_price();
  const double lowest = *std::min_element(p.begin() + begin, p.begin() + end);
  return lowest / battery.m_c;
}

}  // namespace peakshaver
