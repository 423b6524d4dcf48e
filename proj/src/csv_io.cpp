#include "peakshaver/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "peakshaver/errors.hpp"
#include "peakshaver/text_format.hpp"

namespace peakshaver {

namespace {

class Table {
 public:
  Table(std::string_view text, std::string_view source) : source_(source) {
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines_.push_back(line);
      pos = end + 1;
    }
    while (!lines_.empty() && trim(lines_.back()).empty()) lines_.pop_back();
    if (lines_.empty()) fail(1, "", "file is empty; a header row is required");
    for (auto c : split(lines_[0], ',')) header_.emplace_back(trim(c));
  }

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return lines_.size() - 1; }

  /// Fields of data row r (0-based); row numbers in messages count the header as row 1.
  std::vector<std::string_view> fields(std::size_t r) const {
    auto f = split(lines_[r + 1], ',');
    if (f.size() != header_.size()) {
      fail(r + 2, "", "expected " + std::to_string(header_.size()) + " fields, found " + std::to_string(f.size()));
    }
    for (auto& x : f) x = trim(x);
    return f;
  }

  double number(std::size_t r, std::size_t c, std::string_view field) const {
    double v = 0.0;
    if (!parse_double(field, v) || !std::isfinite(v)) fail(r + 2, header_[c], "not a finite number: '" + std::string(field) + "'");
    return v;
  }

  Timestamp time(std::size_t r, std::string_view field) const {
    try {
      return parse_timestamp(field);
    } catch (const DomainError&) {
      fail(r + 2, header_[0], "bad timestamp '" + std::string(field) + "'");
    }
  }

  void expect_header(const std::vector<std::string>& expected) const {
    if (header_ != expected) {
      std::string want;
      for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
      fail(1, "", "header must be '" + want + "'");
    }
  }

  [[noreturn]] void fail(std::size_t row, std::string_view column, const std::string& msg) const {
    std::string where = std::string(source_) + ": row " + std::to_string(row);
    if (!column.empty()) where += ", column '" + std::string(column) + "'";
    throw IngestError(where + ": " + msg);
  }

 private:
  std::string source_;
  std::vector<std::string_view> lines_;
  std::vector<std::string> header_;
};

// Validates that `times` is strictly hourly and returns the grid.
TimeGrid hourly_grid(const Table& table, const std::vector<Timestamp>& times) {
  if (times.empty()) table.fail(2, "", "no data rows");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const auto gap = times[i] - times[i - 1];
    if (gap == std::chrono::seconds{0}) {
      table.fail(i + 2, "timestamp", "duplicate timestamp " + format_timestamp(times[i]));
    }
    if (gap != std::chrono::hours{1}) {
      table.fail(i + 2, "timestamp",
                 "gap or disorder: expected " + format_timestamp(times[i - 1] + std::chrono::hours{1}) + ", found " +
                     format_timestamp(times[i]));
    }
  }
  return TimeGrid(times.front(), static_cast<int>(times.size()));
}

std::string scenario_column(int j) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "s%02d", j);
  return buf;
}

}  // namespace

ExogenousSeries parse_exogenous_csv(std::string_view text, std::string_view source) {
  Table t(text, source);
  t.expect_header({"timestamp", "demand_kw", "pv_kw"});
  std::vector<Timestamp> times;
  ExogenousSeries out;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto f = t.fields(r);
    times.push_back(t.time(r, f[0]));
    const double demand = t.number(r, 1, f[1]);
    const double pv = t.number(r, 2, f[2]);
    if (demand < 0.0) t.fail(r + 2, "demand_kw", "negative power");
    if (pv < 0.0) t.fail(r + 2, "pv_kw", "negative power");
    out.data.demand.push_back(demand);
    out.data.pv.push_back(pv);
  }
  out.grid = hourly_grid(t, times);
  return out;
}

std::string format_exogenous_csv(const TimeGrid& grid, const ExogenousData& data) {
  data.validate(grid.steps());
  std::string s = "timestamp,demand_kw,pv_kw\n";
  for (int i = 0; i < grid.steps(); ++i) {
    s += format_timestamp(grid.time_at(i)) + "," + format_double(data.demand[i]) + "," + format_double(data.pv[i]) + "\n";
  }
  return s;
}

ScenarioSeries parse_scenario_csv(std::string_view text, std::string_view source) {
  Table t(text, source);
  const auto& h = t.header();
  if (h.size() < 2 || h[0] != "timestamp") t.fail(1, "", "header must be 'timestamp,s01,...,sJ'");
  for (std::size_t c = 1; c < h.size(); ++c) {
    if (h[c] != scenario_column(static_cast<int>(c))) {
      t.fail(1, h[c], "expected scenario column '" + scenario_column(static_cast<int>(c)) + "'");
    }
  }
  ScenarioSeries out;
  out.ensemble.net.assign(h.size() - 1, {});
  std::vector<Timestamp> times;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto f = t.fields(r);
    times.push_back(t.time(r, f[0]));
    for (std::size_t c = 1; c < f.size(); ++c) out.ensemble.net[c - 1].push_back(t.number(r, c, f[c]));
  }
  out.grid = hourly_grid(t, times);
  return out;
}

std::string format_scenario_csv(const TimeGrid& grid, const ScenarioEnsemble& ensemble) {
  if (ensemble.steps() != grid.steps()) throw DomainError("scenario series length does not match the grid");
  std::string s = "timestamp";
  for (int j = 1; j <= ensemble.scenarios(); ++j) s += "," + scenario_column(j);
  s += "\n";
  for (int i = 0; i < grid.steps(); ++i) {
    s += format_timestamp(grid.time_at(i));
    for (const auto& sc : ensemble.net) s += "," + format_double(sc[i]);
    s += "\n";
  }
  return s;
}

WeatherSeries parse_weather_csv(std::string_view text, std::string_view source) {
  Table t(text, source);
  t.expect_header({"timestamp", "scenario_id", "irradiance_wm2", "temp_c"});
  std::map<int, std::map<Timestamp, std::pair<double, double>>> by_scenario;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto f = t.fields(r);
    const Timestamp ts = t.time(r, f[0]);
    const double id = t.number(r, 1, f[1]);
    if (id < 1 || id != std::floor(id)) t.fail(r + 2, "scenario_id", "must be a positive integer");
    const double irr = t.number(r, 2, f[2]);
    if (irr < 0.0) t.fail(r + 2, "irradiance_wm2", "negative irradiance");
    const double temp = t.number(r, 3, f[3]);
    auto& series = by_scenario[static_cast<int>(id)];
    if (!series.emplace(ts, std::make_pair(irr, temp)).second) {
      t.fail(r + 2, "timestamp", "duplicate timestamp " + format_timestamp(ts) + " for scenario " + std::string(f[1]));
    }
  }
  if (by_scenario.empty()) t.fail(2, "", "no data rows");
  WeatherSeries out;
  std::vector<Timestamp> reference;
  int expected_id = 1;
  for (const auto& [id, series] : by_scenario) {
    if (id != expected_id++) t.fail(1, "scenario_id", "scenario ids must be 1..J without holes");
    std::vector<Timestamp> times;
    std::vector<double> irr, temp;
    for (const auto& [ts, v] : series) {
      times.push_back(ts);
      irr.push_back(v.first);
      temp.push_back(v.second);
    }
    if (reference.empty()) {
      out.grid = hourly_grid(t, times);
      reference = times;
    } else if (times != reference) {
      t.fail(1, "timestamp", "scenario " + std::to_string(id) + " covers different timestamps than scenario 1");
    }
    out.irradiance.push_back(std::move(irr));
    out.temperature.push_back(std::move(temp));
  }
  return out;
}

std::string format_weather_csv(const WeatherSeries& w) {
  std::string s = "timestamp,scenario_id,irradiance_wm2,temp_c\n";
  for (int i = 0; i < w.grid.steps(); ++i) {
    for (std::size_t j = 0; j < w.irradiance.size(); ++j) {
      s += format_timestamp(w.grid.time_at(i)) + "," + std::to_string(j + 1) + "," + format_double(w.irradiance[j][i]) +
           "," + format_double(w.temperature[j][i]) + "\n";
    }
  }
  return s;
}

ClearskySeries parse_clearsky_csv(std::string_view text, std::string_view source) {
  Table t(text, source);
  t.expect_header({"timestamp", "clearsky_wm2"});
  ClearskySeries out;
  std::vector<Timestamp> times;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto f = t.fields(r);
    times.push_back(t.time(r, f[0]));
    const double v = t.number(r, 1, f[1]);
    if (v < 0.0) t.fail(r + 2, "clearsky_wm2", "negative irradiance");
    out.clearsky.push_back(v);
  }
  out.grid = hourly_grid(t, times);
  return out;
}

std::string format_clearsky_csv(const TimeGrid& grid, const std::vector<double>& clearsky) {
  std::string s = "timestamp,clearsky_wm2\n";
  for (int i = 0; i < grid.steps(); ++i) s += format_timestamp(grid.time_at(i)) + "," + format_double(clearsky.at(i)) + "\n";
  return s;
}

std::vector<PvSample> parse_pv_samples_csv(std::string_view text, std::string_view source) {
  Table t(text, source);
  t.expect_header({"irradiance_wm2", "temp_c", "pv_kw"});
  std::vector<PvSample> out;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto f = t.fields(r);
    PvSample s{t.number(r, 0, f[0]), t.number(r, 1, f[1]), t.number(r, 2, f[2])};
    if (s.irradiance < 0.0) t.fail(r + 2, "irradiance_wm2", "negative irradiance");
    if (s.pv < 0.0) t.fail(r + 2, "pv_kw", "negative power");
    out.push_back(s);
  }
  return out;
}

std::string format_trajectory_csv(const TimeGrid& grid, const std::vector<TrajectoryRow>& rows) {
  std::string s = "timestamp,p_grid,p_c,p_dc,energy,curtailed_pv,s_init,period_id\n";
  for (const auto& r : rows) {
    s += format_timestamp(grid.time_at(r.t)) + "," + format_double(r.p_grid) + "," + format_double(r.p_c) + "," +
         format_double(r.p_dc) + "," + format_double(r.energy) + "," + format_double(r.curtailed_pv) + "," +
         format_double(r.s_init) + "," + std::to_string(r.period_id) + "\n";
  }
  return s;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string s = "parameter,value,energy_cost,peak_cost,terminal_credit,total\n";
  for (const auto& r : rows) {
    s += r.parameter + "," + format_double(r.value) + "," + format_double(r.report.energy_cost) + "," +
         format_double(r.report.peak_cost) + "," + format_double(r.report.terminal_credit) + "," +
         format_double(r.report.total) + "\n";
  }
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, std::string_view content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IngestError(tmp + ": cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IngestError(tmp + ": write failed");
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace peakshaver
