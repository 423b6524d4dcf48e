#include "peakshaver/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <set>

#include "peakshaver/errors.hpp"
#include "peakshaver/text_format.hpp"

namespace peakshaver {

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;

struct KeySpec {
  std::string default_value;
  Setter set;
};

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
  throw ConfigError("bad value '" + value + "' for key '" + key + "' (expected " + expected + ")");
}

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  if (!parse_double(value, v) || !std::isfinite(v)) bad_value(key, value, "a finite number");
  return v;
}

long long to_integer(const std::string& key, const std::string& value) {
  long long v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) bad_value(key, value, "an integer");
  return v;
}

int to_int(const std::string& key, const std::string& value) {
  const long long v = to_integer(key, value);
  if (v < -1000000000LL || v > 1000000000LL) bad_value(key, value, "an integer of moderate size");
  return static_cast<int>(v);
}

std::uint64_t to_seed(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) bad_value(key, value, "a non-negative integer");
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value, "true or false");
}

template <class F>
auto translate(F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

ForecastKind parse_forecast(const std::string& key, const std::string& value) {
  if (value == "perfect") return ForecastKind::Perfect;
  if (value == "synthetic") return ForecastKind::Synthetic;
  if (value == "scenario_file") return ForecastKind::ScenarioFile;
  if (value == "weather") return ForecastKind::Weather;
  bad_value(key, value, "perfect, synthetic, scenario_file or weather");
}

const std::map<std::string, KeySpec>& key_table() {
  static const std::map<std::string, KeySpec> table = [] {
    std::map<std::string, KeySpec> t;
    auto add = [&](const char* key, std::string def, Setter set) { t.emplace(key, KeySpec{std::move(def), std::move(set)}); };
    // simulation
    add("mode", "det_mpc", [](RunConfig& c, const std::string& v) { c.sim.mode = parse_sim_mode(v); });
    add("horizon_m", "24", [](RunConfig& c, const std::string& v) { c.sim.horizon_m = to_int("horizon_m", v); });
    add("strategy", "FP", [](RunConfig& c, const std::string& v) {
      c.sim.mpc.strategy = translate([&] { return parse_peak_strategy(v); });
    });
    add("theta", "0", [](RunConfig& c, const std::string& v) { c.sim.mpc.intra.theta = to_double("theta", v); });
    add("m1", "24", [](RunConfig& c, const std::string& v) { c.sim.mpc.intra.m1 = to_int("m1", v); });
    add("weighting_on", "true", [](RunConfig& c, const std::string& v) { c.sim.mpc.weighting_on = to_bool("weighting_on", v); });
    add("structure", "constant_first_step", [](RunConfig& c, const std::string& v) {
      c.sim.structure.kind = translate([&] { return parse_policy_structure(v); });
    });
    add("m2", "0", [](RunConfig& c, const std::string& v) { c.sim.structure.m2 = to_int("m2", v); });
    add("constant_first", "false", [](RunConfig& c, const std::string& v) {
      c.sim.structure.constant_first = to_bool("constant_first", v);
    });
    add("filter_alpha", "0", [](RunConfig& c, const std::string& v) { c.sim.filter_alpha = to_double("filter_alpha", v); });
    add("noise_rmse", "0", [](RunConfig& c, const std::string& v) { c.sim.noise_rmse = to_double("noise_rmse", v); });
    add("refit", "false", [](RunConfig& c, const std::string& v) { c.sim.refit = to_bool("refit", v); });
    add("seed", "1", [](RunConfig& c, const std::string& v) {
      c.sim.seed = to_seed("seed", v);
      c.synth.seed = c.sim.seed;
    });
    // battery
    add("e0", "1250", [](RunConfig& c, const std::string& v) { c.e0 = to_double("e0", v); });
    add("e_max", "2500", [](RunConfig& c, const std::string& v) { c.battery.e_max = to_double("e_max", v); });
    add("p_c_max", "100", [](RunConfig& c, const std::string& v) { c.battery.p_c_max = to_double("p_c_max", v); });
    add("p_dc_max", "100", [](RunConfig& c, const std::string& v) { c.battery.p_dc_max = to_double("p_dc_max", v); });
    add("m_c", "0.9", [](RunConfig& c, const std::string& v) { c.battery.m_c = to_double("m_c", v); });
    add("m_dc", "0.9", [](RunConfig& c, const std::string& v) { c.battery.m_dc = to_double("m_dc", v); });
    // tariff and billing
    add("peak_price", "3.05", [](RunConfig& c, const std::string& v) { c.peak_price = to_double("peak_price", v); });
    add("tariff", "day_night", [](RunConfig& c, const std::string& v) {
      if (v != "day_night" && v != "flat") bad_value("tariff", v, "day_night or flat");
      c.tariff = v;
    });
    add("day_rate", "0.1398", [](RunConfig& c, const std::string& v) { c.day_night.day_rate = to_double("day_rate", v); });
    add("night_rate", "0.0933", [](RunConfig& c, const std::string& v) { c.day_night.night_rate = to_double("night_rate", v); });
    add("day_start_hour", "7", [](RunConfig& c, const std::string& v) {
      c.day_night.day_start_hour = to_int("day_start_hour", v);
    });
    add("day_end_hour", "20", [](RunConfig& c, const std::string& v) { c.day_night.day_end_hour = to_int("day_end_hour", v); });
    add("flat_price", "0.12", [](RunConfig& c, const std::string& v) { c.flat_price = to_double("flat_price", v); });
    add("period", "monthly", [](RunConfig& c, const std::string& v) {
      if (v != "monthly" && v != "daily") {
        if (v.size() < 2 || v.back() != 'h' || to_int("period", v.substr(0, v.size() - 1)) < 1) {
          bad_value("period", v, "monthly, daily or <hours>h");
        }
      }
      c.period = v;
    });
    // forecasts
    add("forecast", "synthetic", [](RunConfig& c, const std::string& v) { c.forecast = parse_forecast("forecast", v); });
    add("scenarios", "21", [](RunConfig& c, const std::string& v) { c.synth.scenarios = to_int("scenarios", v); });
    add("clear_threshold", "0.8", [](RunConfig& c, const std::string& v) {
      c.clear_threshold = to_double("clear_threshold", v);
    });
    add("refit_window_days", "10", [](RunConfig& c, const std::string& v) {
      c.refit_window_days = to_int("refit_window_days", v);
    });
    add("warmup_days", "10", [](RunConfig& c, const std::string& v) { c.warmup_days = to_int("warmup_days", v); });
    add("train_epochs", "200", [](RunConfig& c, const std::string& v) { c.train_epochs = to_int("train_epochs", v); });
    // synthetic data
    add("days", "7", [](RunConfig& c, const std::string& v) { c.synth.days = to_int("days", v); });
    add("start", "2018-03-01T00:00:00Z", [](RunConfig& c, const std::string& v) {
      try {
        c.synth.start = parse_timestamp(v);
      } catch (const DomainError&) {
        bad_value("start", v, "an ISO-8601 UTC timestamp");
      }
    });
    add("pv_peak_kw", "40", [](RunConfig& c, const std::string& v) { c.synth.pv_peak_kw = to_double("pv_peak_kw", v); });
    add("demand_base_kw", "30", [](RunConfig& c, const std::string& v) {
      c.synth.demand_base_kw = to_double("demand_base_kw", v);
    });
    add("demand_peak_kw", "90", [](RunConfig& c, const std::string& v) {
      c.synth.demand_peak_kw = to_double("demand_peak_kw", v);
    });
    add("weekend_factor", "0.3", [](RunConfig& c, const std::string& v) {
      c.synth.weekend_factor = to_double("weekend_factor", v);
    });
    add("noise_sd", "2", [](RunConfig& c, const std::string& v) { c.synth.noise_sd = to_double("noise_sd", v); });
    add("scenario_spread_sd", "3", [](RunConfig& c, const std::string& v) {
      c.synth.scenario_spread_sd = to_double("scenario_spread_sd", v);
    });
    // inputs
    add("data_file", "", [](RunConfig& c, const std::string& v) { c.data_file = v; });
    add("scenario_file", "", [](RunConfig& c, const std::string& v) { c.scenario_file = v; });
    add("weather_file", "", [](RunConfig& c, const std::string& v) { c.weather_file = v; });
    add("clearsky_file", "", [](RunConfig& c, const std::string& v) { c.clearsky_file = v; });
    return t;
  }();
  return table;
}

constexpr std::string_view kStructureKeys[] = {"structure", "m2", "constant_first"};

bool is_structure_key(std::string_view key) {
  return std::find(std::begin(kStructureKeys), std::end(kStructureKeys), key) != std::end(kStructureKeys);
}

std::string valid_key_list() {
  std::string s;
  for (const auto& k : config_keys()) s += (s.empty() ? "" : ", ") + k;
  return s;
}

void assign(std::map<std::string, std::string>& values, std::set<std::string>& explicit_keys, std::string key,
            std::string value, const std::string& where) {
  if (!key_table().contains(key)) {
    throw ConfigError(where + "unknown key '" + key + "'; valid keys: " + valid_key_list());
  }
  explicit_keys.insert(key);
  values[std::move(key)] = std::move(value);
}

std::pair<std::string, std::string> split_assignment(std::string_view line, const std::string& where) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
  std::string key(trim(line.substr(0, eq)));
  std::string value(trim(line.substr(eq + 1)));
  if (key.empty()) throw ConfigError(where + "empty key");
  return {key, value};
}

}  // namespace

std::string_view to_string(ForecastKind k) {
  switch (k) {
    case ForecastKind::Perfect: return "perfect";
    case ForecastKind::Synthetic: return "synthetic";
    case ForecastKind::ScenarioFile: return "scenario_file";
    case ForecastKind::Weather: return "weather";
  }
  return "unknown";
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, spec] : key_table()) k.push_back(name);
    return k;
  }();
  return keys;
}

Tariff RunConfig::make_tariff(const TimeGrid& grid) const {
  return translate([&] {
    return tariff == "flat" ? Tariff::flat(grid.steps(), flat_price, peak_price)
                            : Tariff::day_night(grid, day_night, peak_price);
  });
}

PeakCalendar RunConfig::make_calendar(const TimeGrid& grid) const {
  return translate([&] {
    if (period == "monthly") return PeakCalendar::monthly(grid);
    if (period == "daily") return PeakCalendar::daily(grid);
    const int hours = std::stoi(period.substr(0, period.size() - 1));
    const int steps = std::max(1, static_cast<int>(std::lround(hours / grid.step_hours())));
    return PeakCalendar::uniform(grid.steps(), steps, grid.step_hours());
  });
}

RunConfig parse_run_config(std::string_view text, const std::vector<std::string>& overrides,
                           std::optional<std::string> env_seed) {
  std::map<std::string, std::string> values;
  for (const auto& [key, spec] : key_table()) values[key] = spec.default_value;
  std::set<std::string> explicit_keys;

  int line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    auto [key, value] = split_assignment(line, where);
    assign(values, explicit_keys, std::move(key), std::move(value), where);
  }
  for (const auto& o : overrides) {
    const std::string where = "override '" + o + "': ";
    auto [key, value] = split_assignment(o, where);
    assign(values, explicit_keys, std::move(key), std::move(value), where);
  }
  if (env_seed) values["seed"] = std::string(trim(*env_seed));

  RunConfig c;
  for (const auto& [key, value] : values) key_table().at(key).set(c, value);

  if (c.sim.mode != SimMode::StochMpc) {
    for (auto k : kStructureKeys) {
      if (explicit_keys.contains(std::string(k))) {
        throw ConfigError("key '" + std::string(k) + "' only applies to mode stoch_mpc, not " +
                          std::string(to_string(c.sim.mode)));
      }
    }
  }
  c.sim.validate();
  translate([&] {
    c.battery.validate();
    c.synth.validate();
    return 0;
  });
  if (!(c.e0 >= 0.0 && c.e0 <= c.battery.e_max)) throw ConfigError("e0 must lie in [0, e_max]");
  if (!(c.peak_price > 0.0)) throw ConfigError("peak_price must be > 0");
  if (c.forecast == ForecastKind::ScenarioFile && c.scenario_file.empty()) {
    throw ConfigError("forecast = scenario_file needs scenario_file");
  }
  if (c.forecast == ForecastKind::Weather && (c.weather_file.empty() || c.clearsky_file.empty())) {
    throw ConfigError("forecast = weather needs weather_file and clearsky_file");
  }
  if (c.warmup_days < 1 || c.refit_window_days < 1 || c.train_epochs < 1) {
    throw ConfigError("warmup_days, refit_window_days and train_epochs must be >= 1");
  }

  for (const auto& [key, value] : values) {
    if (c.sim.mode != SimMode::StochMpc && is_structure_key(key)) continue;
    c.echo[key] = value;
  }
  return c;
}

std::optional<std::string> seed_from_environment() {
  if (const char* s = std::getenv("PEAKSHAVER_SEED")) return std::string(s);
  return std::nullopt;
}

std::string format_run_config(const RunConfig& config) {
  std::string s;
  for (const auto& [key, value] : config.echo) s += key + " = " + value + "\n";
  return s;
}

}  // namespace peakshaver
