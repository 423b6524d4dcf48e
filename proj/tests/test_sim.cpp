#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "peakshaver/errors.hpp"
#include "peakshaver/lp.hpp"
#include "peakshaver/simulator.hpp"
#include "peakshaver/synth.hpp"

using namespace peakshaver;

namespace {

struct Case {
  synth::SynthData data;
  Tariff tariff;
  PeakCalendar cal;
  BatteryParams battery;
  double e0;
};

Case make_case(int days, int period_steps, std::uint64_t seed) {
  synth::SynthSpec spec;
  spec.days = days;
  spec.seed = seed;
  auto data = synth::generate(spec);
  BatteryParams b;
  b.e_max = 300;
  b.p_c_max = b.p_dc_max = 40;
  const int n = data.grid.steps();
  return {data, Tariff::day_night(data.grid, {}, 3.05), PeakCalendar::uniform(n, period_steps), b, 150.0};
}

SimResult run(const Case& c, SimConfig cfg, ForecastSource& src) {
  return run_closed_loop(cfg, c.data.truth, src, c.tariff, c.battery, c.cal, c.e0);
}

SimResult run_perfect(const Case& c, SimConfig cfg, int scenarios = 1) {
  PerfectForesight src(c.data.truth, scenarios);
  return run(c, cfg, src);
}

SimConfig mode(SimMode m, int horizon = 24) {
  SimConfig cfg;
  cfg.mode = m;
  cfg.horizon_m = horizon;
  return cfg;
}

}  // namespace

TEST_CASE("true cost accounting") {
  const auto cal = PeakCalendar::uniform(10, 10);
  BatteryParams b;
  const auto tariff = Tariff::flat(10, 0.2, 3.05);
  const std::vector<double> zero(10, 0.0);
  CHECK(evaluate_true_cost(zero, tariff, cal, b, 0.0).total == 0.0);
  const std::vector<double> flat(10, 25.0);
  const auto r = evaluate_true_cost(flat, tariff, cal, b, 40.0);
  CHECK(r.total == doctest::Approx(0.2 * 25 * 10 + 3.05 * 25 - 0.2 / 0.9 * 40));
  const std::vector<double> two{40, 10, 0, 0, 0, 60, 0, 0, 0, 0};
  const auto r2 = evaluate_true_cost(two, tariff, PeakCalendar::uniform(10, 5), b, 0.0);
  CHECK(r2.peak_cost == doctest::Approx(305.0));
  CHECK(r2.total == doctest::Approx(r2.energy_cost + r2.peak_cost - r2.terminal_credit).epsilon(1e-12));
}

TEST_CASE("oracle mode reproduces the LP optimum") {
  const auto c = make_case(3, 48, 2);
  const auto r = run_perfect(c, mode(SimMode::FullHorizonOracle));
  const auto lp = lp::solve(build_full_horizon(c.data.truth, c.tariff, c.battery, c.cal, c.e0));
  CHECK(r.report.total == doctest::Approx(lp.objective_value).epsilon(1e-9));
  CHECK(r.lp_solves == 1);
}

TEST_CASE("MPC over the whole horizon under perfect foresight matches the oracle") {
  auto c = make_case(2, 48, 3);
  const int n = c.data.grid.steps();
  // Flat price: with time-varying prices each window's terminal price differs from the
  // full-horizon one and the plans legitimately diverge.
  c.tariff = Tariff::flat(n, 0.12, 3.05);
  c.cal = PeakCalendar::uniform(n, n);
  auto cfg = mode(SimMode::DetMpc, n);
  cfg.mpc.weighting_on = false;
  const auto mpc = run_perfect(c, cfg);
  const auto oracle = run_perfect(c, mode(SimMode::FullHorizonOracle));
  CHECK(std::abs(mpc.report.total - oracle.report.total) <= 1e-6);
}

TEST_CASE("no-storage mode is the closed form") {
  const auto c = make_case(4, 48, 4);
  const auto r = run_perfect(c, mode(SimMode::NoStorage));
  const auto net = c.data.truth.net_demand();
  const double ref = oracle::no_storage_cost(net, c.tariff.buy_price(), 3.05, {0, 48},
                                             terminal_price(c.tariff, 0, 96, c.battery), c.e0);
  CHECK(r.report.total == doctest::Approx(ref).epsilon(1e-12));
  CHECK(r.report.total == doctest::Approx(synth::no_storage_cost(c.data.truth, c.tariff, c.battery, c.cal, c.e0)));
}

TEST_CASE("closed-loop invariants") {
  const auto c = make_case(3, 48, 5);
  for (auto m : {SimMode::DetMpc, SimMode::StochMpc, SimMode::EnergyOnly, SimMode::DailyPeak}) {
    synth::SyntheticEnsembleSource src(c.data.truth, 5, 3.0, 9);
    auto cfg = mode(m, 12);
    cfg.noise_rmse = 2.0;
    const auto r = run(c, cfg, src);
    CHECK(r.trajectory.size() == 72);
    for (const auto& row : r.trajectory) {
      CHECK(row.energy >= 0.0);
      CHECK(row.energy <= c.battery.e_max);
      CHECK(row.p_c * row.p_dc == 0.0);
      CHECK(row.p_grid >= 0.0);
    }
    CHECK(r.report.total == doctest::Approx(r.report.energy_cost + r.report.peak_cost - r.report.terminal_credit)
                                .epsilon(1e-12));
  }
}

TEST_CASE("the filter is inert under perfect forecasts") {
  const auto c = make_case(2, 48, 6);
  auto cfg = mode(SimMode::DetMpc, 12);
  const auto plain = run_perfect(c, cfg);
  cfg.filter_alpha = 0.7;
  const auto filtered = run_perfect(c, cfg);
  CHECK(filtered.report.total == plain.report.total);
}

TEST_CASE("sweeps") {
  const auto c = make_case(2, 48, 7);
  auto factory = [&] { return std::unique_ptr<ForecastSource>(new PerfectForesight(c.data.truth, 1)); };
  auto base = mode(SimMode::DetMpc, 12);
  const auto theta = run_sweep(base, {"theta", {0.5, 0.0}}, factory, c.data.truth, c.tariff, c.battery, c.cal, c.e0);
  REQUIRE(theta.size() == 2);
  CHECK(theta[0].value == 0.0);
  CHECK(theta[0].report.total == run_perfect(c, base).report.total);

  const auto m = run_sweep(base, {"horizon_m", {24, 12}}, factory, c.data.truth, c.tariff, c.battery, c.cal, c.e0);
  const double oracle = run_perfect(c, mode(SimMode::FullHorizonOracle)).report.total;
  for (const auto& row : m) CHECK(row.report.total >= oracle - 1e-6);
  CHECK_THROWS_AS(run_sweep(base, {"theta", {}}, factory, c.data.truth, c.tariff, c.battery, c.cal, c.e0),
                  ConfigError);
  CHECK_THROWS_AS(run_sweep(base, {"nope", {1}}, factory, c.data.truth, c.tariff, c.battery, c.cal, c.e0),
                  ConfigError);
}

TEST_CASE("config validation") {
  SimConfig cfg;
  cfg.horizon_m = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.horizon_m = 5;
  cfg.filter_alpha = 2.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
