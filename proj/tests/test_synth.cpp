#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "peakshaver/errors.hpp"
#include "peakshaver/lp.hpp"
#include "peakshaver/problems.hpp"
#include "peakshaver/synth.hpp"

using namespace peakshaver;

TEST_CASE("synthetic data is seeded and physically shaped") {
  synth::SynthSpec spec;
  spec.days = 3;
  const auto a = synth::generate(spec);
  const auto b = synth::generate(spec);
  CHECK(a.truth.demand == b.truth.demand);
  CHECK(a.truth.pv == b.truth.pv);
  CHECK(a.irradiance == b.irradiance);
  for (int d = 0; d < 3; ++d) CHECK(a.truth.pv[d * 24] == 0.0);
  CHECK_NOTHROW(a.truth.validate(72));
  spec.seed = 2;
  CHECK(synth::generate(spec).truth.demand != a.truth.demand);
  spec.weekend_factor = 1.5;
  CHECK_THROWS_AS(synth::generate(spec), DomainError);
}

TEST_CASE("zero spread ensembles equal the truth") {
  synth::SynthSpec spec;
  spec.days = 2;
  spec.noise_sd = 0;
  spec.scenario_spread_sd = 0;
  const auto d = synth::generate(spec);
  synth::SyntheticEnsembleSource src(d.truth, 4, 0.0, 1);
  const auto e = src.forecast(5, 20);
  const auto net = d.truth.net_demand();
  for (const auto& s : e.net) {
    for (int k = 0; k < 20; ++k) CHECK(s[k] == net[5 + k]);
  }
  const auto w = synth::generate_weather_ensemble(spec, d);
  CHECK(w.irradiance.size() == 21);
}

TEST_CASE("ensemble spread grows with lead time") {
  synth::SynthSpec spec;
  spec.days = 3;
  const auto d = synth::generate(spec);
  synth::SyntheticEnsembleSource src(d.truth, 200, 3.0, 4);
  const auto e = src.forecast(0, 48);
  const auto net = d.truth.net_demand();
  auto sd = [&](int k) {
    double s = 0;
    for (const auto& v : e.net) s += (v[k] - net[k]) * (v[k] - net[k]);
    return std::sqrt(s / e.scenarios());
  };
  CHECK(sd(47) > sd(2));
  CHECK(sd(23) == doctest::Approx(3.0).epsilon(0.25));
  synth::SyntheticEnsembleSource again(d.truth, 200, 3.0, 4);
  CHECK(again.forecast(0, 48).net == e.net);
}

namespace {

struct Tiny {
  ExogenousData data;
  Tariff tariff;
  PeakCalendar cal;
  BatteryParams battery;
  double e0;
};

Tiny tiny(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dem(20, 100), pv(0, 30), price(0.08, 0.2), e(0.0, 1.0);
  Tiny t{{}, Tariff::flat(n, 0.1, 1.0), PeakCalendar::uniform(n, n), {}, 0.0};
  std::vector<double> prices;
  for (int k = 0; k < n; ++k) {
    t.data.demand.push_back(dem(rng));
    t.data.pv.push_back(pv(rng));
    prices.push_back(price(rng));
  }
  t.tariff = Tariff(prices, 3.05);
  t.battery.e_max = 200;
  t.battery.p_c_max = t.battery.p_dc_max = 40;
  t.e0 = 200 * e(rng);
  return t;
}

}  // namespace

TEST_CASE("DP oracle bounds the LP from above and closes the gap") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto t = tiny(4, seed);
    const double lp = lp::solve(build_full_horizon(t.data, t.tariff, t.battery, t.cal, t.e0)).objective_value;
    double prev = 1e300;
    for (int levels : {4, 8, 16, 32, 64}) {
      const double dp = synth::dp_oracle(t.data, t.tariff, t.battery, t.cal, t.e0, levels);
      CHECK(dp >= lp - 1e-9);
      CHECK(dp <= prev + 1e-12);
      prev = dp;
    }
    CHECK(prev - lp <= 0.02 * std::abs(prev));
  }
}

TEST_CASE("DP oracle without a battery is the closed form") {
  auto t = tiny(6, 3);
  t.battery.p_c_max = t.battery.p_dc_max = 0;
  const double ref = oracle::no_storage_cost(t.data.net_demand(), t.tariff.buy_price(), 3.05, {0},
                                             terminal_price(t.tariff, 0, 6, t.battery), t.e0);
  CHECK(synth::dp_oracle(t.data, t.tariff, t.battery, t.cal, t.e0, 64) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(synth::no_storage_cost(t.data, t.tariff, t.battery, t.cal, t.e0) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("one-step DP equals enumerating the one-step actions") {
  auto t = tiny(1, 5);
  t.tariff = Tariff(t.tariff.buy_price(), 1e-9);  // peak price negligible
  const double dp = synth::dp_oracle(t.data, t.tariff, t.battery, t.cal, t.e0, 64);
  const double lp = lp::solve(build_full_horizon(t.data, t.tariff, t.battery, t.cal, t.e0)).objective_value;
  // Enumerate the action grid: discharge or charge in fine steps.
  const double p_term = terminal_price(t.tariff, 0, 1, t.battery);
  const double net = t.data.net_demand(0);
  double best = 1e300;
  for (int i = -4000; i <= 4000; ++i) {
    const double p = i * 0.01;  // >0 charge, <0 discharge
    const double pc = std::max(p, 0.0), pdc = std::max(-p, 0.0);
    if (pc > t.battery.p_c_max || pdc > t.battery.p_dc_max) continue;
    const double e1 = t.e0 + storage_delta(pc, pdc, t.battery, 1.0);
    if (e1 < 0 || e1 > t.battery.e_max) continue;
    const double g = std::max(net + pc - pdc, 0.0);
    best = std::min(best, t.tariff.buy(0) * g + 1e-9 * g - p_term * e1);
  }
  CHECK(dp == doctest::Approx(best).epsilon(1e-6));
  CHECK(lp == doctest::Approx(best).epsilon(1e-6));
  CHECK_THROWS_AS(synth::dp_oracle(tiny(9, 1).data, Tariff::flat(9, 0.1, 1), {}, PeakCalendar::uniform(9, 9), 0, 8),
                  DomainError);
}
