#include <doctest.h>

#include <algorithm>
#include <random>

#include "peakshaver/core_types.hpp"
#include "peakshaver/errors.hpp"

using namespace peakshaver;

namespace {
Timestamp ts(const char* s) { return parse_timestamp(s); }
}  // namespace

TEST_CASE("storage_delta follows the efficiencies") {
  BatteryParams b;
  b.m_c = 0.9;
  b.m_dc = 0.9;
  CHECK(storage_delta(10, 0, b, 1.0) == doctest::Approx(9.0).epsilon(1e-15));
  CHECK(storage_delta(0, 0, b, 1.0) == 0.0);
  CHECK(storage_delta(0, 9, b, 1.0) == doctest::Approx(-10.0).epsilon(1e-15));
  CHECK_THROWS_AS(storage_delta(-1, 0, b, 1.0), DomainError);
  CHECK_THROWS_AS(storage_delta(0, b.p_dc_max + 1, b, 1.0), DomainError);
}

TEST_CASE("storage_delta is positively homogeneous") {
  BatteryParams b;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 40.0), s(0.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const double pc = u(rng), pdc = u(rng), a = s(rng);
    CHECK(storage_delta(a * pc, a * pdc, b, 1.0) == doctest::Approx(a * storage_delta(pc, pdc, b, 1.0)));
  }
}

TEST_CASE("terminal price is the window minimum over the charge efficiency") {
  const TimeGrid grid(ts("2018-03-01T00:00:00Z"), 48);
  const Tariff tariff = Tariff::day_night(grid, DayNightRule{}, 3.05);
  BatteryParams b;
  CHECK(terminal_price(tariff, 0, 48, b) == doctest::Approx(0.0933 / 0.9).epsilon(1e-12));
  CHECK(terminal_price(tariff, 0, 48, b) == doctest::Approx(0.1036667).epsilon(1e-6));
  CHECK(terminal_price(tariff, 8, 12, b) == doctest::Approx(0.1398 / 0.9).epsilon(1e-12));
  b.m_c = 1.0;
  CHECK(terminal_price(Tariff::flat(5, 0.2, 1.0), 0, 5, b) == 0.2);
  CHECK_THROWS_AS(terminal_price(tariff, 3, 3, b), DomainError);
}

TEST_CASE("terminal price ignores price order") {
  std::vector<double> p{0.3, 0.1, 0.25, 0.2};
  BatteryParams b;
  const double ref = terminal_price(Tariff(p, 1.0), 0, 4, b);
  std::sort(p.begin(), p.end());
  do {
    CHECK(terminal_price(Tariff(p, 1.0), 0, 4, b) == ref);
  } while (std::next_permutation(p.begin(), p.end()));
}

TEST_CASE("day/night tariff uses the hour bounds") {
  const TimeGrid grid(ts("2018-03-01T00:00:00Z"), 24);
  const Tariff t = Tariff::day_night(grid, DayNightRule{}, 3.05);
  CHECK(t.buy(6) == 0.0933);
  CHECK(t.buy(7) == 0.1398);
  CHECK(t.buy(19) == 0.1398);
  CHECK(t.buy(20) == 0.0933);
  CHECK_THROWS_AS(Tariff({0.1, 0.0}, 1.0), DomainError);
}

TEST_CASE("timestamps round-trip and grids index them") {
  const auto t = ts("2018-03-31T23:00:00Z");
  CHECK(format_timestamp(t) == "2018-03-31T23:00:00Z");
  CHECK(hour_of_day(t) == 23);
  CHECK(day_of_week(ts("2018-03-05T10:00:00Z")) == 0);  // a Monday
  CHECK_THROWS_AS(parse_timestamp("2018-03-31 23:00"), DomainError);
  const TimeGrid g(t, 5);
  CHECK(g.time_at(1) == ts("2018-04-01T00:00:00Z"));
  CHECK(g.index_of(ts("2018-04-01T02:00:00Z")) == 3);
  CHECK_FALSE(g.index_of(ts("2018-04-01T02:30:00Z")).has_value());
}

TEST_CASE("peak calendars partition the grid") {
  const auto cal = PeakCalendar::uniform(100, 48);
  CHECK(cal.periods() == 3);
  for (int t = 0; t < 100; ++t) {
    const int q = cal.period_of(t);
    CHECK(cal.period_begin(q) <= t);
    CHECK(t < cal.period_end(q));
  }
  CHECK(cal.period_steps(2) == 4);

  const TimeGrid grid(ts("2018-03-30T00:00:00Z"), 24 * 4);
  const auto monthly = PeakCalendar::monthly(grid);
  CHECK(monthly.periods() == 2);
  CHECK(monthly.period_begin(1) == 48);
  CHECK(PeakCalendar::daily(grid).periods() == 4);
  CHECK_THROWS_AS(PeakCalendar({0, 5, 5}, 10), DomainError);
  CHECK_THROWS_AS(PeakCalendar({1, 5}, 10), DomainError);
}

TEST_CASE("exogenous data validation") {
  ExogenousData d{{10, 20}, {5, 30}};
  CHECK(d.net_demand(1) == -10);
  CHECK_NOTHROW(d.validate(2));
  CHECK_THROWS_AS(d.validate(3), DomainError);
  d.pv[0] = -1;
  CHECK_THROWS_AS(d.validate(2), DomainError);
}
