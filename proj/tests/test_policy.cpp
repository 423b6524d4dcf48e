#include <doctest.h>

#include <cmath>
#include <random>
#include <tuple>

#include "peakshaver/errors.hpp"
#include "peakshaver/policy.hpp"

using namespace peakshaver;

namespace {

// Endpoints of a reference saturated affine policy.
constexpr double kLoX = 6.7201, kLoY = 46.6326, kHiX = 27.7405, kHiY = 48.5727;

SaturatedAffinePolicy reference_affine() {
  const double a = (kHiY - kLoY) / (kHiX - kLoX);
  return {a, kLoY - a * kLoX, {kLoX, kHiX}};
}

}  // namespace

TEST_CASE("constant and saturated affine policies") {
  CHECK(evaluate_policy(ConstantPolicy{47.3798}, 23.6) == 47.3798);
  CHECK(evaluate_policy(ConstantPolicy{47.3798}, -5.0) == 47.3798);
  const auto affine = reference_affine();
  CHECK(std::abs(evaluate_policy(affine, 23.6) - 48.2) < 0.05);
  CHECK(evaluate_policy(affine, 40.0) == evaluate_policy(affine, kHiX));
  CHECK(evaluate_policy(affine, -2.0) == evaluate_policy(affine, kLoX));
  double prev = -1.0;
  for (double r = 0.0; r < 35.0; r += 0.5) {
    const double v = evaluate_policy(affine, r);
    CHECK(v >= prev);
    prev = v;
  }
  BandedAffinePolicy banded;
  banded.a = {{0.5}};
  banded.b = {10.0};
  banded.hulls = {{0.0, 20.0}};
  CHECK(evaluate_policy(banded, 30.0) == 20.0);
  CHECK(evaluate_policy(ConstantPolicy{-3.0}, 1.0) == 0.0);
}

TEST_CASE("repair examples") {
  BatteryParams b;
  b.e_max = 1000;
  b.p_c_max = b.p_dc_max = 100;
  auto s = repair_feasibility(50, 30, b, 500, 0);
  CHECK(s.p_c == doctest::Approx(20));
  CHECK(s.p_dc == 0);
  CHECK(s.grid_slack_added == 0);

  b.p_c_max = 5;
  s = repair_feasibility(50, 30, b, 500, 0);
  CHECK(s.p_c == doctest::Approx(5));
  CHECK(s.p_grid == doctest::Approx(35));
  CHECK(s.grid_slack_added == doctest::Approx(-15));
  CHECK(s.curtailed_pv == 0);

  // With PV available the surplus is curtailed before the grid is reduced.
  s = repair_feasibility(50, 30, b, 500, 10);
  CHECK(s.curtailed_pv == doctest::Approx(10));
  CHECK(s.p_grid == doctest::Approx(45));

  b.p_c_max = 100;
  s = repair_feasibility(10, 30, b, 0, 0);
  CHECK(s.p_dc == 0);
  CHECK(s.p_grid == doctest::Approx(30));
  CHECK(s.grid_slack_added == doctest::Approx(20));

  CHECK_THROWS_AS(repair_feasibility(10, -20, b, 0, 5), DomainError);
}

TEST_CASE("repair leaves feasible dispatch untouched") {
  BatteryParams b;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double r = 100 * u(rng), e = 500 + 1000 * u(rng);
    const double move = (u(rng) - 0.5) * 150;  // within both power limits when |move| <= 100
    if (std::abs(move) > 100 || r + move < 0) continue;
    const auto s = repair_feasibility(r + move, r, b, e, 20);
    CHECK(s.p_grid == r + move);
    CHECK(s.curtailed_pv == 0);
    CHECK(s.grid_slack_added == 0);
  }
}

namespace {

// Lexicographic D9 objective over a grid of candidate dispatches.
std::tuple<double, double> exhaustive_repair(double p_grid, double r, const BatteryParams& b, double e, double pv,
                                             double step) {
  std::tuple<double, double> best{1e300, 1e300};
  for (double pc = 0; pc <= b.p_c_max + 1e-12; pc += step) {
    for (double pdc = 0; pdc <= b.p_dc_max + 1e-12; pdc += step) {
      if (pc > 0 && pdc > 0) continue;
      const double next = e + storage_delta(pc, pdc, b, 1.0);
      if (next < -1e-12 || next > b.e_max + 1e-12) continue;
      for (double c = 0; c <= pv + 1e-12; c += step) {
        const double g = r + c + pc - pdc;
        if (g < -1e-12) continue;
        best = std::min(best, std::make_tuple(std::abs(g - p_grid), c));
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("repair matches exhaustive search") {
  std::mt19937_64 rng(17);
  auto pick = [&](int lo, int hi) { return static_cast<double>(lo + static_cast<int>(rng() % (hi - lo + 1))); };
  for (int i = 0; i < 300; ++i) {
    BatteryParams b;
    b.e_max = pick(1, 20);
    b.p_c_max = pick(0, 8);
    b.p_dc_max = pick(0, 8);
    b.m_c = rng() % 2 ? 1.0 : 0.5;
    b.m_dc = rng() % 2 ? 1.0 : 0.5;
    const double e = std::min(b.e_max, pick(0, 20));
    const double pv = pick(0, 6);
    const double r = pick(-static_cast<int>(pv), 20);
    const double p_grid = pick(0, 30);
    CAPTURE(i);
    const auto s = repair_feasibility(p_grid, r, b, e, pv);
    const auto [dev, curt] = exhaustive_repair(p_grid, r, b, e, pv, 0.5);
    CHECK(std::abs(s.p_grid - p_grid) == doctest::Approx(dev).epsilon(1e-9));
    CHECK(s.curtailed_pv == doctest::Approx(curt).epsilon(1e-9));
    CHECK(s.p_c * s.p_dc == 0.0);
    CHECK(s.p_grid == (r + s.curtailed_pv) + s.p_c - s.p_dc);
  }
}

TEST_CASE("state advance") {
  BatteryParams b;
  const auto cal = PeakCalendar::uniform(10, 5);
  const MpcState s{100, 30, 3};
  auto next = advance_state(s, AppliedStep{20, 0, 0, 0, 0}, b, cal);
  CHECK(next.s_init == 30);
  CHECK(next.e_t == 100);
  CHECK(next.t == 4);
  next = advance_state(next, AppliedStep{40, 10, 0, 0, 0}, b, cal);
  CHECK(next.s_init == 0);  // step 5 opens a new period
  CHECK(next.e_t == doctest::Approx(109));
  next = advance_state(next, AppliedStep{40, 0, 0, 0, 0}, b, cal);
  CHECK(next.s_init == 40);
  CHECK_THROWS_AS(advance_state(MpcState{1, 0, 0}, AppliedStep{0, 0, 50, 0, 0}, b, cal), InternalError);
}

TEST_CASE("repair absorbs rounding residue when charging and curtailing") {
  BatteryParams b;
  b.e_max = 1000;
  b.p_c_max = 1.835988533561965;
  const double r = -27.536580222331722, pv = 42.512960245339194;
  const auto s = repair_feasibility(0.0, r, b, 685.22225261443191, pv);
  CHECK(s.p_grid >= 0.0);
  CHECK(s.p_grid == (r + s.curtailed_pv) + s.p_c - s.p_dc);
  CHECK(s.curtailed_pv <= pv);
  CHECK(s.p_c <= b.p_c_max);
}
