#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "peakshaver/errors.hpp"
#include "peakshaver/lp.hpp"

using namespace peakshaver;
using namespace peakshaver::lp;

TEST_CASE("single bound") {
  LpBuilder b;
  const auto x = b.add_variable("x", 3.0, kInf, 1.0);
  const auto p = std::move(b).build();
  const auto s = solve(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.value(x) == doctest::Approx(3.0));
  CHECK(s.objective_value == doctest::Approx(3.0));
}

TEST_CASE("degenerate optimal face") {
  LpBuilder b;
  const auto x = b.add_variable("x", 0, kInf, 1);
  const auto y = b.add_variable("y", 0, kInf, 1);
  b.add_ge("cover", {{x, 1}, {y, 1}}, 1);
  const auto p = std::move(b).build();
  const auto s = solve(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(s.objective_value == doctest::Approx(1.0));
  CHECK(max_violation(p, s.values) <= 1e-7);
}

TEST_CASE("tie-break picks a point of the optimal face") {
  LpBuilder b;
  const auto x = b.add_variable("x", 0, kInf, 1);
  const auto y = b.add_variable("y", 0, kInf, 1);
  b.add_ge("cover", {{x, 1}, {y, 1}}, 1);
  b.set_tie_break({{x, 1}});
  const auto s = solve(std::move(b).build());
  CHECK(s.value(x) == doctest::Approx(0.0));
  CHECK(s.value(y) == doctest::Approx(1.0));
}

TEST_CASE("infeasible and unbounded are statuses") {
  {
    LpBuilder b;
    const auto x = b.add_variable("x", 0, 1, 1);
    b.add_ge("big", {{x, 1}}, 2);
    CHECK(solve(std::move(b).build()).status == SolveStatus::Infeasible);
  }
  {
    LpBuilder b;
    const auto x = b.add_variable("x", -kInf, kInf, 1);
    const auto y = b.add_variable("y", 0, kInf, 0);
    b.add_le("r", {{x, 1}, {y, -1}}, 0);
    CHECK(solve(std::move(b).build()).status == SolveStatus::Unbounded);
  }
}

TEST_CASE("malformed problems are domain errors") {
  LpBuilder b;
  const auto x = b.add_variable("x");
  CHECK_THROWS_AS(b.add_variable("x"), DomainError);
  CHECK_THROWS_AS(b.add_le("r", {{x, std::nan("")}}, 1), DomainError);
  CHECK_THROWS_AS(b.add_le("r", {{VarId{7}, 1}}, 1), DomainError);
  CHECK_THROWS_AS(b.add_variable("y", 2, 1), DomainError);
}

TEST_CASE("epigraph max") {
  auto run = [](std::vector<double> values, double floor) {
    LpBuilder b;
    std::vector<VarId> terms;
    for (std::size_t i = 0; i < values.size(); ++i) {
      terms.push_back(b.add_variable("v" + std::to_string(i), values[i], values[i]));
    }
    const auto t = b.add_variable("t", floor, kInf, 1.0);
    add_epigraph_max(b, t, terms, "epi");
    return solve(std::move(b).build()).value(t);
  };
  CHECK(run({2, 5, 3}, 0) == doctest::Approx(5));
  CHECK(run({4}, 0) == doctest::Approx(4));
  CHECK(run({2, 5, 3}, 7) == doctest::Approx(7));
  LpBuilder b;
  const auto t = b.add_variable("t");
  CHECK_THROWS_AS(add_epigraph_max(b, t, {}, "epi"), DomainError);
}

namespace {

struct RandomLp {
  std::vector<double> c;
  oracle::Matrix a;
  std::vector<double> rhs, lo, hi;
  LpProblem problem;
};

RandomLp random_lp(std::uint64_t seed, int n, int m) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-5.0, 5.0), box(1.0, 10.0);
  RandomLp r;
  LpBuilder b;
  std::vector<VarId> vars;
  for (int j = 0; j < n; ++j) {
    r.c.push_back(coef(rng));
    r.lo.push_back(-box(rng));
    r.hi.push_back(box(rng));
    vars.push_back(b.add_variable("x" + std::to_string(j), r.lo[j], r.hi[j], r.c[j]));
  }
  for (int i = 0; i < m; ++i) {
    std::vector<double> row(n);
    std::vector<Term> terms;
    for (int j = 0; j < n; ++j) {
      row[j] = coef(rng);
      terms.push_back({vars[j], row[j]});
    }
    // Keep x = 0 feasible most of the time but not always.
    const double rhs = coef(rng) + 3.0;
    r.a.push_back(row);
    r.rhs.push_back(rhs);
    b.add_le("r" + std::to_string(i), terms, rhs);
  }
  r.problem = std::move(b).build();
  return r;
}

}  // namespace

namespace {

int compare_with_enumeration(std::uint64_t first_seed, int count, int n, int m) {
  int infeasible = 0;
  for (std::uint64_t seed = first_seed; seed < first_seed + static_cast<std::uint64_t>(count); ++seed) {
    CAPTURE(seed);
    const auto r = random_lp(seed, n, m);
    const auto ref = oracle::vertex_enumeration(r.c, r.a, r.rhs, r.lo, r.hi);
    const auto s = solve(r.problem);
    if (!ref.feasible) {
      CHECK(s.status == SolveStatus::Infeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(max_violation(r.problem, s.values) <= 1e-7);
    CHECK(std::abs(s.objective_value - ref.objective) <= 1e-6 * std::max(1.0, std::abs(ref.objective)));
  }
  return infeasible;
}

}  // namespace

TEST_CASE("simplex agrees with vertex enumeration on 50 random instances") {
  CHECK(compare_with_enumeration(1, 50, 4, 6) < 50);
}

TEST_CASE("simplex agrees with vertex enumeration on 8-variable, 12-row instances") {
  compare_with_enumeration(1000, 3, 8, 12);
}

TEST_CASE("objective scaling scales the optimum and keeps the argmin") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const auto r = random_lp(seed, 6, 8);
    const auto s = solve(r.problem);
    if (s.status != SolveStatus::Optimal) continue;
    const auto scaled = solve(r.problem.with_scaled_objective(2.5));
    REQUIRE(scaled.status == SolveStatus::Optimal);
    CHECK(scaled.objective_value == doctest::Approx(2.5 * s.objective_value).epsilon(1e-9));
    CHECK(objective_value(r.problem, scaled.values) == doctest::Approx(s.objective_value).epsilon(1e-9));
  }
}

TEST_CASE("solves are deterministic") {
  const auto r = random_lp(7, 8, 12);
  const auto a = solve(r.problem);
  const auto b = solve(r.problem);
  CHECK(a.values == b.values);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("larger sparse instance stays feasible") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LpBuilder b;
  const int n = 300, m = 200;
  std::vector<VarId> x;
  for (int j = 0; j < n; ++j) x.push_back(b.add_variable("x" + std::to_string(j), 0, 10, -u(rng)));
  for (int i = 0; i < m; ++i) {
    std::vector<Term> t;
    for (int k = 0; k < 5; ++k) t.push_back({x[static_cast<std::size_t>(rng() % n)], u(rng)});
    b.add_le("r" + std::to_string(i), t, 5.0 + 10 * u(rng));
  }
  const auto p = std::move(b).build();
  const auto s = solve(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK(max_violation(p, s.values) <= 1e-7);
}

TEST_CASE("dump round-trips") {
  const auto r = random_lp(5, 4, 3);
  const auto text = dump(r.problem);
  CHECK(parse_dump(text) == r.problem);
  CHECK(dump(parse_dump(text)) == text);
  CHECK_THROWS_AS(parse_dump("peakshaver-lp 1\nvars 1\nx 0 1\n"), DomainError);
}
