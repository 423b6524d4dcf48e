#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "peakshaver/demand_model.hpp"
#include "peakshaver/error_filter.hpp"
#include "peakshaver/errors.hpp"
#include "peakshaver/mlp.hpp"
#include "peakshaver/model_registry.hpp"
#include "peakshaver/pvusa.hpp"
#include "peakshaver/sky_class.hpp"

using namespace peakshaver;

namespace {

std::vector<PvSample> exact_samples(const PvusaCoefficients& g, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> irr(50.0, 1000.0), temp(-5.0, 35.0);
  std::vector<PvSample> s;
  for (int i = 0; i < count; ++i) {
    const double I = irr(rng), T = temp(rng);
    s.push_back({I, T, g.gamma1 * I + g.gamma2 * I * I + g.gamma3 * I * T});
  }
  return s;
}

double residual(const PvusaCoefficients& g, const std::vector<PvSample>& s) {
  double r = 0.0;
  for (const auto& x : s) {
    const double e = x.pv - (g.gamma1 * x.irradiance + g.gamma2 * x.irradiance * x.irradiance +
                             g.gamma3 * x.irradiance * x.temperature);
    r += e * e;
  }
  return r;
}

}  // namespace

TEST_CASE("PVUSA fit recovers exact coefficients and matches the normal equations") {
  const PvusaCoefficients truth{0.05, -1e-5, 1e-4};
  const auto samples = exact_samples(truth, 20, 1);
  const auto g = fit_pvusa(samples);
  CHECK(std::abs(g.gamma1 - truth.gamma1) <= 1e-8);
  CHECK(std::abs(g.gamma2 - truth.gamma2) <= 1e-8);
  CHECK(std::abs(g.gamma3 - truth.gamma3) <= 1e-8);

  // Noisy targets: compare with the independent 3x3 solve.
  std::mt19937_64 rng(2);
  std::normal_distribution<double> noise(0.0, 0.5);
  auto noisy = samples;
  oracle::Matrix x;
  std::vector<double> y;
  for (auto& s : noisy) {
    s.pv += noise(rng);
    x.push_back({s.irradiance, s.irradiance * s.irradiance, s.irradiance * s.temperature});
    y.push_back(s.pv);
  }
  const auto fit = fit_pvusa(noisy);
  const auto ref = oracle::normal_equations3(x, y);
  CHECK(fit.gamma1 == doctest::Approx(ref[0]).epsilon(1e-7));
  CHECK(fit.gamma2 == doctest::Approx(ref[1]).epsilon(1e-7));
  CHECK(fit.gamma3 == doctest::Approx(ref[2]).epsilon(1e-7));

  // Least-squares optimality against random perturbations.
  const double best = residual(fit, noisy);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const PvusaCoefficients other{fit.gamma1 * (1 + 0.01 * d(rng)), fit.gamma2 * (1 + 0.01 * d(rng)),
                                  fit.gamma3 * (1 + 0.01 * d(rng))};
    CHECK(best <= residual(other, noisy));
  }
}

TEST_CASE("PVUSA degenerate fits") {
  auto samples = exact_samples({0, 0, 0}, 10, 3);
  const auto g = fit_pvusa(samples);
  CHECK(std::abs(g.gamma1) < 1e-15);
  CHECK(std::abs(g.gamma2) < 1e-15);
  CHECK(std::abs(g.gamma3) < 1e-15);

  for (auto& s : samples) s.irradiance = 0.0;
  CHECK_THROWS_AS(fit_pvusa(samples), FitError);
  try {
    fit_pvusa(samples);
  } catch (const FitError& e) {
    CHECK(std::string(e.what()).find("I") != std::string::npos);
  }
  // Constant temperature makes I*T proportional to I.
  auto flat = exact_samples({0.05, -1e-5, 1e-4}, 10, 4);
  for (auto& s : flat) s.temperature = 20.0;
  CHECK_THROWS_AS(fit_pvusa(flat), FitError);
  CHECK_THROWS_AS(fit_pvusa(std::vector<PvSample>(2)), DomainError);
}

TEST_CASE("PVUSA prediction") {
  CHECK(predict_pvusa({0.1, 0, 0}, 100, 20) == doctest::Approx(10.0));
  CHECK(predict_pvusa({0.05, -1e-5, 1e-4}, 200, 25) == doctest::Approx(10.1));
  CHECK(predict_pvusa({0.05, -1e-3, 0}, 100, 0) == 0.0);
}

TEST_CASE("clear-sky classification") {
  std::vector<double> cs(24, 0.0);
  for (int h = 6; h < 18; ++h) cs[h] = 800.0 * std::sin(M_PI * (h - 5.5) / 12.0);
  auto scaled = [&](double f) {
    auto v = cs;
    for (auto& x : v) x *= f;
    return v;
  };
  CHECK(classify_day(cs, cs, 0.8) == SkyClass::Clear);
  CHECK(classify_day(scaled(0.3), cs, 0.8) == SkyClass::Cloudy);
  CHECK(classify_day(scaled(0.5), cs, 0.5) == SkyClass::Clear);
  for (double c : {0.01, 2.0, 1000.0}) {
    auto big_cs = cs;
    for (auto& x : big_cs) x *= c;
    auto irr = scaled(0.79 * c);
    CHECK(classify_day(irr, big_cs, 0.8) == SkyClass::Cloudy);
    irr = scaled(0.81 * c);
    CHECK(classify_day(irr, big_cs, 0.8) == SkyClass::Clear);
  }
  CHECK_THROWS_AS(classify_day(cs, std::vector<double>(24, 0.0), 0.8), ClassificationError);
}

TEST_CASE("error filter") {
  const std::vector<double> f{10, 10, 10};
  FilterState s{0.5, 2.0};
  const auto out = apply_error_filter(f, s);
  CHECK(out[0] == doctest::Approx(9.0));
  CHECK(out[1] == doctest::Approx(9.5));
  CHECK(out[2] == doctest::Approx(9.75));
  CHECK(apply_error_filter(f, FilterState{0.0, 5.0}) == f);
  CHECK(apply_error_filter(f, FilterState{0.5, 0.0}) == f);
  s.observe(12.0, 10.0);
  CHECK(s.last_error == 2.0);
  CHECK_THROWS_AS(apply_error_filter(std::vector<double>{}, s), DomainError);
}

TEST_CASE("MLP forward pass") {
  Mlp zero({3, 2}, {}, 1);
  zero.weight(0).setZero();
  zero.bias(0) << 1.5, -2.0;
  CHECK(zero.predict(std::vector<double>{1, 2, 3}) == std::vector<double>{1.5, -2.0});

  Mlp id({3, 3}, {}, 1);
  id.weight(0).setIdentity();
  id.bias(0).setZero();
  CHECK(id.predict(std::vector<double>{1, -2, 3}) == std::vector<double>{1, -2, 3});

  const auto m1 = Mlp::pv_model(9);
  const auto m2 = Mlp::pv_model(9);
  std::vector<double> x(48, 0.3);
  CHECK(m1.predict(x) == m2.predict(x));
  CHECK_THROWS_AS(m1.predict(std::vector<double>(47, 0.0)), DomainError);
  CHECK(Mlp::demand_day_ahead_model(1).input_width() == 60);
  CHECK(Mlp::demand_multi_day_model(1).widths() == std::vector<int>{48, 96, 72, 24});
}

TEST_CASE("MLP gradient matches central differences on a 48-8-24 network") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int point = 0; point < 10; ++point) {
    Mlp m({48, 8, 24}, {0.25}, 100 + point);
    // Nonzero biases so units sit away from the ReLU kink.
    for (int l = 0; l < m.layers(); ++l) {
      for (int i = 0; i < m.bias(l).size(); ++i) m.bias(l)(i) = u(rng) - 0.5;
    }
    Eigen::MatrixXd x(6, 48), y(6, 24);
    for (int i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
    for (int i = 0; i < y.size(); ++i) y.data()[i] = 2.0 * u(rng);
    const auto g = m.mse_gradient(x, y);
    auto p = m.parameters();
    REQUIRE(g.size() == p.size());
    int bad = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double h = 1e-6;
      const double keep = p[k];
      p[k] = keep + h;
      m.set_parameters(p);
      const double up = m.mse(x, y);
      p[k] = keep - h;
      m.set_parameters(p);
      const double down = m.mse(x, y);
      p[k] = keep;
      m.set_parameters(p);
      const double fd = (up - down) / (2 * h);
      if (std::abs(fd - g[k]) > 1e-4 * std::max(std::abs(fd), std::abs(g[k])) + 1e-9) ++bad;
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("MLP training") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd x(64, 1), y(64, 1), zero = Eigen::MatrixXd::Zero(64, 1);
  for (int i = 0; i < 64; ++i) {
    x(i, 0) = u(rng);
    y(i, 0) = 2.0 * x(i, 0);
  }
  // Seed picked so the single hidden unit starts with a positive weight (a dead ReLU cannot learn).
  Mlp net({1, 1, 1}, {0.0}, 2);
  REQUIRE(net.weight(0)(0, 0) > 0.0);
  const auto r = train_mlp(net, x, y, TrainOptions{500, 0.01, 32, 1});
  CHECK(r.loss_trace.size() == 500);
  CHECK(r.model.mse(x, y) < 1e-3);
  // Loss averaged over 50-epoch windows never rises.
  for (std::size_t w = 50; w + 50 <= r.loss_trace.size(); w += 50) {
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < 50; ++i) {
      a += r.loss_trace[w - 50 + i];
      b += r.loss_trace[w + i];
    }
    CHECK(b <= a);
  }

  CHECK(train_mlp(net, x, y, TrainOptions{0, 0.01, 32, 1}).model == net);

  const auto z = train_mlp(Mlp({1, 8, 1}, {0.0}, 3), x, zero, TrainOptions{500, 0.01, 32, 1});
  CHECK(z.model.predict_batch(x).array().abs().mean() < 0.05);
  CHECK_THROWS_AS(train_mlp(net, x, Eigen::MatrixXd(63, 1), TrainOptions{}), DomainError);
}

TEST_CASE("model registry refits and serializes") {
  const Timestamp start = parse_timestamp("2018-03-01T00:00:00Z");
  const PvusaCoefficients truth{0.05, -1e-5, 1e-4};
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> irr(50, 900), temp(0, 30);
  std::vector<PvHistoryRecord> hist;
  for (int t = 0; t < 24 * 10; ++t) {
    const Timestamp ts = start + std::chrono::hours{t};
    const double I = irr(rng), T = temp(rng);
    hist.push_back({ts, latest_issue(ts), SkyClass::Clear, I, T, predict_pvusa(truth, I, T) + 0.1 * (t % 7)});
  }
  const auto prev = ModelRegistry::uniform({1, 2, 3});
  const Timestamp now = start + std::chrono::days{10};

  const auto r = refit_models(hist, now, prev, 10);
  CHECK(r.ran);
  std::vector<PvSample> direct;
  for (const auto& h : hist) {
    if (h.issue == IssueTime::Midnight) direct.push_back({h.irradiance, h.temperature, h.pv});
  }
  CHECK(r.registry.at({IssueTime::Midnight, SkyClass::Clear}).coefficients == fit_pvusa(direct));
  // No cloudy data: previous models kept, with a warning.
  CHECK(r.registry.at({IssueTime::Noon, SkyClass::Cloudy}) == prev.at({IssueTime::Noon, SkyClass::Cloudy}));
  CHECK_FALSE(r.warnings.empty());

  const auto off = refit_models(hist, now + std::chrono::hours{13}, prev, 10);
  CHECK_FALSE(off.ran);
  CHECK(off.registry == prev);

  const std::vector<PvHistoryRecord> short_hist(hist.end() - 72, hist.end());
  const auto s = refit_models(short_hist, now, prev, 10);
  CHECK(s.registry == prev);
  CHECK(s.warnings.size() == 1);

  CHECK(ModelRegistry::from_json(r.registry.to_json()) == r.registry);
  const auto m = Mlp::pv_model(3);
  CHECK(mlp_from_json(mlp_to_json(m)) == m);
}

TEST_CASE("demand model trains and forecasts multi-day windows") {
  DemandHistory h;
  for (int t = 0; t < 24 * 4; ++t) {
    const int hour = t % 24;
    h.irradiance.push_back(hour >= 6 && hour < 18 ? 500.0 : 0.0);
    h.temperature.push_back(10.0 + 5.0 * std::sin(t / 24.0));
    h.demand.push_back(30.0 + (hour >= 8 && hour < 18 ? 40.0 : 0.0));
  }
  const auto model = DemandModel::train(h, TrainOptions{30, 0.01, 8, 1});
  const std::vector<double> prev(h.demand.end() - 12, h.demand.end());
  const auto f = model.forecast(std::span(h.irradiance).first(48), std::span(h.temperature).first(48), prev);
  CHECK(f.size() == 48);
  for (double v : f) CHECK(std::isfinite(v));
  CHECK_THROWS_AS(model.forecast(h.irradiance, h.temperature, std::vector<double>(5)), DomainError);
}
