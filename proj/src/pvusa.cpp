#include "peakshaver/pvusa.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "peakshaver/errors.hpp"

namespace peakshaver {

namespace {
constexpr const char* kColumnNames[3] = {"I", "I^2", "I*T"};
}

void WeatherScenario::validate() const {
  if (irradiance.size() != temperature.size()) {
    throw DomainError("weather scenario: irradiance and temperature lengths differ");
  }
  for (double v : irradiance) {
    if (!std::isfinite(v) || v < 0.0) throw DomainError("weather scenario: irradiance must be finite and >= 0");
  }
  for (double v : temperature) {
    if (!std::isfinite(v)) throw DomainError("weather scenario: non-finite temperature");
  }
}

PvusaCoefficients fit_pvusa(std::span<const PvSample> samples) {
  if (samples.size() < 3) throw DomainError("fit_pvusa needs at least 3 samples");
  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const PvSample& s = samples[static_cast<std::size_t>(i)];
    if (!std::isfinite(s.irradiance) || !std::isfinite(s.temperature) || !std::isfinite(s.pv)) {
      throw DomainError("fit_pvusa: non-finite sample at index " + std::to_string(i));
    }
    x(i, 0) = s.irradiance;
    x(i, 1) = s.irradiance * s.irradiance;
    x(i, 2) = s.irradiance * s.temperature;
    y[i] = s.pv;
  }

  // Column equilibration: I^2 is ~1e3 times larger than I.
  Eigen::Vector3d scale;
  for (int c = 0; c < 3; ++c) {
    const double norm = x.col(c).norm();
    if (norm == 0.0) throw FitError(std::string("fit_pvusa: regressor ") + kColumnNames[c] + " is identically zero");
    scale[c] = norm;
    x.col(c) /= norm;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-12);
  if (qr.rank() < 3) {
    const int bad = static_cast<int>(qr.colsPermutation().indices()[2]);
    throw FitError(std::string("fit_pvusa: design matrix is rank deficient; regressor ") + kColumnNames[bad] +
                   " is linearly dependent on the others");
  }
  const Eigen::Vector3d g = qr.solve(y).cwiseQuotient(scale);
  return {g[0], g[1], g[2]};
}

double predict_pvusa(const PvusaCoefficients& c, double irradiance, double temperature) {
  const double p = c.gamma1 * irradiance + c.gamma2 * irradiance * irradiance + c.gamma3 * irradiance * temperature;
  return std::max(p, 0.0);
}

std::vector<double> predict_pvusa(const PvusaCoefficients& c, const WeatherScenario& scenario) {
  scenario.validate();
  std::vector<double> out(scenario.irradiance.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = predict_pvusa(c, scenario.irradiance[k], scenario.temperature[k]);
  }
  return out;
}

}  // namespace peakshaver
