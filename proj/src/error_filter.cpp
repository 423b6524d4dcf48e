#include "peakshaver/error_filter.hpp"

#include <cmath>

#include "peakshaver/errors.hpp"

namespace peakshaver {

std::vector<double> apply_error_filter(std::span<const double> forecast, const FilterState& state) {
  if (forecast.empty()) throw DomainError("apply_error_filter: empty forecast");
  if (!(state.alpha >= 0.0 && state.alpha <= 1.0)) throw DomainError("apply_error_filter: alpha must lie in [0, 1]");
  std::vector<double> out(forecast.begin(), forecast.end());
  if (state.alpha == 0.0 || state.last_error == 0.0) return out;
  double decay = state.alpha;
  for (double& f : out) {
    f -= decay * state.last_error;
    decay *= state.alpha;
  }
  return out;
}

}  // namespace peakshaver
