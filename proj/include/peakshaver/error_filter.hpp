#pragma once

#include <span>
#include <vector>

namespace peakshaver {

/// First-order forecast correction. Errors use the forecast-minus-realized sign.
struct FilterState {
  double alpha = 0.5;
  double last_error = 0.0;

  /// Records e = forecast - realized for the step that just ended.
  void observe(double forecast, double realized) { last_error = forecast - realized; }
};

/// f*_{n+i} = f_{n+i} - alpha^(i+1) e_{n-1}. Throws DomainError on empty input or alpha outside [0, 1].
std::vector<double> apply_error_filter(std::span<const double> forecast, const FilterState& state);

}  // namespace peakshaver
