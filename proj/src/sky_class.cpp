#include "peakshaver/sky_class.hpp"

#include <cmath>

#include "peakshaver/errors.hpp"

namespace peakshaver {

std::string_view to_string(SkyClass c) { return c == SkyClass::Clear ? "clear" : "cloudy"; }

SkyClass classify_day(std::span<const double> irradiance, std::span<const double> clearsky, double threshold) {
  if (irradiance.size() != clearsky.size()) throw DomainError("classify_day: length mismatch");
  if (!std::isfinite(threshold) || threshold < 0.0) throw DomainError("classify_day: bad threshold");
  double observed = 0.0;
  double reference = 0.0;
  for (std::size_t h = 0; h < clearsky.size(); ++h) {
    if (!(clearsky[h] > 0.0)) continue;
    observed += irradiance[h];
    reference += clearsky[h];
  }
  if (reference <= 0.0) throw ClassificationError("classify_day: clear-sky curve has no daylight hours");
  // The daylight-hour counts cancel, so the ratio of sums equals the ratio of means.
  return observed / reference >= threshold ? SkyClass::Clear : SkyClass::Cloudy;
}

}  // namespace peakshaver
