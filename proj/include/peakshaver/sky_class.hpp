#pragma once

#include <span>
#include <string_view>

namespace peakshaver {

enum class SkyClass { Clear, Cloudy };

std::string_view to_string(SkyClass c);

inline constexpr double kDefaultClearThreshold = 0.8;

/// Daily clear-sky index test. Daylight hours are those with clearsky > 0;
/// the day is Clear iff mean(irradiance) / mean(clearsky) over daylight >= threshold.
/// Throws ClassificationError when the clear-sky curve is zero all day.
SkyClass classify_day(std::span<const double> irradiance, std::span<const double> clearsky,
                      double threshold = kDefaultClearThreshold);

}  // namespace peakshaver
