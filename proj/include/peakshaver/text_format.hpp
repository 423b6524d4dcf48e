#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace peakshaver {

/// Shortest decimal text that parses back to exactly `value` ("inf"/"-inf" for infinities).
std::string format_double(double value);

/// Strict full-string parse of a finite number or "inf"/"-inf". Returns false on failure.
bool parse_double(std::string_view text, double& out);

std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

}  // namespace peakshaver
