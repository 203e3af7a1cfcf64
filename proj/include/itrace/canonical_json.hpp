#pragma once

#include <string>

#include <json.hpp>

namespace itrace {

/// Serializes with sorted keys, no insignificant whitespace, and every
/// floating-point number printed with exactly six fractional digits.
/// Integers print as integers. Output ends with a newline.
std::string canonical_json(const nlohmann::json& value);

/// The six-decimal rendering used for floats ("-0.000000" becomes "0.000000").
std::string format_fixed6(double value);

}  // namespace itrace
