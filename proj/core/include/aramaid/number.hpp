#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace aramaid
{

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

/// Fixed-point text with the given number of decimals.
std::string format_fixed(double value, int decimals);

/// Strict decimal parse: the whole text must be consumed; no percent signs,
/// no hex, no inf/nan.
std::optional<double> parse_number(std::string_view text);

}  // namespace aramaid
