#include "aramaid/number.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace aramaid
{

std::string format_number(double value)
{
    std::array<char, 400> buf{};
    // Plain notation across the magnitudes a model file normally holds.
    const double mag = std::abs(value);
    const bool plain = mag == 0.0 || (mag >= 1e-6 && mag < 1e16);
    auto [end, ec] = plain ? std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed)
                           : std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), end);
}

std::string format_fixed(double value, int decimals)
{
    std::array<char, 128> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, decimals);
    return std::string(buf.data(), end);
}

std::optional<double> parse_number(std::string_view text)
{
    if (text.empty())
        return std::nullopt;
    for (char c : text)
        if (!((c >= '0' && c <= '9') || c == '.' || c == '-' || c == '+' || c == 'e' || c == 'E'))
            return std::nullopt;
    // from_chars rejects a leading '+'.
    if (text.front() == '+')
    {
        text.remove_prefix(1);
        if (text.empty() || text.front() == '-')
            return std::nullopt;
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
        return std::nullopt;
    return value;
}

}  // namespace aramaid
