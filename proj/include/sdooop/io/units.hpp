#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

#include "sdooop/errors.hpp"

namespace sdooop::io {

// Parses a duration such as "90", "90s", "2000m", "1.5h", "1d", "1w" into
// seconds. A bare number is seconds.
inline double parse_duration(std::string_view text)
{
    if (text.empty())
        throw InvalidParameter("empty duration");
    double scale = 1.0;
    std::string_view number = text;
    switch (text.back()) {
    case 's': scale = 1.0; break;
    case 'm': scale = 60.0; break;
    case 'h': scale = 3600.0; break;
    case 'd': scale = 86400.0; break;
    case 'w': scale = 604800.0; break;
    default: scale = 0.0; break;
    }
    if (scale != 0.0)
        number.remove_suffix(1);
    else
        scale = 1.0;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
    if (ec != std::errc() || ptr != number.data() + number.size() || number.empty())
        throw InvalidParameter("malformed duration '" + std::string(text) + "' (expected a number with optional s/m/h/d/w suffix)");
    if (!std::isfinite(value) || value < 0.0)
        throw InvalidParameter("duration '" + std::string(text) + "' must be finite and non-negative");
    return value * scale;
}

} // namespace sdooop::io
