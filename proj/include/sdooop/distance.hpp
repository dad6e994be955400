#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "sdooop/errors.hpp"

namespace sdooop {

enum class Distance { euclidean, manhattan, chebyshev };

inline double distance(Distance metric, std::span<const double> a, std::span<const double> b)
{
    double acc = 0.0;
    switch (metric) {
    case Distance::euclidean:
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            acc += d * d;
        }
        return std::sqrt(acc);
    case Distance::manhattan:
        for (std::size_t i = 0; i < a.size(); ++i)
            acc += std::abs(a[i] - b[i]);
        return acc;
    case Distance::chebyshev:
        for (std::size_t i = 0; i < a.size(); ++i)
            acc = std::max(acc, std::abs(a[i] - b[i]));
        return acc;
    }
    return acc;
}

inline std::string_view to_string(Distance metric)
{
    switch (metric) {
    case Distance::euclidean: return "euclidean";
    case Distance::manhattan: return "manhattan";
    case Distance::chebyshev: return "chebyshev";
    }
    return "euclidean";
}

inline Distance parse_distance(std::string_view name)
{
    if (name == "euclidean") return Distance::euclidean;
    if (name == "manhattan") return Distance::manhattan;
    if (name == "chebyshev") return Distance::chebyshev;
    throw InvalidParameter("unknown distance '" + std::string(name) + "'");
}

// Median of a non-empty range; even lengths average the two middle values.
// Reorders the input.
inline double median_inplace(std::span<double> values)
{
    const std::size_t n = values.size();
    const std::size_t mid = n / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    const double upper = values[mid];
    if (n % 2 == 1)
        return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + mid);
    return 0.5 * (lower + upper);
}

} // namespace sdooop
