#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sdooop/distance.hpp"
#include "sdooop/errors.hpp"

namespace sdooop {

struct ModelParams {
    std::size_t k = 256;       // observers
    std::size_t x = 5;         // nearest observers per point
    double T = 1000.0;         // EWMA time constant, seconds
    double T0 = 100.0;         // Fourier base period, seconds
    std::size_t n_bins = 10;   // frequency bins, bin n has period T0/n
    double q_id = 0.2;         // idle fraction
    std::uint64_t seed = 0;
    Distance distance = Distance::euclidean;

    bool operator==(const ModelParams&) const = default;

    // Throws InvalidParameter naming the first violated constraint.
    void validate() const
    {
        if (k < 1)
            throw InvalidParameter("k must be >= 1");
        if (x < 1)
            throw InvalidParameter("x must be >= 1");
        if (n_bins < 1)
            throw InvalidParameter("n_bins must be >= 1");
        if (!(q_id >= 0.0 && q_id <= 1.0))
            throw InvalidParameter("q_id must lie in [0, 1], got " + std::to_string(q_id));
        if (!(T > 0.0) || !std::isfinite(T))
            throw InvalidParameter("T must be a positive finite number of seconds");
        if (!(T0 > 0.0) || !std::isfinite(T0))
            throw InvalidParameter("T0 must be a positive finite number of seconds");
    }

    // Soft recommendations; the model runs either way.
    std::vector<std::string> warnings() const
    {
        std::vector<std::string> out;
        if (!(T0 < T))
            out.emplace_back("T0 should be reasonably smaller than T for the EWMA to approximate a Fourier integral");
        if (x > k)
            out.emplace_back("x exceeds k; every observer will be in every nearest set");
        return out;
    }
};

} // namespace sdooop
