#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "sdooop/params.hpp"

namespace sdooop {

// A representative point plus the complex Fourier coefficients of the
// observations made in its neighborhood. coeffs[n] tracks periodicity T0/n.
struct Observer {
    std::vector<double> position;
    std::vector<std::complex<double>> coeffs;
    double h = 1.0;            // largest coeffs[0] reachable since insertion
    double inserted_at = 0.0;

    bool operator==(const Observer&) const = default;

    // Time-averaged observation mass, always real.
    double p0() const { return coeffs.front().real(); }

    // Age-normalized observation mass in (0, 1]; 1 means the observer has
    // been a nearest observer for every point since insertion.
    double normalized_mass() const { return p0() / h; }

    // Inverse transform evaluated at the current stream time.
    double activity() const
    {
        double acc = 0.0;
        for (const auto& c : coeffs)
            acc += c.real();
        return acc;
    }
};

// Reconstructed observation intensity at t_offset seconds relative to the
// current stream time. t_offset = 0 reproduces Observer::activity().
inline double temporal_shape(const Observer& obs, double t_offset, double T0)
{
    if (t_offset == 0.0)
        return obs.activity();
    const double base = t_offset * 2.0 * std::numbers::pi / T0;
    double acc = 0.0;
    for (std::size_t n = 0; n < obs.coeffs.size(); ++n) {
        const double angle = base * static_cast<double>(n);
        acc += obs.coeffs[n].real() * std::cos(angle) - obs.coeffs[n].imag() * std::sin(angle);
    }
    return acc;
}

inline double temporal_shape(const Observer& obs, double t_offset, const ModelParams& params)
{
    return temporal_shape(obs, t_offset, params.T0);
}

// |coeffs[n]| for every bin; bin n corresponds to period T0/n.
inline std::vector<double> spectrum_magnitude(const Observer& obs)
{
    std::vector<double> out;
    out.reserve(obs.coeffs.size());
    for (const auto& c : obs.coeffs)
        out.push_back(std::abs(c));
    return out;
}

} // namespace sdooop
