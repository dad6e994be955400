#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "oracle/naive_sdooop.hpp"
#include "sdooop/model.hpp"

namespace testing_support {

using Coeffs = std::vector<std::complex<double>>;

// Observer at `position` with the given coefficients; h defaults to coeffs[0].
inline sdooop::Observer make_observer(std::vector<double> position, Coeffs coeffs, double h = -1.0)
{
    sdooop::Observer o;
    o.position = std::move(position);
    o.h = h > 0.0 ? h : std::max(1.0, coeffs.front().real());
    o.coeffs = std::move(coeffs);
    return o;
}

// Restores a model holding exactly these observers.
inline sdooop::Model make_model(sdooop::ModelParams params, std::vector<sdooop::Observer> observers)
{
    sdooop::ModelSnapshot s;
    s.params = params;
    s.dims = observers.empty() ? 0 : observers.front().position.size();
    s.observers = std::move(observers);
    s.points_seen = s.observers.empty() ? 0 : 1;
    return sdooop::Model::restore(s);
}

// Random but valid parameters for small property runs.
inline sdooop::ModelParams random_params(std::mt19937_64& rng, std::size_t max_k = 20, std::size_t max_bins = 8)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    sdooop::ModelParams p;
    p.k = 1 + rng() % max_k;
    p.x = 1 + rng() % 6;
    p.T0 = 1.0 + 9.0 * u(rng);
    p.T = p.T0 * (1.0 + 20.0 * u(rng));
    p.n_bins = 1 + rng() % max_bins;
    p.q_id = (rng() % 6) * 0.1;
    p.seed = rng();
    p.distance = static_cast<sdooop::Distance>(rng() % 3);
    return p;
}

inline oracle::NaiveParams to_naive(const sdooop::ModelParams& p)
{
    return oracle::NaiveParams{p.k, p.x, p.T, p.T0, p.n_bins, p.q_id, p.seed, static_cast<int>(p.distance)};
}

} // namespace testing_support
