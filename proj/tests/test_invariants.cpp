#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "oracle/naive_sdooop.hpp"
#include "sdooop/io/snapshot.hpp"
#include "sdooop/model.hpp"
#include "support.hpp"

using namespace sdooop;
using C = std::complex<double>;

namespace {

constexpr int cases = 1000;

struct Case {
    ModelParams params;
    oracle::RandomStream stream;
};

Case random_case(std::mt19937_64& rng, std::size_t points = 60)
{
    Case c;
    c.params = testing_support::random_params(rng);
    c.stream = oracle::random_stream(rng(), points, 1 + rng() % 4);
    return c;
}

} // namespace

TEST(Invariants, DcRealnessAndRatioBound)
{
    std::mt19937_64 rng(1);
    for (int n = 0; n < cases; ++n) {
        auto c = random_case(rng);
        Model m(c.params);
        for (std::size_t i = 0; i < c.stream.t.size(); ++i) {
            m.process(c.stream.v[i], c.stream.t[i]);
            ASSERT_LE(m.size(), c.params.k);
            for (const auto& o : m.observers()) {
                ASSERT_EQ(o.coeffs[0].imag(), 0.0);
                ASSERT_GT(o.normalized_mass(), 0.0);
                ASSERT_LE(o.normalized_mass(), 1.0);
                for (const auto& coeff : o.coeffs)
                    ASSERT_LE(std::abs(coeff), o.p0() * (1.0 + 1e-12));
            }
        }
    }
}

TEST(Invariants, FadingComposes)
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int n = 0; n < cases; ++n) {
        ModelParams p = testing_support::random_params(rng);
        std::vector<C> coeffs(p.n_bins);
        coeffs[0] = C(1.0 + std::abs(u(rng)), 0.0);
        for (std::size_t b = 1; b < p.n_bins; ++b)
            coeffs[b] = C(u(rng), u(rng));
        const auto obs = testing_support::make_observer({0.0}, coeffs, 10.0);
        auto split = testing_support::make_model(p, {obs});
        auto whole = testing_support::make_model(p, {obs});
        const double dt1 = std::abs(u(rng)) * p.T0, dt2 = std::abs(u(rng)) * p.T0;
        split.fade(dt1);
        split.fade(dt2);
        whole.fade(dt1 + dt2);
        for (std::size_t b = 0; b < p.n_bins; ++b) {
            const C a = split.observers()[0].coeffs[b], w = whole.observers()[0].coeffs[b];
            ASSERT_LE(std::abs(a - w), 1e-9 * std::max(1.0, std::abs(w))) << "bin " << b;
        }
    }
}

TEST(Invariants, ActivityEqualsShapeAtZero)
{
    std::mt19937_64 rng(3);
    for (int n = 0; n < cases; ++n) {
        auto c = random_case(rng, 30);
        Model m(c.params);
        for (std::size_t i = 0; i < c.stream.t.size(); ++i)
            m.process(c.stream.v[i], c.stream.t[i]);
        for (const auto& o : m.observers())
            ASSERT_EQ(o.activity(), temporal_shape(o, 0.0, c.params));
    }
}

TEST(Invariants, SnapshotRoundTripIsBehavioralIdentity)
{
    std::mt19937_64 rng(4);
    for (int n = 0; n < cases; ++n) {
        auto c = random_case(rng);
        const std::size_t cut = rng() % c.stream.t.size();
        Model a(c.params);
        for (std::size_t i = 0; i < cut; ++i)
            a.process(c.stream.v[i], c.stream.t[i]);
        Model b = Model::restore(io::parse_snapshot(io::dump_snapshot(a.snapshot())));
        for (std::size_t i = cut; i < c.stream.t.size(); ++i)
            ASSERT_EQ(a.process(c.stream.v[i], c.stream.t[i]), b.process(c.stream.v[i], c.stream.t[i]));
    }
}

TEST(Invariants, Determinism)
{
    std::mt19937_64 rng(5);
    for (int n = 0; n < cases; ++n) {
        auto c = random_case(rng);
        Model a(c.params), b(c.params);
        for (std::size_t i = 0; i < c.stream.t.size(); ++i)
            ASSERT_EQ(a.process(c.stream.v[i], c.stream.t[i]), b.process(c.stream.v[i], c.stream.t[i]));
    }
}

// Scaling time and both time constants by a power of two is exact in binary
// floating point, so the record sequences must match bit for bit.
TEST(Invariants, TimeUnitInvariance)
{
    std::mt19937_64 rng(6);
    for (int n = 0; n < 200; ++n) {
        auto c = random_case(rng);
        const double scale = std::ldexp(1.0, static_cast<int>(rng() % 9) - 4);
        ModelParams scaled = c.params;
        scaled.T *= scale;
        scaled.T0 *= scale;
        Model a(c.params), b(scaled);
        for (std::size_t i = 0; i < c.stream.t.size(); ++i) {
            auto ra = a.process(c.stream.v[i], c.stream.t[i]);
            auto rb = b.process(c.stream.v[i], c.stream.t[i] * scale);
            rb.t /= scale;
            ASSERT_EQ(ra, rb) << "case " << n << " point " << i << " scale " << scale;
        }
    }
}
