#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "sdooop/errors.hpp"
#include "sdooop/random.hpp"

namespace sdooop {

enum class Label : int { normal = 0, spatial_outlier = 1, contextual_outlier = 2 };

// A cluster that is populated only inside the phase window [on_start, on_end)
// of each period. Points follow an isotropic Gaussian with sigma = radius / 3,
// truncated at radius.
struct ClusterSpec {
    std::vector<double> center;
    double radius = 1.0;
    double base_rate = 1.0;    // points per second while on
    double on_start = 0.0;     // fractions of the period
    double on_end = 1.0;
    double period = 1.0;       // seconds

    bool always_on() const { return on_start <= 0.0 && on_end >= 1.0; }

    bool is_on(double t) const
    {
        double phase = std::fmod(t, period) / period;
        if (phase < 0.0)
            phase += 1.0;
        return phase >= on_start && phase < on_end;
    }
};

struct StreamSpec {
    std::vector<ClusterSpec> clusters;
    double spatial_outlier_rate = 0.0;     // points per second, uniform in the bounding box
    double contextual_outlier_rate = 0.0;  // long-run points per second, off-phase at cluster locations
    double duration = 1.0;                 // seconds
    std::size_t dims = 2;
    std::uint64_t seed = 0;

    void validate() const
    {
        if (!(duration > 0.0) || !std::isfinite(duration))
            throw InvalidParameter("stream duration must be positive");
        if (dims < 1)
            throw InvalidParameter("stream dims must be >= 1");
        if (clusters.empty())
            throw InvalidParameter("stream needs at least one cluster");
        if (!(spatial_outlier_rate >= 0.0) || !(contextual_outlier_rate >= 0.0))
            throw InvalidParameter("outlier rates must be non-negative");
        bool any_off = false;
        for (std::size_t j = 0; j < clusters.size(); ++j) {
            const auto& c = clusters[j];
            const std::string id = "cluster " + std::to_string(j) + ": ";
            if (c.center.size() != dims)
                throw InvalidParameter(id + "center dimension differs from dims");
            if (!(c.radius > 0.0))
                throw InvalidParameter(id + "radius must be positive");
            if (!(c.base_rate > 0.0))
                throw InvalidParameter(id + "base_rate must be positive");
            if (!(c.period > 0.0))
                throw InvalidParameter(id + "period must be positive");
            if (!(c.on_start >= 0.0 && c.on_start < c.on_end && c.on_end <= 1.0))
                throw InvalidParameter(id + "duty window must satisfy 0 <= on_start < on_end <= 1");
            any_off = any_off || !c.always_on();
        }
        if (contextual_outlier_rate > 0.0 && !any_off)
            throw InvalidParameter("contextual outliers need at least one cluster with an off phase");
    }

    // Per-axis box holding every cluster with a margin of four radii.
    std::pair<std::vector<double>, std::vector<double>> bounding_box() const
    {
        std::vector<double> lo(dims, std::numeric_limits<double>::infinity());
        std::vector<double> hi(dims, -std::numeric_limits<double>::infinity());
        for (const auto& c : clusters)
            for (std::size_t d = 0; d < dims; ++d) {
                lo[d] = std::min(lo[d], c.center[d] - 4.0 * c.radius);
                hi[d] = std::max(hi[d], c.center[d] + 4.0 * c.radius);
            }
        return {lo, hi};
    }

    // Contextual arrival rate at cluster j while it is off, so that the
    // long-run total equals contextual_outlier_rate. Clusters share it in
    // proportion to base_rate.
    double contextual_rate_while_off(std::size_t j) const
    {
        const auto& c = clusters[j];
        if (c.always_on() || contextual_outlier_rate <= 0.0)
            return 0.0;
        double total = 0.0;
        for (const auto& o : clusters)
            if (!o.always_on())
                total += o.base_rate;
        const double off_fraction = 1.0 - (c.on_end - c.on_start);
        return contextual_outlier_rate * (c.base_rate / total) / off_fraction;
    }
};

struct LabeledPoint {
    double t = 0.0;
    std::vector<double> v;
    Label label = Label::normal;
};

namespace detail {

inline double euclidean(std::span<const double> a, std::span<const double> b)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

inline double ball_volume(std::size_t dims, double r)
{
    const double half = static_cast<double>(dims) / 2.0;
    return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0) * std::pow(r, static_cast<double>(dims));
}

// Portable standard normal via Box-Muller.
inline double standard_normal(UniformSource& rng)
{
    const double u1 = 1.0 - rng.next();   // (0, 1]
    const double u2 = rng.next();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace detail

// Ground-truth arrival density of a StreamSpec: the expected number of
// points per unit volume and second at (v, t).
class StreamRate {
public:
    explicit StreamRate(StreamSpec spec) : spec_(std::move(spec))
    {
        spec_.validate();
        std::tie(lo_, hi_) = spec_.bounding_box();
        const double sigma_units = 3.0;
        // mass of an isotropic Gaussian inside sigma_units sigmas
        truncated_mass_ = boost::math::gamma_p(static_cast<double>(spec_.dims) / 2.0,
                                               sigma_units * sigma_units / 2.0);
        background_volume_ = allowed_volume();
    }

    double operator()(std::span<const double> v, double t) const
    {
        double rate = 0.0;
        for (std::size_t j = 0; j < spec_.clusters.size(); ++j) {
            const auto& c = spec_.clusters[j];
            const double density = cluster_density(c, v);
            if (density == 0.0)
                continue;
            rate += density * (c.is_on(t) ? c.base_rate : spec_.contextual_rate_while_off(j));
        }
        if (spec_.spatial_outlier_rate > 0.0 && in_background(v))
            rate += spec_.spatial_outlier_rate / background_volume_;
        return rate;
    }

    // Inside the box and outside twice every cluster radius.
    bool in_background(std::span<const double> v) const
    {
        for (std::size_t d = 0; d < spec_.dims; ++d)
            if (v[d] < lo_[d] || v[d] > hi_[d])
                return false;
        for (const auto& c : spec_.clusters)
            if (detail::euclidean(v, c.center) <= 2.0 * c.radius)
                return false;
        return true;
    }

    const StreamSpec& spec() const { return spec_; }
    double background_volume() const { return background_volume_; }

private:
    double cluster_density(const ClusterSpec& c, std::span<const double> v) const
    {
        const double r = detail::euclidean(v, c.center);
        if (r > c.radius)
            return 0.0;
        const double sigma = c.radius / 3.0;
        const double d = static_cast<double>(spec_.dims);
        const double norm = std::pow(2.0 * std::numbers::pi * sigma * sigma, -d / 2.0);
        return norm * std::exp(-0.5 * r * r / (sigma * sigma)) / truncated_mass_;
    }

    double allowed_volume() const
    {
        double box = 1.0;
        for (std::size_t d = 0; d < spec_.dims; ++d)
            box *= hi_[d] - lo_[d];
        bool overlap = false;
        for (std::size_t a = 0; a < spec_.clusters.size() && !overlap; ++a)
            for (std::size_t b = a + 1; b < spec_.clusters.size(); ++b) {
                const auto& ca = spec_.clusters[a];
                const auto& cb = spec_.clusters[b];
                if (detail::euclidean(ca.center, cb.center) < 2.0 * (ca.radius + cb.radius)) {
                    overlap = true;
                    break;
                }
            }
        if (!overlap) {
            // every exclusion ball lies inside the box by construction
            double vol = box;
            for (const auto& c : spec_.clusters)
                vol -= detail::ball_volume(spec_.dims, 2.0 * c.radius);
            return vol;
        }
        // overlapping exclusion balls: deterministic Monte Carlo estimate
        UniformSource rng(0x5eed);
        constexpr int samples = 1 << 18;
        int inside = 0;
        std::vector<double> p(spec_.dims);
        for (int s = 0; s < samples; ++s) {
            for (std::size_t d = 0; d < spec_.dims; ++d)
                p[d] = lo_[d] + (hi_[d] - lo_[d]) * rng.next();
            inside += in_background(p) ? 1 : 0;
        }
        return box * static_cast<double>(inside) / samples;
    }

    StreamSpec spec_;
    std::vector<double> lo_, hi_;
    double truncated_mass_ = 1.0;
    double background_volume_ = 1.0;
};

inline double rate_at(const StreamSpec& spec, std::span<const double> v, double t)
{
    return StreamRate(spec)(v, t);
}

// Pull-based generator merging one Poisson source per cluster (on phases),
// one contextual source per cluster with an off phase, and one background
// source for spatial outliers. Each source has its own RNG stream derived
// from the spec seed, so output is reproducible.
class StreamGenerator {
public:
    explicit StreamGenerator(StreamSpec spec) : spec_(std::move(spec))
    {
        spec_.validate();
        std::tie(lo_, hi_) = spec_.bounding_box();
        std::uint64_t stream_id = 0;
        auto add = [&](Source s) {
            s.rng = UniformSource(mix(spec_.seed, stream_id++));
            if (s.rate > 0.0)
                advance(s);
            else
                s.next_t = std::numeric_limits<double>::infinity();
            sources_.push_back(std::move(s));
        };
        for (std::size_t j = 0; j < spec_.clusters.size(); ++j)
            add(Source{Label::normal, j, spec_.clusters[j].base_rate});
        for (std::size_t j = 0; j < spec_.clusters.size(); ++j)
            add(Source{Label::contextual_outlier, j, spec_.contextual_rate_while_off(j)});
        add(Source{Label::spatial_outlier, 0, spec_.spatial_outlier_rate});
    }

    std::optional<LabeledPoint> next()
    {
        Source* best = nullptr;
        for (auto& s : sources_)
            if (best == nullptr || s.next_t < best->next_t)
                best = &s;
        if (best == nullptr || !(best->next_t < spec_.duration))
            return std::nullopt;

        LabeledPoint p;
        p.t = best->next_t;
        if (emitted_ && p.t <= last_t_)
            p.t = std::nextafter(last_t_, std::numeric_limits<double>::infinity());
        p.label = best->label;
        p.v = best->label == Label::spatial_outlier ? background_point(best->rng)
                                                    : cluster_point(spec_.clusters[best->cluster], best->rng);
        last_t_ = p.t;
        emitted_ = true;
        advance(*best);
        return p;
    }

    const StreamSpec& spec() const { return spec_; }

private:
    struct Source {
        Label label;
        std::size_t cluster;
        double rate;
        double next_t = 0.0;
        UniformSource rng{};
    };

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t id)
    {
        // splitmix64 finalizer
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (id + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    bool gate_open(const Source& s, double t) const
    {
        switch (s.label) {
        case Label::normal: return spec_.clusters[s.cluster].is_on(t);
        case Label::contextual_outlier: return !spec_.clusters[s.cluster].is_on(t);
        case Label::spatial_outlier: return true;
        }
        return false;
    }

    // Thinning with a 0/1 gate: draw at the source rate and keep candidates
    // that fall inside the gate.
    void advance(Source& s)
    {
        double t = s.next_t;
        while (true) {
            t += -std::log(1.0 - s.rng.next()) / s.rate;
            if (t >= spec_.duration || gate_open(s, t))
                break;
        }
        s.next_t = t;
    }

    std::vector<double> cluster_point(const ClusterSpec& c, UniformSource& rng) const
    {
        const double sigma = c.radius / 3.0;
        std::vector<double> offset(spec_.dims);
        while (true) {
            double r2 = 0.0;
            for (auto& o : offset) {
                o = sigma * detail::standard_normal(rng);
                r2 += o * o;
            }
            if (std::sqrt(r2) <= c.radius)
                break;
        }
        for (std::size_t d = 0; d < spec_.dims; ++d)
            offset[d] += c.center[d];
        return offset;
    }

    std::vector<double> background_point(UniformSource& rng) const
    {
        std::vector<double> p(spec_.dims);
        while (true) {
            for (std::size_t d = 0; d < spec_.dims; ++d)
                p[d] = lo_[d] + (hi_[d] - lo_[d]) * rng.next();
            bool clear = true;
            for (const auto& c : spec_.clusters)
                if (detail::euclidean(p, c.center) <= 2.0 * c.radius) {
                    clear = false;
                    break;
                }
            if (clear)
                return p;
        }
    }

    StreamSpec spec_;
    std::vector<double> lo_, hi_;
    std::vector<Source> sources_;
    double last_t_ = 0.0;
    bool emitted_ = false;
};

inline std::vector<LabeledPoint> generate(const StreamSpec& spec)
{
    StreamGenerator gen(spec);
    std::vector<LabeledPoint> out;
    while (auto p = gen.next())
        out.push_back(std::move(*p));
    return out;
}

// Five clusters on a pentagon that switch on and off with periods
// {T0, T0, T0/2, T0/2, T0/4} and staggered half-period duty windows.
// Spatial outliers make up about 0.5% of the stream; contextual outliers
// make up about `contextual_fraction`.
inline StreamSpec poc_preset(double contextual_fraction, std::uint64_t seed, double T0 = 100.0,
                             double duration = 0.0)
{
    if (!(contextual_fraction >= 0.0 && contextual_fraction < 1.0))
        throw InvalidParameter("contextual fraction must lie in [0, 1)");
    StreamSpec spec;
    spec.dims = 2;
    spec.seed = seed;
    spec.duration = duration > 0.0 ? duration : 40.0 * T0;
    const double periods[5] = {T0, T0, T0 / 2, T0 / 2, T0 / 4};
    const double starts[5] = {0.0, 0.5, 0.0, 0.5, 0.25};
    double mean_rate = 0.0;
    for (int j = 0; j < 5; ++j) {
        const double angle = 2.0 * std::numbers::pi * j / 5.0;
        ClusterSpec c;
        c.center = {8.0 * std::cos(angle), 8.0 * std::sin(angle)};
        c.radius = 1.5;
        c.base_rate = 4.0;
        c.on_start = starts[j];
        c.on_end = starts[j] + 0.5;
        c.period = periods[j];
        mean_rate += c.base_rate * (c.on_end - c.on_start);
        spec.clusters.push_back(c);
    }
    spec.spatial_outlier_rate = 0.005 * mean_rate;
    spec.contextual_outlier_rate = contextual_fraction * mean_rate;
    return spec;
}

} // namespace sdooop
