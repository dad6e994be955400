#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sdooop/stream_gen.hpp"

using namespace sdooop;

namespace {

ClusterSpec cluster(std::vector<double> center, double on_start, double on_end, double period, double rate = 5.0)
{
    ClusterSpec c;
    c.center = std::move(center);
    c.radius = 1.0;
    c.base_rate = rate;
    c.on_start = on_start;
    c.on_end = on_end;
    c.period = period;
    return c;
}

StreamSpec two_cluster_spec()
{
    StreamSpec s;
    s.dims = 2;
    s.duration = 2000.0;
    s.seed = 17;
    s.clusters = {cluster({0.0, 0.0}, 0.0, 0.5, 100.0), cluster({10.0, 0.0}, 0.25, 0.6, 50.0, 3.0),
                  cluster({0.0, 10.0}, 0.0, 1.0, 100.0, 2.0)};
    s.spatial_outlier_rate = 0.2;
    s.contextual_outlier_rate = 0.3;
    return s;
}

double euclid(const std::vector<double>& a, const std::vector<double>& b)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc);
}

// Seconds within [0, duration) during which the cluster is on, summed window
// by window.
double on_time(const ClusterSpec& c, double duration)
{
    double total = 0.0;
    for (double start = 0.0; start < duration; start += c.period) {
        const double a = start + c.on_start * c.period;
        const double b = std::min(start + c.on_end * c.period, duration);
        total += std::max(0.0, b - a);
    }
    return total;
}

} // namespace

TEST(Generate, AlwaysOnClusterStaysInsideRadius)
{
    StreamSpec s;
    s.dims = 3;
    s.duration = 200.0;
    s.seed = 2;
    s.clusters = {cluster({1.0, 2.0, 3.0}, 0.0, 1.0, 10.0)};
    const auto pts = generate(s);
    ASSERT_GT(pts.size(), 500u);
    for (const auto& p : pts) {
        EXPECT_EQ(p.label, Label::normal);
        EXPECT_LE(euclid(p.v, s.clusters[0].center), s.clusters[0].radius);
    }
}

TEST(Generate, LabelSoundness)
{
    const auto s = two_cluster_spec();
    const auto pts = generate(s);
    std::size_t contextual = 0, spatial = 0;
    for (const auto& p : pts) {
        if (p.label == Label::contextual_outlier) {
            ++contextual;
            bool explained = false;
            for (const auto& c : s.clusters)
                explained = explained || (euclid(p.v, c.center) <= c.radius && !c.is_on(p.t));
            EXPECT_TRUE(explained) << "t=" << p.t;
        } else if (p.label == Label::spatial_outlier) {
            ++spatial;
            for (const auto& c : s.clusters)
                EXPECT_GT(euclid(p.v, c.center), 2.0 * c.radius);
        } else {
            bool inside_on = false;
            for (const auto& c : s.clusters)
                inside_on = inside_on || (euclid(p.v, c.center) <= c.radius && c.is_on(p.t));
            EXPECT_TRUE(inside_on);
        }
    }
    EXPECT_GT(contextual, 0u);
    EXPECT_GT(spatial, 0u);
}

TEST(Generate, TimestampsStrictlyIncreasing)
{
    const auto pts = generate(two_cluster_spec());
    for (std::size_t i = 1; i < pts.size(); ++i)
        ASSERT_LT(pts[i - 1].t, pts[i].t);
    EXPECT_LT(pts.back().t, two_cluster_spec().duration);
}

TEST(Generate, Reproducible)
{
    const auto a = generate(two_cluster_spec());
    const auto b = generate(two_cluster_spec());
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ASSERT_EQ(a[i].t, b[i].t);
        ASSERT_EQ(a[i].v, b[i].v);
        ASSERT_EQ(a[i].label, b[i].label);
    }
    auto other = two_cluster_spec();
    other.seed = 18;
    EXPECT_NE(generate(other).front().t, a.front().t);
}

TEST(Generate, CountsMatchPoissonMeans)
{
    const auto s = two_cluster_spec();
    const auto pts = generate(s);
    // source counts attributed by location
    std::vector<double> normal(s.clusters.size(), 0.0), ctx(s.clusters.size(), 0.0);
    double spatial = 0.0;
    for (const auto& p : pts) {
        if (p.label == Label::spatial_outlier) {
            spatial += 1.0;
            continue;
        }
        for (std::size_t j = 0; j < s.clusters.size(); ++j)
            if (euclid(p.v, s.clusters[j].center) <= s.clusters[j].radius)
                (p.label == Label::normal ? normal : ctx)[j] += 1.0;
    }
    auto within_3_sigma = [](double observed, double mean) { return std::abs(observed - mean) <= 3.0 * std::sqrt(mean); };

    double off_weight = 0.0;
    for (const auto& c : s.clusters)
        if (!c.always_on())
            off_weight += c.base_rate;
    for (std::size_t j = 0; j < s.clusters.size(); ++j) {
        const auto& c = s.clusters[j];
        const double on = on_time(c, s.duration);
        EXPECT_TRUE(within_3_sigma(normal[j], c.base_rate * on)) << "cluster " << j << ": " << normal[j] << " vs "
                                                                 << c.base_rate * on;
        if (c.always_on()) {
            EXPECT_EQ(ctx[j], 0.0);
            continue;
        }
        const double off_rate = s.contextual_outlier_rate * (c.base_rate / off_weight) / (1.0 - (c.on_end - c.on_start));
        const double mean = off_rate * (s.duration - on);
        EXPECT_TRUE(within_3_sigma(ctx[j], mean)) << "contextual " << j << ": " << ctx[j] << " vs " << mean;
    }
    EXPECT_TRUE(within_3_sigma(spatial, s.spatial_outlier_rate * s.duration));
}

TEST(Generate, InvalidSpecs)
{
    auto s = two_cluster_spec();
    s.clusters.clear();
    EXPECT_THROW(generate(s), InvalidParameter);
    s = two_cluster_spec();
    s.duration = 0.0;
    EXPECT_THROW(generate(s), InvalidParameter);
    s = two_cluster_spec();
    s.clusters[0].on_start = 0.6;
    EXPECT_THROW(generate(s), InvalidParameter);
    s = two_cluster_spec();
    s.clusters[1].center = {1.0};
    EXPECT_THROW(generate(s), InvalidParameter);
    s = two_cluster_spec();
    s.clusters = {cluster({0.0, 0.0}, 0.0, 1.0, 10.0)};
    EXPECT_THROW(generate(s), InvalidParameter);   // contextual outliers but nothing ever switches off
}

TEST(PocPreset, ContextualFraction)
{
    for (double f : {0.0, 0.005, 0.02}) {
        const auto pts = generate(poc_preset(f, 1));
        double ctx = 0.0;
        for (const auto& p : pts)
            ctx += p.label == Label::contextual_outlier ? 1.0 : 0.0;
        const double n = static_cast<double>(pts.size());
        if (f == 0.0)
            EXPECT_EQ(ctx, 0.0);
        else
            EXPECT_NEAR(ctx / n, f, 4.0 * std::sqrt(f / n) + 0.1 * f);
    }
}

TEST(RateAt, ZeroOutsideSupport)
{
    StreamSpec s = two_cluster_spec();
    s.spatial_outlier_rate = 0.0;
    s.contextual_outlier_rate = 0.0;
    EXPECT_EQ(rate_at(s, std::vector<double>{5.0, 5.0}, 10.0), 0.0);
}

TEST(RateAt, OffPhaseHasNoClusterContribution)
{
    StreamSpec s;
    s.dims = 2;
    s.duration = 100.0;
    s.clusters = {cluster({0.0, 0.0}, 0.0, 0.5, 100.0)};
    const std::vector<double> center{0.0, 0.0};
    EXPECT_EQ(rate_at(s, center, 75.0), 0.0);
    EXPECT_GT(rate_at(s, center, 25.0), 0.0);
}

TEST(RateAt, PeriodicWhenPeriodsShareBase)
{
    const auto s = two_cluster_spec();   // periods 100, 50, 100
    const StreamRate rate(s);
    const double T0 = 100.0;
    for (double t = 0.0; t < 300.0; t += 3.7)
        for (const std::vector<double>& v :
             {std::vector<double>{0.2, -0.3}, std::vector<double>{10.5, 0.1}, std::vector<double>{-4.0, 6.0}})
            ASSERT_NEAR(rate(v, t), rate(v, t + T0), 1e-12 * std::max(1.0, rate(v, t)));
}

TEST(RateAt, ClusterDensityIntegratesToBaseRate)
{
    StreamSpec s;
    s.dims = 2;
    s.duration = 100.0;
    s.clusters = {cluster({0.0, 0.0}, 0.0, 1.0, 100.0, 5.0)};
    const StreamRate rate(s);
    // midpoint rule over the support
    const int steps = 400;
    const double h = 2.0 / steps;
    double total = 0.0;
    for (int i = 0; i < steps; ++i)
        for (int j = 0; j < steps; ++j)
            total += rate(std::vector<double>{-1.0 + (i + 0.5) * h, -1.0 + (j + 0.5) * h}, 1.0) * h * h;
    EXPECT_NEAR(total, 5.0, 0.02);
}
