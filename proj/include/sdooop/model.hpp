#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdooop/distance.hpp"
#include "sdooop/errors.hpp"
#include "sdooop/observer.hpp"
#include "sdooop/params.hpp"
#include "sdooop/random.hpp"

namespace sdooop {

struct ScoreRecord {
    double t = 0.0;
    double score = 0.0;        // median distance to the nearest active observers
    bool warmup = false;       // no observer existed at scoring time
    std::size_t n_active = 0;
    bool sampled = false;      // the point became an observer

    bool operator==(const ScoreRecord&) const = default;
};

// Complete mutable state of a model, in plain form. Used for persistence
// and for building models in a known state.
struct ModelSnapshot {
    ModelParams params;
    std::vector<Observer> observers;   // insertion order, oldest first
    std::uint64_t i_lao = 0;
    double t_lao = 0.0;
    std::uint64_t points_seen = 0;
    double t_last = 0.0;
    std::size_t dims = 0;              // 0 until the first point
    std::string rng_state;             // UniformSource::state_hex()

    bool operator==(const ModelSnapshot&) const = default;
};

enum class Pool { all, active };

// Eviction ratios closer than this are treated as equal.
inline constexpr double eviction_tie_tolerance = 1e-12;

// Streaming outlier detector whose observers carry Fourier coefficients of
// their observation history, so that the set of observers used for scoring
// follows the periodic structure of the stream.
//
// Single writer: process() and the mutating steps must be serialized by the
// caller. Const members may run concurrently with each other.
class Model {
public:
    explicit Model(ModelParams params) : params_(std::move(params)), rng_(params_.seed)
    {
        params_.validate();
    }

    static Model restore(const ModelSnapshot& snap)
    {
        snap.params.validate();
        if (snap.observers.size() > snap.params.k)
            throw SnapshotError("snapshot holds " + std::to_string(snap.observers.size()) +
                                " observers but k = " + std::to_string(snap.params.k));
        if (snap.i_lao > snap.points_seen)
            throw SnapshotError("snapshot i_lao exceeds points_seen");
        if (snap.points_seen > 0 && snap.observers.empty())
            throw SnapshotError("snapshot has processed points but no observers");
        for (const auto& obs : snap.observers) {
            if (obs.coeffs.size() != snap.params.n_bins)
                throw SnapshotError("observer has " + std::to_string(obs.coeffs.size()) +
                                    " coefficients, expected n_bins = " + std::to_string(snap.params.n_bins));
            if (obs.position.size() != snap.dims)
                throw SnapshotError("observer dimension does not match snapshot dims");
            if (obs.coeffs.front().imag() != 0.0)
                throw SnapshotError("observer DC coefficient has a non-zero imaginary part");
            if (!(obs.h > 0.0))
                throw SnapshotError("observer h must be positive");
        }
        Model m(snap.params);
        m.observers_ = snap.observers;
        m.i_lao_ = snap.i_lao;
        m.t_lao_ = snap.t_lao;
        m.points_seen_ = snap.points_seen;
        m.t_last_ = snap.t_last;
        m.dims_ = snap.dims;
        if (!snap.rng_state.empty())
            m.rng_ = UniformSource::from_state_hex(snap.rng_state);
        return m;
    }

    ModelSnapshot snapshot() const
    {
        return ModelSnapshot{params_, observers_, i_lao_, t_lao_, points_seen_, t_last_, dims_, rng_.state_hex()};
    }

    const ModelParams& params() const { return params_; }
    std::span<const Observer> observers() const { return observers_; }
    std::size_t size() const { return observers_.size(); }
    bool empty() const { return observers_.empty(); }
    std::size_t dims() const { return dims_; }
    std::uint64_t points_seen() const { return points_seen_; }
    std::uint64_t i_lao() const { return i_lao_; }
    double t_lao() const { return t_lao_; }
    double t_last() const { return t_last_; }

    // q_id-percentile of the observers' time-averaged observations: the
    // largest rho such that at most q_id * |observers| values lie below it.
    double threshold() const
    {
        require_observers();
        std::vector<double> p0;
        p0.reserve(observers_.size());
        for (const auto& o : observers_)
            p0.push_back(o.p0());
        return threshold_of(p0, params_.q_id);
    }

    // Observers whose current inverse-transform value clears the threshold.
    // Never empty: falls back to the observer with the largest activity.
    std::vector<std::size_t> active_observers() const
    {
        require_observers();
        std::vector<double> activity;
        activity.reserve(observers_.size());
        for (const auto& o : observers_)
            activity.push_back(o.activity());
        std::vector<std::size_t> out;
        collect_active(activity, threshold(), out);
        return out;
    }

    // The min(x, |pool|) observers closest to v, ascending by distance,
    // older observer first on ties.
    std::vector<std::size_t> nearest_observers(std::span<const double> v, Pool pool) const
    {
        require_observers();
        check_dims(v);
        std::vector<double> dist;
        distances_to(v, dist);
        std::vector<std::size_t> candidates;
        if (pool == Pool::active) {
            candidates = active_observers();
        } else {
            candidates.resize(observers_.size());
            for (std::size_t i = 0; i < candidates.size(); ++i)
                candidates[i] = i;
        }
        select_nearest(dist, candidates, params_.x);
        return candidates;
    }

    // Median distance from v to its nearest active observers; 0 on an empty
    // model.
    double outlier_score(std::span<const double> v) const
    {
        if (observers_.empty())
            return 0.0;
        check_dims(v);
        std::vector<double> dist;
        distances_to(v, dist);
        auto nearest = active_observers();
        select_nearest(dist, nearest, params_.x);
        std::vector<double> picked;
        for (auto idx : nearest)
            picked.push_back(dist[idx]);
        return median_inplace(picked);
    }

    // Decays every coefficient by exp(-dt/T) and rotates bin n by
    // 2*pi*n*dt/T0. The rotation is evaluated from dt directly so phase error
    // does not accumulate over the stream. h decays by the same factor and
    // gains 1 for every observer.
    void fade(double dt)
    {
        if (!(dt >= 0.0))
            throw OutOfOrderTimestamp("negative time step " + std::to_string(dt));
        if (observers_.empty())
            return;
        const double decay = std::exp(-dt / params_.T);
        rotation_.resize(params_.n_bins);
        const double omega = 2.0 * std::numbers::pi * dt / params_.T0;
        for (std::size_t n = 1; n < params_.n_bins; ++n)
            rotation_[n] = std::polar(decay, omega * static_cast<double>(n));
        for (auto& obs : observers_) {
            obs.h = obs.h * decay + 1.0;
            obs.coeffs[0] = {obs.coeffs[0].real() * decay, 0.0};
            // written out: std::complex's operator*= goes through the
            // NaN-recovering library call, which dominates the per-point cost
            for (std::size_t n = 1; n < params_.n_bins; ++n) {
                const double a = obs.coeffs[n].real(), b = obs.coeffs[n].imag();
                const double c = rotation_[n].real(), d = rotation_[n].imag();
                obs.coeffs[n] = {a * c - b * d, a * d + b * c};
            }
        }
    }

    void register_observations(std::span<const std::size_t> nearest)
    {
        for (auto idx : nearest) {
            auto& obs = observers_.at(idx);
            obs.coeffs[0] = {obs.coeffs[0].real() + 1.0, 0.0};
            for (std::size_t n = 1; n < obs.coeffs.size(); ++n)
                obs.coeffs[n] += 1.0;
        }
    }

    // Probability of sampling a point arriving at time t whose nearest set
    // (over all observers) is `nearest`. Expects the coefficients to be
    // already faded and registered for this point.
    double sampling_probability(double t, std::span<const std::size_t> nearest) const
    {
        if (observers_.empty())
            return 1.0;
        double sum_nearest = 0.0;
        for (auto idx : nearest)
            sum_nearest += observers_.at(idx).p0();
        double sum_all = 0.0;
        for (const auto& o : observers_)
            sum_all += o.p0();
        const double k = static_cast<double>(params_.k);
        const double steps = static_cast<double>(std::max<std::uint64_t>(1, points_seen_ - i_lao_));
        const double p = k * k / (params_.T * static_cast<double>(params_.x)) * (sum_nearest / sum_all) *
                         ((t - t_lao_) / steps);
        return std::clamp(p, 0.0, 1.0);
    }

    // Adds v as a fresh observer, evicting the one with the smallest
    // age-normalized mass (oldest on ties) when the model is full.
    void insert_observer(std::span<const double> v, double t)
    {
        if (dims_ == 0)
            dims_ = v.size();
        check_dims(v);
        if (observers_.size() >= params_.k) {
            // Ratios within rounding of each other are ties; the oldest goes.
            std::size_t victim = 0;
            double lowest = observers_[0].normalized_mass();
            for (std::size_t i = 1; i < observers_.size(); ++i) {
                const double r = observers_[i].normalized_mass();
                if (r < lowest - eviction_tie_tolerance) {
                    lowest = r;
                    victim = i;
                }
            }
            observers_.erase(observers_.begin() + static_cast<std::ptrdiff_t>(victim));
        }
        Observer obs;
        obs.position.assign(v.begin(), v.end());
        obs.coeffs.assign(params_.n_bins, {1.0, 0.0});
        obs.h = 1.0;
        obs.inserted_at = t;
        observers_.push_back(std::move(obs));
        i_lao_ = points_seen_;
        t_lao_ = t;
    }

    // Throws if (v, t) cannot be processed next. Does not mutate.
    void check_point(std::span<const double> v, double t) const
    {
        if (!std::isfinite(t))
            throw DataError("non-finite timestamp");
        if (points_seen_ > 0 && t < t_last_)
            throw OutOfOrderTimestamp("timestamp " + std::to_string(t) + " precedes previous timestamp " +
                                      std::to_string(t_last_));
        if (v.empty())
            throw DimensionMismatch("empty feature vector");
        if (dims_ != 0)
            check_dims(v);
        for (double f : v)
            if (!std::isfinite(f))
                throw DataError("non-finite feature value");
    }

    // Scores the point, then updates the model with it.
    ScoreRecord process(std::span<const double> v, double t)
    {
        check_point(v, t);
        ScoreRecord rec;
        rec.t = t;

        if (observers_.empty()) {
            rec.warmup = true;
            insert_observer(v, t);
            rec.sampled = true;
        } else {
            distances_to(v, dist_);
            activity_.clear();
            p0_.clear();
            for (const auto& o : observers_) {
                activity_.push_back(o.activity());
                p0_.push_back(o.p0());
            }
            collect_active(activity_, threshold_of(p0_, params_.q_id), active_);
            rec.n_active = active_.size();

            nearest_.resize(observers_.size());
            for (std::size_t i = 0; i < nearest_.size(); ++i)
                nearest_[i] = i;
            select_nearest(dist_, nearest_, params_.x);
            select_nearest(dist_, active_, params_.x);

            picked_.clear();
            for (auto idx : active_)
                picked_.push_back(dist_[idx]);
            rec.score = median_inplace(picked_);

            fade(t - t_last_);
            register_observations(nearest_);

            const double p = sampling_probability(t, nearest_);
            const double r = rng_.next();
            if (r <= p) {
                insert_observer(v, t);
                rec.sampled = true;
            }
        }
        t_last_ = t;
        ++points_seen_;
        return rec;
    }

    // Order statistic realizing the percentile threshold. Reorders `values`.
    static double threshold_of(std::vector<double>& values, double q_id)
    {
        const std::size_t m = values.size();
        // The guard absorbs products like 0.29 * 100 = 28.999999999999996.
        auto idx = static_cast<std::size_t>(std::floor(q_id * static_cast<double>(m) + 1e-9));
        idx = std::min(idx, m - 1);
        std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(idx), values.end());
        return values[idx];
    }

private:
    void require_observers() const
    {
        if (observers_.empty())
            throw EmptyModel("model has no observers");
    }

    void check_dims(std::span<const double> v) const
    {
        if (dims_ != 0 && v.size() != dims_)
            throw DimensionMismatch("point has " + std::to_string(v.size()) + " features, model expects " +
                                    std::to_string(dims_));
    }

    void distances_to(std::span<const double> v, std::vector<double>& out) const
    {
        out.resize(observers_.size());
        for (std::size_t i = 0; i < observers_.size(); ++i)
            out[i] = distance(params_.distance, observers_[i].position, v);
    }

    static void collect_active(std::span<const double> activity, double thr, std::vector<std::size_t>& out)
    {
        out.clear();
        for (std::size_t i = 0; i < activity.size(); ++i)
            if (activity[i] >= thr)
                out.push_back(i);
        if (out.empty()) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < activity.size(); ++i)
                if (activity[i] > activity[best])
                    best = i;
            out.push_back(best);
        }
    }

    // Keeps the `count` candidates closest by (distance, index), sorted.
    static void select_nearest(std::span<const double> dist, std::vector<std::size_t>& candidates, std::size_t count)
    {
        auto closer = [&](std::size_t a, std::size_t b) {
            return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
        };
        const std::size_t keep = std::min(count, candidates.size());
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                          candidates.end(), closer);
        candidates.resize(keep);
    }

    ModelParams params_;
    std::vector<Observer> observers_;
    std::uint64_t i_lao_ = 0;
    double t_lao_ = 0.0;
    std::uint64_t points_seen_ = 0;
    double t_last_ = 0.0;
    std::size_t dims_ = 0;
    UniformSource rng_;

    // scratch buffers reused by process()
    std::vector<double> dist_, activity_, p0_, picked_;
    std::vector<std::size_t> active_, nearest_;
    std::vector<std::complex<double>> rotation_;
};

} // namespace sdooop
