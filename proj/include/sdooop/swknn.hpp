#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "sdooop/distance.hpp"
#include "sdooop/errors.hpp"
#include "sdooop/model.hpp"

namespace sdooop {

struct SWKnnParams {
    double window = 100.0;   // seconds
    std::size_t k_nn = 5;
    Distance distance = Distance::euclidean;

    void validate() const
    {
        if (!(window > 0.0) || !std::isfinite(window))
            throw InvalidParameter("window must be a positive number of seconds");
        if (k_nn < 1)
            throw InvalidParameter("k_nn must be >= 1");
    }
};

// Sliding-window kNN outlier detector: the score of a point is the distance
// to its k-th nearest neighbor among the points of the last `window` seconds.
// Linear scan over the window.
class SWKnn {
public:
    explicit SWKnn(SWKnnParams params) : params_(params) { params_.validate(); }

    // Score record shaped like the model's: n_active is the window size at
    // scoring time, sampled is always true since every point enters the window.
    ScoreRecord process(std::span<const double> v, double t)
    {
        if (!std::isfinite(t))
            throw DataError("non-finite timestamp");
        if (seen_ > 0 && t < t_last_)
            throw OutOfOrderTimestamp("timestamp " + std::to_string(t) + " precedes previous timestamp " +
                                      std::to_string(t_last_));
        if (dims_ != 0 && v.size() != dims_)
            throw DimensionMismatch("point has " + std::to_string(v.size()) + " features, detector expects " +
                                    std::to_string(dims_));
        dims_ = v.size();

        // keep (t - window, t]
        while (!window_.empty() && window_.front().t <= t - params_.window)
            window_.pop_front();

        ScoreRecord rec;
        rec.t = t;
        rec.n_active = window_.size();
        rec.sampled = true;
        if (window_.empty()) {
            rec.warmup = true;
        } else {
            dist_.clear();
            for (const auto& e : window_)
                dist_.push_back(distance(params_.distance, e.v, v));
            const std::size_t kth = std::min(params_.k_nn, dist_.size()) - 1;
            std::nth_element(dist_.begin(), dist_.begin() + static_cast<std::ptrdiff_t>(kth), dist_.end());
            rec.score = dist_[kth];
        }
        window_.push_back(Entry{t, std::vector<double>(v.begin(), v.end())});
        t_last_ = t;
        ++seen_;
        return rec;
    }

    double score_and_insert(std::span<const double> v, double t) { return process(v, t).score; }

    std::size_t window_size() const { return window_.size(); }
    const SWKnnParams& params() const { return params_; }

private:
    struct Entry {
        double t;
        std::vector<double> v;
    };

    SWKnnParams params_;
    std::deque<Entry> window_;
    std::vector<double> dist_;
    double t_last_ = 0.0;
    std::size_t seen_ = 0;
    std::size_t dims_ = 0;
};

} // namespace sdooop
