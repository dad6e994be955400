#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdooop/errors.hpp"

namespace sdooop::metrics {

// Aligned scores and binary labels (1 = outlier).
struct ScoredLabels {
    std::vector<double> scores;
    std::vector<int> labels;

    std::size_t positives() const
    {
        return static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](int l) { return l != 0; }));
    }

    void validate() const
    {
        if (scores.size() != labels.size())
            throw InvalidParameter("scores and labels differ in length (" + std::to_string(scores.size()) +
                                   " vs " + std::to_string(labels.size()) + ")");
        const std::size_t pos = positives();
        if (pos == 0 || pos == labels.size())
            throw InvalidParameter("metrics need both outliers and inliers");
    }
};

// Probability that a random outlier outscores a random inlier, ties counted
// one half. Computed from midranks in O(n log n).
inline double roc_auc(const ScoredLabels& data)
{
    data.validate();
    const std::size_t n = data.scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return data.scores[a] < data.scores[b]; });

    double rank_sum = 0.0;   // sum of midranks of outliers, 1-based
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && data.scores[order[j + 1]] == data.scores[order[i]])
            ++j;
        const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t q = i; q <= j; ++q)
            if (data.labels[order[q]] != 0)
                rank_sum += midrank;
        i = j + 1;
    }
    const double pos = static_cast<double>(data.positives());
    const double neg = static_cast<double>(n) - pos;
    return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

// Indices by descending score; ties keep input order.
inline std::vector<std::size_t> ranking(const ScoredLabels& data)
{
    std::vector<std::size_t> order(data.scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return data.scores[a] > data.scores[b]; });
    return order;
}

// Mean over outliers of the precision at each outlier's rank.
inline double average_precision(const ScoredLabels& data)
{
    data.validate();
    const auto order = ranking(data);
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < order.size(); ++r) {
        if (data.labels[order[r]] != 0) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(r + 1);
        }
    }
    return sum / static_cast<double>(hits);
}

// Fraction of outliers among the n highest scores; n = 0 means the number of
// outliers.
inline double precision_at_n(const ScoredLabels& data, std::size_t n = 0)
{
    data.validate();
    if (n == 0)
        n = data.positives();
    if (n > data.scores.size())
        throw InvalidParameter("n exceeds the number of records");
    const auto order = ranking(data);
    std::size_t hits = 0;
    for (std::size_t r = 0; r < n; ++r)
        hits += data.labels[order[r]] != 0 ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(n);
}

// Chance adjustment: 0 for random scoring, 1 for perfect, negative below
// chance.
inline double adjust(double metric_value, double outlier_rate)
{
    if (!(outlier_rate > 0.0 && outlier_rate < 1.0))
        throw InvalidParameter("outlier rate must lie strictly between 0 and 1");
    return (metric_value - outlier_rate) / (1.0 - outlier_rate);
}

struct Summary {
    std::size_t records = 0;
    std::size_t outliers = 0;
    double auc = 0.0;
    double ap = 0.0;
    double p_at_n = 0.0;
    double aap = 0.0;
    double ap_at_n = 0.0;   // adjusted precision at n
};

inline Summary summarize(const ScoredLabels& data)
{
    Summary s;
    s.records = data.scores.size();
    s.outliers = data.positives();
    s.auc = roc_auc(data);
    s.ap = average_precision(data);
    s.p_at_n = precision_at_n(data);
    const double rate = static_cast<double>(s.outliers) / static_cast<double>(s.records);
    s.aap = adjust(s.ap, rate);
    s.ap_at_n = adjust(s.p_at_n, rate);
    return s;
}

} // namespace sdooop::metrics
