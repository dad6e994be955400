#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "sdooop/distance.hpp"
#include "sdooop/errors.hpp"
#include "sdooop/model.hpp"

namespace sdooop {

// Fused record: score is the median of member scores, warmup and sampled are
// true if any member reports them, n_active is the smallest member count.
inline ScoreRecord ensemble_process(std::span<Model> members, std::span<const double> v, double t)
{
    if (members.empty())
        throw InvalidParameter("ensemble needs at least one member");
    // Validate against every member first so a rejected point leaves all
    // members untouched.
    for (const auto& m : members)
        m.check_point(v, t);

    std::vector<double> scores;
    scores.reserve(members.size());
    ScoreRecord fused;
    fused.t = t;
    fused.n_active = static_cast<std::size_t>(-1);
    for (auto& m : members) {
        const ScoreRecord r = m.process(v, t);
        scores.push_back(r.score);
        fused.warmup = fused.warmup || r.warmup;
        fused.sampled = fused.sampled || r.sampled;
        fused.n_active = std::min(fused.n_active, r.n_active);
    }
    fused.score = median_inplace(scores);
    return fused;
}

// Feeds every point to each member model and fuses their scores with
// ensemble_process(). Member i is seeded with base.seed + i.
class Ensemble {
public:
    Ensemble(const ModelParams& base, std::size_t members)
    {
        if (members < 1)
            throw InvalidParameter("ensemble needs at least one member");
        members_.reserve(members);
        for (std::size_t i = 0; i < members; ++i) {
            ModelParams p = base;
            p.seed = base.seed + i;
            members_.emplace_back(p);
        }
    }

    explicit Ensemble(std::vector<Model> members) : members_(std::move(members))
    {
        if (members_.empty())
            throw InvalidParameter("ensemble needs at least one member");
        for (const auto& m : members_) {
            ModelParams a = m.params(), b = members_.front().params();
            a.seed = b.seed = 0;
            if (!(a == b))
                throw InvalidParameter("ensemble members must share all parameters except the seed");
            if (m.dims() != 0 && members_.front().dims() != 0 && m.dims() != members_.front().dims())
                throw InvalidParameter("ensemble members disagree on dimension");
        }
    }

    ScoreRecord process(std::span<const double> v, double t) { return ensemble_process(members_, v, t); }

    std::span<const Model> members() const { return members_; }
    std::span<Model> members() { return members_; }
    std::size_t size() const { return members_.size(); }

private:
    std::vector<Model> members_;
};

} // namespace sdooop
