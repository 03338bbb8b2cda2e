#pragma once

// Design objective: for every target, the best candidate end-effector link
// (links 2..n) scored by weighted position and heading residuals, scaled by the
// inverse squared distance of the target from the base.
//
// Link numbers in this header are 1-based, matching how links are counted on
// the physical robot; link 1 is never an end-effector because its heading is
// fixed by the base-to-target ray.

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "vinedesign/kinematics.hpp"

namespace vine {

struct CostWeights {
    double distance = 1.0;     // per meter
    double orientation = 0.3;  // per radian; ~0.01 m per 2 degrees
    double clamp_lo = 0.3;
    double clamp_hi = 0.9;

    void validate() const {
        if (!(distance > 0.0)) throw ValidationError("must be > 0", "weights.distance");
        if (!(orientation > 0.0)) throw ValidationError("must be > 0", "weights.orientation");
        if (!(clamp_lo >= 0.0 && clamp_lo < clamp_hi && clamp_hi <= 1.0))
            throw ValidationError("must satisfy 0 <= clampLo < clampHi <= 1", "weights.clamp");
    }
};

struct LinkCost {
    double cost = 0.0;
    double distance = 0.0;     // meters
    double orientation = 0.0;  // radians, absolute wrapped difference
};

struct TargetCost {
    std::size_t target_index = 0;
    std::size_t best_link = 0;  // 1-based, >= 2
    double distance = 0.0;
    double orientation = 0.0;
    double weighted = 0.0;
};

struct CostBreakdown {
    double total = 0.0;
    std::vector<TargetCost> per_target;
};

namespace detail {

inline LinkCost score_segment(const Vec2& v, const Vec2& w, double heading, const Target& target,
                              const CostWeights& weights) {
    LinkCost out;
    out.distance =
        point_segment_distance(target.position, v, w, weights.clamp_lo, weights.clamp_hi).distance;
    out.orientation = std::abs(wrap_angle(target.orientation - heading));
    out.cost = (weights.distance * out.distance + weights.orientation * out.orientation) /
               target.position.squaredNorm();
    return out;
}

}  // namespace detail

/// Cost of using link `link` (1-based) of `pose` as the end-effector for `target`.
inline LinkCost link_cost(const ChainPose& pose, const Target& target, std::size_t link,
                          const CostWeights& weights) {
    if (link < 2 || link > pose.links())
        throw IndexError("link_cost: link " + std::to_string(link) + " outside [2, " +
                         std::to_string(pose.links()) + "]");
    return detail::score_segment(pose.nodes[link - 1], pose.nodes[link],
                                 pose.cumulative_angles[link - 1], target, weights);
}

/// Best link for one target, walking the chain once without allocating.
/// Ties keep the lowest link number.
inline TargetCost best_link_cost(std::span<const double> lengths, std::span<const double> angles,
                                 const Target& target, const CostWeights& weights) {
    if (lengths.size() != angles.size())
        throw DimensionError("best_link_cost: configuration does not match design");
    if (lengths.size() < 2) throw DimensionError("best_link_cost: design needs at least 2 links");
    TargetCost best;
    best.weighted = std::numeric_limits<double>::infinity();
    Vec2 node = Vec2::Zero();
    double heading = 0.0;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        heading += angles[i];
        const Vec2 next = node + lengths[i] * Vec2(std::cos(heading), std::sin(heading));
        if (i >= 1) {
            const LinkCost c = detail::score_segment(node, next, heading, target, weights);
            if (c.cost < best.weighted || best.best_link == 0) {
                best.best_link = i + 1;
                best.distance = c.distance;
                best.orientation = c.orientation;
                best.weighted = c.cost;
            }
        }
        node = next;
    }
    return best;
}

inline void validate_targets(std::span<const Target> targets) {
    if (targets.empty()) throw ValidationError("at least one target is required", "targets");
    for (std::size_t j = 0; j < targets.size(); ++j) {
        try {
            targets[j].validate();
        } catch (const ValidationError& e) {
            throw ValidationError(e.message(), "targets[" + std::to_string(j) + "]");
        }
    }
}

inline CostBreakdown total_cost(const Design& design, std::span<const Configuration> configs,
                                std::span<const Target> targets, const CostWeights& weights) {
    validate_targets(targets);
    if (configs.size() != targets.size())
        throw DimensionError("total_cost: " + std::to_string(configs.size()) +
                             " configurations for " + std::to_string(targets.size()) + " targets");
    CostBreakdown out;
    out.per_target.reserve(targets.size());
    for (std::size_t j = 0; j < targets.size(); ++j) {
        TargetCost tc = best_link_cost(design.lengths, configs[j].angles, targets[j], weights);
        tc.target_index = j;
        out.total += tc.weighted;
        out.per_target.push_back(tc);
    }
    return out;
}

/// Objective over the flat search vector x = [lengths(n), q_1(n), ..., q_m(n)].
class DesignObjective {
public:
    DesignObjective(std::vector<Target> targets, CostWeights weights, std::size_t links)
        : targets_(std::move(targets)), weights_(weights), links_(links) {
        validate_targets(targets_);
        weights_.validate();
        if (links_ < 2) throw DimensionError("DesignObjective: need at least 2 links");
    }

    std::size_t dimension() const noexcept { return links_ * (targets_.size() + 1); }
    std::size_t links() const noexcept { return links_; }
    const std::vector<Target>& targets() const noexcept { return targets_; }
    const CostWeights& weights() const noexcept { return weights_; }

    double operator()(std::span<const double> x) const {
        if (x.size() != dimension()) throw DimensionError("DesignObjective: wrong vector size");
        const auto lengths = x.first(links_);
        double total = 0.0;
        for (std::size_t j = 0; j < targets_.size(); ++j)
            total += best_link_cost(lengths, x.subspan(links_ * (j + 1), links_), targets_[j],
                                    weights_)
                         .weighted;
        return total;
    }

private:
    std::vector<Target> targets_;
    CostWeights weights_;
    std::size_t links_;
};

}  // namespace vine
