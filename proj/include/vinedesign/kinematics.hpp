#pragma once

// Planar serial-chain kinematics for a vine robot with a freely rotating base.
//
// Angles are radians everywhere inside the library. Degrees only appear at the
// file / CLI / HTTP boundary (see io.hpp).

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "vinedesign/errors.hpp"

namespace vine {

using Vec2 = Eigen::Vector2d;

inline constexpr double kPi = std::numbers::pi;

constexpr double deg2rad(double deg) noexcept { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) noexcept { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double rad) noexcept {
    double r = std::remainder(rad, 2.0 * kPi);  // [-pi, pi]
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

/// Wraps an angle in degrees into (-180, 180].
inline double wrap_degrees(double deg) noexcept {
    double r = std::remainder(deg, 360.0);
    if (r <= -180.0) r += 360.0;
    return r;
}

/// A goal pose for some link of the robot: a point the link must pass through
/// and the heading that link must have there.
struct Target {
    Vec2 position = Vec2::Zero();
    double orientation = 0.0;  // radians, in (-pi, pi]

    static Target from_degrees(double x, double y, double phi_deg) {
        return Target{Vec2(x, y), wrap_angle(deg2rad(phi_deg))};
    }

    double orientation_degrees() const { return rad2deg(orientation); }

    void validate() const {
        if (!position.allFinite() || !std::isfinite(orientation))
            throw ValidationError("target must be finite", "target");
        if (position.norm() <= 0.0)
            throw ValidationError("target must not coincide with the base", "target");
    }
};

/// Link lengths from base to tip, meters. The only manufactured quantity.
struct Design {
    std::vector<double> lengths;

    std::size_t links() const noexcept { return lengths.size(); }

    double total_length() const noexcept {
        double s = 0.0;
        for (double l : lengths) s += l;
        return s;
    }
};

/// Joint angles for one target, radians. angles[0] is the base rotation, the
/// rest are relative bends at the proximal end of each subsequent link.
struct Configuration {
    std::vector<double> angles;
};

/// Node positions of a realized chain plus the absolute heading of every link.
struct ChainPose {
    std::vector<Vec2> nodes;                // n + 1 points, nodes[0] is the base
    std::vector<double> cumulative_angles;  // n headings

    std::size_t links() const noexcept { return cumulative_angles.size(); }
};

inline ChainPose forward_kinematics(std::span<const double> lengths,
                                    std::span<const double> angles,
                                    const Vec2& base = Vec2::Zero()) {
    if (lengths.size() != angles.size())
        throw DimensionError("forward_kinematics: " + std::to_string(lengths.size()) +
                             " lengths but " + std::to_string(angles.size()) + " angles");
    ChainPose pose;
    pose.nodes.reserve(lengths.size() + 1);
    pose.cumulative_angles.reserve(lengths.size());
    pose.nodes.push_back(base);
    double heading = 0.0;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        heading += angles[i];
        pose.cumulative_angles.push_back(heading);
        pose.nodes.push_back(pose.nodes.back() +
                             lengths[i] * Vec2(std::cos(heading), std::sin(heading)));
    }
    return pose;
}

inline ChainPose forward_kinematics(const Design& design, const Configuration& config) {
    return forward_kinematics(design.lengths, config.angles);
}

struct SegmentProjection {
    double distance = 0.0;
    double lambda = 0.0;  // clamped projection parameter along v -> w
    Vec2 closest = Vec2::Zero();
};

/// Distance from `t` to the sub-segment v + lambda (w - v), lambda in [lo, hi].
///
/// The projection parameter uses the squared segment length in the
/// denominator, which is what makes v + lambda (w - v) the orthogonal foot.
inline SegmentProjection point_segment_distance(const Vec2& t, const Vec2& v, const Vec2& w,
                                                double clamp_lo = 0.0, double clamp_hi = 1.0) {
    if (!(clamp_lo >= 0.0 && clamp_lo < clamp_hi && clamp_hi <= 1.0))
        throw ValidationError("clamp interval must satisfy 0 <= lo < hi <= 1", "clamp");
    const Vec2 dir = w - v;
    const double len2 = dir.squaredNorm();
    if (!(len2 > 0.0)) throw GeometryError("point_segment_distance: degenerate segment");
    const double raw = (t - v).dot(dir) / len2;
    SegmentProjection out;
    out.lambda = std::clamp(raw, clamp_lo, clamp_hi);
    out.closest = v + out.lambda * dir;
    out.distance = (t - out.closest).norm();
    return out;
}

}  // namespace vine
