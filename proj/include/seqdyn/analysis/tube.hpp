#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "seqdyn/core/trajectory.hpp"

namespace seqdyn::analysis {

/// Euclidean distance from x to the polyline through pts, by projection onto each segment.
inline double distance_to_polyline(const Vec& x, const std::vector<Vec>& pts)
{
    require(!pts.empty(), "distance_to_polyline: empty polyline");
    if (pts.size() == 1)
        return (x - pts[0]).norm();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        const Vec d = pts[k + 1] - pts[k];
        const double len2 = d.squaredNorm();
        const double s = len2 > 0.0 ? std::clamp((x - pts[k]).dot(d) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, (x - pts[k] - s * d).norm());
    }
    return best;
}

/**
 * Fraction of the orbit within distance r of the reference polyline. The orbit
 * is sampled uniformly in time with step dt on [max(t_min, t0), t_end] so that
 * adaptive step clustering does not bias the fraction.
 */
inline double tube_containment(const Trajectory& traj, const std::vector<Vec>& reference, double r,
                               double t_min = -std::numeric_limits<double>::infinity(), double dt = 0.05)
{
    require(r > 0.0 && dt > 0.0, "tube_containment: radius and dt must be positive");
    if (traj.empty())
        return 0.0;
    const double start = std::max(t_min, traj.t0());
    if (start > traj.t_end())
        return 0.0;
    long inside = 0, total = 0;
    for (double t = start; t <= traj.t_end(); t += dt) {
        ++total;
        if (distance_to_polyline(traj.at(t), reference) < r)
            ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(total);
}

inline double tube_containment(const Trajectory& traj, const Trajectory& reference, double r,
                               double t_min = -std::numeric_limits<double>::infinity(), double dt = 0.05)
{
    return tube_containment(traj, reference.states(), r, t_min, dt);
}

} // namespace seqdyn::analysis
