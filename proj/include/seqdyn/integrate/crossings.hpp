#pragma once

#include <cmath>
#include <vector>

#include "seqdyn/core/trajectory.hpp"

namespace seqdyn {

/// Oriented hyperplane {x : <x - p, normal> = 0}; only negative-to-positive crossings count.
struct SectionSpec {
    Vec point;
    Vec normal;
    int id = 0;

    SectionSpec() = default;
    SectionSpec(Vec p, Vec nrm, int section_id = 0) : point(std::move(p)), normal(std::move(nrm)), id(section_id)
    {
        require(point.size() == normal.size(), "SectionSpec: point/normal dimension mismatch");
        const double len = normal.norm();
        require(len > 0.0 && std::isfinite(len), "SectionSpec: normal must be nonzero");
        normal /= len;
    }

    double signed_distance(const Vec& x) const { return (x - point).dot(normal); }
};

struct CrossingOptions {
    double tolerance = 1e-10;        // |<x(t*) - p, n>| after refinement
    int max_bisections = 40;
    double grazing_tolerance = 1e-12; // |d/dt <x(t) - p, n>| at t*
};

/**
 * Positive crossings of the section along the dense output, refined by bisection
 * on the interpolant. Deterministic: the same trajectory always yields the same events.
 */
inline std::vector<CrossingEvent> detect_crossings(const Trajectory& traj, const SectionSpec& section,
                                                   const CrossingOptions& opt = {})
{
    require(traj.dim() == section.point.size(), "detect_crossings: dimension mismatch");
    std::vector<CrossingEvent> out;
    if (traj.size() < 2)
        return out;
    double s_prev = section.signed_distance(traj.state(0));
    for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
        const double s_next = section.signed_distance(traj.state(k + 1));
        if (s_prev < 0.0 && s_next >= 0.0) {
            double lo = traj.time(k), hi = traj.time(k + 1);
            double t_star = hi;
            Vec x_star = traj.state(k + 1);
            if (s_next > opt.tolerance) {
                for (int it = 0; it < opt.max_bisections; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const Vec xm = traj.at_segment(k, mid);
                    const double sm = section.signed_distance(xm);
                    t_star = mid;
                    x_star = xm;
                    if (std::abs(sm) < opt.tolerance)
                        break;
                    (sm < 0.0 ? lo : hi) = mid;
                }
            }
            const double rate = traj.derivative_segment(k, t_star).dot(section.normal);
            out.push_back({t_star, x_star, section.id, std::abs(rate) < opt.grazing_tolerance});
        }
        s_prev = s_next;
    }
    return out;
}

} // namespace seqdyn
