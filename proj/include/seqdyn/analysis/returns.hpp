#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "seqdyn/integrate/crossings.hpp"

namespace seqdyn::analysis {

struct ReturnOptions {
    int skip = 2;                   // leading crossings discarded as transient
    double rel_tol = 0.01;          // |T_{k+1} - T_k| / T_k
    int consecutive = 2;            // how many successive ratios must pass
    double contraction_floor = 1e-8; // displacements below this count as contracted
    CrossingOptions crossing{};
};

/**
 * Crossings of one section and the intervals between them (after the transient
 * skip). converged_period is the newest interval of the first window of
 * `consecutive` successive relative changes below rel_tol; convergence_k
 * indexes the first interval of that window.
 */
struct ReturnRecord {
    std::vector<CrossingEvent> crossings; // all detected, including skipped ones
    std::vector<double> times;           // retained crossing times
    std::vector<Vec> points;
    std::vector<double> intervals;
    std::optional<double> converged_period;
    std::optional<int> convergence_k;
    bool contracting = false;
    int grazing = 0;

    /// Every interval longer than the one before (at least two intervals needed).
    bool strictly_increasing() const
    {
        if (intervals.size() < 2)
            return false;
        for (std::size_t k = 1; k < intervals.size(); ++k)
            if (!(intervals[k] > intervals[k - 1]))
                return false;
        return true;
    }
};

inline ReturnRecord detect_periodic_orbit(const Trajectory& traj, const SectionSpec& section,
                                          const ReturnOptions& opt = {})
{
    require(opt.skip >= 0 && opt.consecutive >= 1 && opt.rel_tol > 0.0, "detect_periodic_orbit: bad options");
    ReturnRecord rec;
    rec.crossings = detect_crossings(traj, section, opt.crossing);
    for (std::size_t k = 0; k < rec.crossings.size(); ++k) {
        rec.grazing += rec.crossings[k].grazing ? 1 : 0;
        if (static_cast<int>(k) < opt.skip)
            continue;
        rec.times.push_back(rec.crossings[k].t);
        rec.points.push_back(rec.crossings[k].x);
    }
    for (std::size_t k = 1; k < rec.times.size(); ++k)
        rec.intervals.push_back(rec.times[k] - rec.times[k - 1]);

    const int m = static_cast<int>(rec.intervals.size());
    for (int k = 0; k + opt.consecutive < m; ++k) {
        bool ok = true;
        for (int j = k; j < k + opt.consecutive && ok; ++j)
            ok = std::abs(rec.intervals[j + 1] - rec.intervals[j]) / rec.intervals[j] < opt.rel_tol;
        if (!ok)
            continue;
        rec.convergence_k = k;
        rec.converged_period = rec.intervals[k + opt.consecutive];
        // displacement between successive return points over the same window
        bool contracting = true;
        double prev = (rec.points[k + 1] - rec.points[k]).norm();
        for (int j = k + 1; j <= k + opt.consecutive; ++j) {
            const double d = (rec.points[j + 1] - rec.points[j]).norm();
            if (!(d < prev || d < opt.contraction_floor))
                contracting = false;
            prev = d;
        }
        rec.contracting = contracting;
        break;
    }
    return rec;
}

/**
 * Time from the first crossing to the next one. When x0 already lies on the
 * section (|<x0 - p, n>| <= on_section_tol) the start counts as the initial crossing.
 */
inline std::optional<double> first_return_time(const Trajectory& traj, const SectionSpec& section,
                                               double on_section_tol = 1e-10, const CrossingOptions& opt = {})
{
    if (traj.empty())
        return std::nullopt;
    const auto ev = detect_crossings(traj, section, opt);
    const bool on_section = std::abs(section.signed_distance(traj.state(0))) <= on_section_tol;
    if (on_section) {
        for (const auto& e : ev)
            if (e.t > traj.t0())
                return e.t - traj.t0();
        return std::nullopt;
    }
    if (ev.size() < 2)
        return std::nullopt;
    return ev[1].t - ev[0].t;
}

} // namespace seqdyn::analysis
