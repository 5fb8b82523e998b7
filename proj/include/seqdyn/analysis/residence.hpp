#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "seqdyn/core/trajectory.hpp"

namespace seqdyn::analysis {

struct Visit {
    int saddle = 0;
    double t_in = 0.0;
    double t_out = 0.0;
    bool complete = true; // false if the visit is cut by the start or the end of the trajectory

    double duration() const { return t_out - t_in; }
};

/**
 * Maximal intervals spent in the balls B_r(saddle_i). Means use complete visits
 * starting at or after t_min only.
 */
struct ResidenceProfile {
    double radius = 0.0;
    std::vector<Visit> visits; // time ordered
    std::vector<std::vector<double>> durations;
    std::vector<double> means; // NaN for a saddle without complete visits

    /// Visited saddle indices follow i -> i+1 (mod count) without repeats or skips.
    bool cyclic_order() const
    {
        const int m = static_cast<int>(means.size());
        for (std::size_t k = 1; k < visits.size(); ++k)
            if (visits[k].saddle != (visits[k - 1].saddle + 1) % m)
                return false;
        return true;
    }
};

inline ResidenceProfile residence_times(const Trajectory& traj, const std::vector<Vec>& saddles, double r,
                                        double t_min = -std::numeric_limits<double>::infinity())
{
    require(r > 0.0, "residence_times: radius must be positive");
    require(!saddles.empty(), "residence_times: no saddles");
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < saddles.size(); ++i)
        for (std::size_t j = i + 1; j < saddles.size(); ++j)
            dmin = std::min(dmin, (saddles[i] - saddles[j]).norm());
    require(r < 0.5 * dmin, "residence_times: balls overlap (r must be below half the minimal saddle distance)");

    ResidenceProfile prof;
    prof.radius = r;
    const int m = static_cast<int>(saddles.size());
    prof.durations.assign(m, {});
    prof.means.assign(m, std::numeric_limits<double>::quiet_NaN());
    if (traj.size() < 2)
        return prof;

    auto inside = [&](const Vec& x) {
        for (int i = 0; i < m; ++i)
            if ((x - saddles[i]).norm() < r)
                return i;
        return -1;
    };
    // boundary time on step k where membership in ball i flips, by bisection on the dense output
    auto refine = [&](std::size_t k, int i, bool entering, double lo, double hi) {
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const bool in = (traj.at_segment(k, mid) - saddles[i]).norm() < r;
            if (in == entering)
                hi = mid;
            else
                lo = mid;
        }
        return 0.5 * (lo + hi);
    };

    int cur = inside(traj.state(0));
    double t_in = traj.t0();
    bool cut = cur >= 0;
    auto close_visit = [&](double t_out, bool complete) {
        prof.visits.push_back({cur, t_in, t_out, complete});
    };
    for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
        // a midpoint probe catches balls grazed within a single step
        const double tm = 0.5 * (traj.time(k) + traj.time(k + 1));
        const std::pair<double, double> halves[2] = {{traj.time(k), tm}, {tm, traj.time(k + 1)}};
        for (const auto& [a, b] : halves) {
            const int now = inside(b == tm ? traj.at_segment(k, tm) : traj.state(k + 1));
            if (now == cur)
                continue;
            if (cur >= 0) {
                close_visit(refine(k, cur, false, a, b), !cut);
                cut = false;
            }
            if (now >= 0)
                t_in = refine(k, now, true, a, b);
            cur = now;
        }
    }
    if (cur >= 0)
        close_visit(traj.t_end(), false);

    for (const Visit& v : prof.visits)
        if (v.complete && v.t_in >= t_min)
            prof.durations[v.saddle].push_back(v.duration());
    for (int i = 0; i < m; ++i) {
        const auto& d = prof.durations[i];
        if (!d.empty())
            prof.means[i] = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    }
    return prof;
}

} // namespace seqdyn::analysis
