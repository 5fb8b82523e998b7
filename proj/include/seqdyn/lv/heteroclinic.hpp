#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "seqdyn/integrate/crossings.hpp"
#include "seqdyn/integrate/integrator.hpp"
#include "seqdyn/lv/lotka_volterra.hpp"

namespace seqdyn::lv {

/// Resamples a polyline so that consecutive points are at most `step` apart.
inline std::vector<Vec> resample_polyline(const std::vector<Vec>& pts, double step)
{
    require(step > 0.0, "resample_polyline: step must be positive");
    std::vector<Vec> out;
    if (pts.empty())
        return out;
    out.push_back(pts.front());
    for (std::size_t k = 1; k < pts.size(); ++k) {
        const Vec d = pts[k] - pts[k - 1];
        const int pieces = std::max(1, static_cast<int>(std::ceil(d.norm() / step)));
        for (int s = 1; s <= pieces; ++s)
            out.push_back(pts[k - 1] + d * (static_cast<double>(s) / pieces));
    }
    return out;
}

/**
 * Polyline proxy of the heteroclinic cycle: leg i starts at a_i e_i + delta e_i^u,
 * stays in its invariant coordinate plane and is cut once it comes within
 * `arrive` of the next saddle. Legs are concatenated in cyclic order and the
 * result is resampled at arclength steps <= `step`. leg_start[i] is the index of
 * the first point of leg i.
 */
struct CycleReference {
    std::vector<Vec> points;
    std::vector<std::size_t> leg_start;
};

inline CycleReference heteroclinic_reference(const LotkaVolterra& sys, double step = 0.01, double delta = 1e-7,
                                             double arrive = 1e-4)
{
    CycleReference ref;
    IntegratorConfig cfg;
    cfg.t_max = 400.0;
    cfg.max_dt = 0.05;
    const VectorField g = sys.field();
    for (int i = 0; i < 3; ++i) {
        const int next = (i + 1) % 3;
        const Vec start = sys.equilibrium(i) + delta * lv_jacobian_at_equilibrium(sys, i).unstable_eigvec;
        const IntegrationResult res = integrate(g, start, cfg);
        if (!res.ok())
            throw NumericError("heteroclinic_reference: leg integration failed: " + res.message);
        std::vector<Vec> leg{sys.equilibrium(i)};
        bool arrived = false;
        for (const Vec& x : res.trajectory.states()) {
            leg.push_back(x);
            if ((x - sys.equilibrium(next)).norm() < arrive) {
                arrived = true;
                break;
            }
        }
        if (!arrived)
            throw NumericError("heteroclinic_reference: leg did not reach the next saddle");
        leg.push_back(sys.equilibrium(next));
        std::vector<Vec> fine = resample_polyline(leg, step);
        ref.leg_start.push_back(ref.points.size());
        ref.points.insert(ref.points.end(), fine.begin(), fine.end() - 1);
    }
    ref.points.push_back(ref.points.front());
    return ref;
}

/**
 * Poincare section on the first leg: the reference point farthest from all
 * three saddles, with normal along the target field there.
 */
inline SectionSpec cycle_section(const LotkaVolterra& sys, const CycleReference& ref, int id = 0)
{
    require(ref.leg_start.size() == 3, "cycle_section: reference must have three legs");
    double best = -1.0;
    Vec p;
    for (std::size_t k = ref.leg_start[0]; k < ref.leg_start[1]; ++k) {
        double dmin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 3; ++i)
            dmin = std::min(dmin, (ref.points[k] - sys.equilibrium(i)).norm());
        if (dmin > best) {
            best = dmin;
            p = ref.points[k];
        }
    }
    return SectionSpec(p, sys.eval(p), id);
}

} // namespace seqdyn::lv
