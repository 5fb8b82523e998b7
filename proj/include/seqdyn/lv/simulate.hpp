#pragma once

#include "seqdyn/integrate/integrator.hpp"
#include "seqdyn/lv/lotka_volterra.hpp"

namespace seqdyn::lv {

/**
 * Integrates the target in log coordinates and maps the result back to the
 * orthant. Near the cycle the coordinates transverse to it decay
 * super-exponentially from lap to lap and leave the range of doubles within a
 * few laps; ln x stays representable, so the cycling continues as long as the
 * caller asks. Requires x0 > 0 componentwise.
 */
inline IntegrationResult simulate(const LotkaVolterra& sys, const Vec& x0, const IntegratorConfig& cfg)
{
    require(x0.size() == 3 && (x0.array() > 0.0).all(), "lv::simulate: x0 must lie in the open orthant");
    IntegrationResult log_res = integrate(log_field(sys), Vec(x0.array().log()), cfg);
    IntegrationResult out;
    out.status = log_res.status;
    out.message = std::move(log_res.message);
    out.rejected_steps = log_res.rejected_steps;
    out.trajectory = Trajectory(3);
    const Trajectory& ly = log_res.trajectory;
    for (std::size_t k = 0; k < ly.size(); ++k) {
        Vec x = ly.state(k).array().exp();
        Vec dx = x.cwiseProduct(ly.slopes()[k]);
        out.trajectory.push_back(ly.time(k), std::move(x), std::move(dx));
    }
    return out;
}

/// Initial condition a_i e_i + delta e_i^u, pushed off the invariant coordinate planes by `floor`.
inline Vec near_saddle_start(const LotkaVolterra& sys, int i, double delta, double floor = 1e-12)
{
    const SaddleSpectrum sp = lv_jacobian_at_equilibrium(sys, i);
    Vec x = sys.equilibrium(i) + delta * sp.unstable_eigvec;
    for (auto& v : x)
        v = std::max(v, floor);
    return x;
}

} // namespace seqdyn::lv
