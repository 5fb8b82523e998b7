#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "seqdyn/approx/network.hpp"
#include "seqdyn/core/grid.hpp"
#include "seqdyn/lv/heteroclinic.hpp"
#include "seqdyn/lv/lotka_volterra.hpp"

namespace seqdyn::approx {

/// The two summands of the C^1(K) distance, each as a grid sup.
struct C1Error {
    double sup_value = 0.0;    // max ||g(x) - f(x)||_2
    double sup_jacobian = 0.0; // max ||Dg(x) - Df(x)||_2 (operator norm)
    Vec argmax_value;
};

inline C1Error c1_error(const VectorField& f, const VectorField& g, const Box& box, int res)
{
    C1Error out;
    for_each_grid_node(box, res, [&](const Vec& x) {
        const double ev = (g(x) - f(x)).norm();
        if (ev > out.sup_value || out.argmax_value.size() == 0) {
            out.sup_value = std::max(out.sup_value, ev);
            out.argmax_value = x;
        }
        const Mat dj = g.jacobian(x) - f.jacobian(x);
        const double ej = Eigen::JacobiSVD<Mat>(dj).singularValues()(0);
        out.sup_jacobian = std::max(out.sup_jacobian, ej);
    });
    return out;
}

inline C1Error c1_error(const ApproxNetwork& net, const VectorField& g, const Box& box, int res)
{
    return c1_error(net.field(), g, box, res);
}

/// Value-only grid sup; cheaper than c1_error when the Jacobian term is not needed.
inline double sup_value_error(const ApproxNetwork& net, const VectorField& g, const Box& box, int res)
{
    double sup = 0.0;
    for_each_grid_node(box, res, [&](const Vec& x) { sup = std::max(sup, (g(x) - net.eval(x)).norm()); });
    return sup;
}

struct SideConditions {
    std::array<double, 3> residual_norm{};  // ||f(a_i e_i)||
    std::array<double, 3> unstable_push{};  // <f(a_i e_i), e_i^u>
    std::array<bool, 3> nonvanishing{};
    std::array<bool, 3> positivity{};
    bool competitive_on_tube = false;
    int tube_points = 0;

    bool all_nonvanishing() const { return nonvanishing[0] && nonvanishing[1] && nonvanishing[2]; }
    bool all_positive() const { return positivity[0] && positivity[1] && positivity[2]; }
};

/**
 * Nonvanishing and positivity at the target's saddles, and strict competitivity
 * of f on points of the tube around the cycle. The cycle itself lies in the
 * coordinate planes where the target's off-diagonal derivatives vanish, so the
 * tube samples are the reference points shifted by tube_radius / 2 along
 * (1, 1, 1) / sqrt(3), into the open orthant.
 */
inline SideConditions check_side_conditions(const VectorField& f, const lv::LotkaVolterra& target,
                                            double tube_radius = 0.15, double nonvanishing_tol = 1e-8)
{
    SideConditions sc;
    for (int i = 0; i < 3; ++i) {
        const Vec xb = target.equilibrium(i);
        const Vec fx = f(xb);
        sc.residual_norm[i] = fx.norm();
        sc.unstable_push[i] = fx.dot(lv::lv_jacobian_at_equilibrium(target, i).unstable_eigvec);
        sc.nonvanishing[i] = sc.residual_norm[i] > nonvanishing_tol;
        sc.positivity[i] = sc.unstable_push[i] > 0.0;
    }
    const lv::CycleReference ref = lv::heteroclinic_reference(target, 0.05);
    const Vec shift = Vec::Constant(3, 0.5 * tube_radius / std::sqrt(3.0));
    sc.competitive_on_tube = true;
    for (const Vec& q : ref.points) {
        const Mat j = f.jacobian(q + shift);
        ++sc.tube_points;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                if (r != c && !(j(r, c) < 0.0))
                    sc.competitive_on_tube = false;
    }
    return sc;
}

inline SideConditions check_side_conditions(const ApproxNetwork& net, const lv::LotkaVolterra& target,
                                            double tube_radius = 0.15)
{
    return check_side_conditions(net.field(), target, tube_radius);
}

} // namespace seqdyn::approx
