#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "seqdyn/core/grid.hpp"
#include "seqdyn/nfield/neural_field.hpp"

namespace seqdyn::nfield {

/**
 * Field of a neural-field system in coordinates v = X^{-1} x that map the
 * equilibrium columns of X to the canonical basis:
 *
 *     F(v) = -v + X^{-1} sigma(z(v)),  z(v) = (sigma^{-1}(X) - b 1^T) v + b.
 */
class NormalizedField {
public:
    NormalizedField(const Mat& x, const Vec& b, Activation sigma)
        : x_inv_(x.inverse()), dz_(sigma.inverse(x) - b * Vec::Ones(b.size()).transpose()), b_(b), sigma_(sigma)
    {
    }

    Vec eval(const Vec& v) const { return -v + x_inv_ * sigma_.value(Vec(dz_ * v + b_)); }

    Mat jacobian(const Vec& v) const
    {
        const Vec d = sigma_.derivative(Vec(dz_ * v + b_));
        return -Mat::Identity(v.size(), v.size()) + x_inv_ * d.asDiagonal() * dz_;
    }

private:
    Mat x_inv_;
    Mat dz_;
    Vec b_;
    Activation sigma_;
};

struct ConvergenceRow {
    double eps = 0.0;
    double sup_value = 0.0;    // sup |F_eps - F|
    double sup_jacobian = 0.0; // sup ||DF_eps - DF||_2
    bool valid = true;
    std::string reason;

    double c1() const { return sup_value + sup_jacobian; }
};

/// X_eps = diag(a) + eps * E_dir / ||E_dir||_2.
inline Mat perturbed_equilibria(const Vec& a, const Mat& e_direction, double eps)
{
    const Mat base = a.asDiagonal();
    if (eps == 0.0)
        return base;
    const double norm = e_direction.operatorNorm();
    require(norm > 0.0, "perturbed_equilibria: zero perturbation direction");
    return base + (eps / norm) * e_direction;
}

/**
 * Sup-norm distances between the perturbed and unperturbed normalized fields
 * on a regular grid over `box` (`res` nodes per axis). Entries whose X_eps is
 * singular or leaves (-1, 1) are kept with valid = false and a reason.
 */
inline std::vector<ConvergenceRow> perturbation_convergence(const Vec& a, const Vec& b, Activation sigma,
                                                            const Mat& e_direction,
                                                            const std::vector<double>& eps_list,
                                                            const Box& box, int res = 21)
{
    const auto n = a.size();
    require(box.dim() == n, "perturbation_convergence: box dimension mismatch");
    const NormalizedField base(Mat(a.asDiagonal()), b, sigma);
    std::vector<ConvergenceRow> rows;
    for (double eps : eps_list) {
        ConvergenceRow row;
        row.eps = eps;
        const Mat x_eps = perturbed_equilibria(a, e_direction, eps);
        if (!((x_eps.array().abs() < 1.0).all())) {
            row.valid = false;
            row.reason = "X_eps has entries outside (-1, 1)";
            rows.push_back(row);
            continue;
        }
        if (!(condition_number(x_eps) < 1e10)) {
            row.valid = false;
            row.reason = "X_eps is singular";
            rows.push_back(row);
            continue;
        }
        const NormalizedField pert(x_eps, b, sigma);
        for_each_grid_node(box, res, [&](const Vec& v) {
            row.sup_value = std::max(row.sup_value, (pert.eval(v) - base.eval(v)).norm());
            row.sup_jacobian =
                std::max(row.sup_jacobian, (pert.jacobian(v) - base.jacobian(v)).operatorNorm());
        });
        rows.push_back(row);
    }
    return rows;
}

} // namespace seqdyn::nfield
