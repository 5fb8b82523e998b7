#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "seqdyn/core/types.hpp"

namespace seqdyn {

/// Central-difference Jacobian, column j = (F(x + h_j e_j) - F(x - h_j e_j)) / (2 h_j)
/// with h_j = h * max(1, |x_j|).
template <typename Field>
Mat finite_diff_jacobian(const Field& field, const Vec& x, double h = 1e-6)
{
    require(h > 0.0, "finite_diff_jacobian: step must be positive");
    const Eigen::Index n = x.size();
    Mat jac;
    Vec xp = x;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double hj = h * std::max(1.0, std::abs(x[j]));
        xp[j] = x[j] + hj;
        const Vec fp = field(xp);
        xp[j] = x[j] - hj;
        const Vec fm = field(xp);
        xp[j] = x[j];
        if (!fp.allFinite() || !fm.allFinite())
            throw NumericError("finite_diff_jacobian: non-finite field evaluation");
        if (j == 0)
            jac.resize(fp.size(), n);
        jac.col(j) = (fp - fm) / (2.0 * hj);
    }
    return jac;
}

/**
 * Type-erased autonomous vector field x -> F(x) on R^n with an optional
 * analytic Jacobian. Without one, jacobian() falls back to central differences.
 */
class VectorField {
public:
    using Eval = std::function<Vec(const Vec&)>;
    using Jacobian = std::function<Mat(const Vec&)>;

    VectorField() = default;
    VectorField(int dim, Eval eval, Jacobian jac = {}, std::string name = {})
        : dim_(dim), eval_(std::move(eval)), jac_(std::move(jac)), name_(std::move(name))
    {
        require(dim > 0, "VectorField: dimension must be positive");
    }

    int dim() const { return dim_; }
    const std::string& name() const { return name_; }
    bool has_analytic_jacobian() const { return static_cast<bool>(jac_); }

    Vec operator()(const Vec& x) const { return eval_(x); }

    Mat jacobian(const Vec& x) const
    {
        if (jac_)
            return jac_(x);
        return finite_diff_jacobian(*this, x);
    }

private:
    int dim_ = 0;
    Eval eval_;
    Jacobian jac_;
    std::string name_;
};

/// Largest relative deviation between the analytic and finite-difference Jacobians at x,
/// measured as ||J_a - J_fd||_max / max(1, ||J_fd||_max).
inline double jacobian_mismatch(const VectorField& field, const Vec& x, double h = 1e-6)
{
    const Mat fd = finite_diff_jacobian(field, x, h);
    const Mat an = field.jacobian(x);
    return (an - fd).cwiseAbs().maxCoeff() / std::max(1.0, fd.cwiseAbs().maxCoeff());
}

namespace fields {

inline VectorField identity(int n)
{
    return {n, [](const Vec& x) { return x; }, [n](const Vec&) { return Mat(Mat::Identity(n, n)); },
            "identity"};
}

inline VectorField linear_decay(int n)
{
    return {n, [](const Vec& x) { return Vec(-x); },
            [n](const Vec&) { return Mat(-Mat::Identity(n, n)); }, "decay"};
}

/// Planar rotation with angular speed omega (counter-clockwise).
inline VectorField rotation(double omega)
{
    return {2,
            [omega](const Vec& x) {
                Vec r(2);
                r << -omega * x[1], omega * x[0];
                return r;
            },
            [omega](const Vec&) {
                Mat j(2, 2);
                j << 0.0, -omega, omega, 0.0;
                return j;
            },
            "rotation"};
}

/// Hopf normal form r' = r (mu - r^2), theta' = omega; limit cycle of radius sqrt(mu), period 2 pi / omega.
inline VectorField hopf(double mu, double omega)
{
    return {2,
            [mu, omega](const Vec& x) {
                const double r2 = x.squaredNorm();
                Vec r(2);
                r << x[0] * (mu - r2) - omega * x[1], x[1] * (mu - r2) + omega * x[0];
                return r;
            },
            [mu, omega](const Vec& x) {
                const double r2 = x.squaredNorm();
                Mat j(2, 2);
                j << mu - r2 - 2.0 * x[0] * x[0], -2.0 * x[0] * x[1] - omega,
                    -2.0 * x[0] * x[1] + omega, mu - r2 - 2.0 * x[1] * x[1];
                return j;
            },
            "hopf"};
}

} // namespace fields

} // namespace seqdyn
