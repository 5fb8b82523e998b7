#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "seqdyn/core/grid.hpp"
#include "seqdyn/core/types.hpp"
#include "seqdyn/core/vector_field.hpp"

namespace seqdyn::lv {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/**
 * Three-species competitive Lotka-Volterra system
 *
 *     g_i(x) = x_i (1 - sum_j rho_ij x_j)
 *
 * with coefficients chosen so that the axial equilibria a_i e_i are saddles
 * with one unstable eigenvalue lambda_u^i pointing to the next node and two
 * stable eigenvalues equal to -1. Indices are cyclic modulo 3:
 *
 *     rho_jj = 1 / a_j,  rho_{j+1, j} = (1 - lambda_u^j) / a_j,  rho_{j+2, j} = 2 / a_j.
 */
class LotkaVolterra {
public:
    static constexpr int dim = 3;

    LotkaVolterra(const Vec3& a, const Vec3& lambda_u) : LotkaVolterra(a, lambda_u, 0)
    {
        for (int i = 0; i < dim; ++i) {
            require(std::isfinite(a[i]) && a[i] > 0.0, "build_lv: a_i must be positive");
            require(lambda_u[i] > 0.0 && lambda_u[i] < 1.0,
                    "build_lv: lambda_u must lie in (0, 1); got " + std::to_string(lambda_u[i]));
        }
    }

    /// Same coefficient pattern without the (0, 1) check on lambda_u; for probing the boundary.
    static LotkaVolterra unchecked(const Vec3& a, const Vec3& lambda_u) { return {a, lambda_u, 0}; }

    const Vec3& a() const { return a_; }
    const Vec3& lambda_u() const { return lambda_u_; }
    const Mat3& rho() const { return rho_; }

    /// Equilibrium a_i e_i (0-based i).
    Vec3 equilibrium(int i) const
    {
        require(i >= 0 && i < dim, "LotkaVolterra: saddle index out of range");
        Vec3 x = Vec3::Zero();
        x[i] = a_[i];
        return x;
    }

    Vec eval(const Vec& x) const
    {
        const Vec3 xx = x;
        return xx.cwiseProduct(Vec3::Ones() - rho_ * xx);
    }

    // dg_i/dx_j = delta_ij (1 - (rho x)_i) - x_i rho_ij
    Mat jacobian(const Vec& x) const
    {
        const Vec3 xx = x;
        Mat3 j = -(xx.asDiagonal() * rho_);
        j.diagonal() += Vec3::Ones() - rho_ * xx;
        return j;
    }

    VectorField field() const
    {
        return {dim, [self = *this](const Vec& x) { return self.eval(x); },
                [self = *this](const Vec& x) { return self.jacobian(x); }, "lotka_volterra"};
    }

private:
    LotkaVolterra(const Vec3& a, const Vec3& lambda_u, int) : a_(a), lambda_u_(lambda_u)
    {
        rho_.setZero();
        for (int j = 0; j < dim; ++j) {
            rho_(j, j) = 1.0 / a[j];
            rho_((j + 1) % dim, j) = (1.0 - lambda_u[j]) / a[j];
            rho_((j + 2) % dim, j) = 2.0 / a[j];
        }
    }

    Vec3 a_;
    Vec3 lambda_u_;
    Mat3 rho_;
};

/// The same dynamics in log coordinates y = ln x on the open positive orthant: y' = 1 - rho exp(y).
inline VectorField log_field(const LotkaVolterra& sys)
{
    return {3,
            [rho = sys.rho()](const Vec& y) {
                const Vec3 x = y.array().exp();
                return Vec(Vec3::Ones() - rho * x);
            },
            [rho = sys.rho()](const Vec& y) {
                const Vec3 x = y.array().exp();
                return Mat(-(rho * x.asDiagonal()));
            },
            "lotka_volterra_log"};
}

inline LotkaVolterra build_lv(const Vec3& a, const Vec3& lambda_u) { return {a, lambda_u}; }

struct SaddleSpectrum {
    Vec3 eigenvalues;       // sorted descending
    Vec3 unstable_eigvec;   // unit, <e_u, e_{i+1}> > 0
    double max_imag = 0.0;
};

/// Eigen-decomposition of Dg(a_i e_i) through a general dense eigensolver.
inline SaddleSpectrum lv_jacobian_at_equilibrium(const LotkaVolterra& sys, int i)
{
    const Mat jac = sys.jacobian(sys.equilibrium(i));
    Eigen::EigenSolver<Mat> es(jac, true);
    if (es.info() != Eigen::Success)
        throw NumericError("lv_jacobian_at_equilibrium: eigensolver failed to converge");
    SaddleSpectrum out;
    std::array<int, 3> idx{0, 1, 2};
    const auto& ev = es.eigenvalues();
    std::sort(idx.begin(), idx.end(), [&](int p, int q) { return ev[p].real() > ev[q].real(); });
    for (int k = 0; k < 3; ++k) {
        out.eigenvalues[k] = ev[idx[k]].real();
        out.max_imag = std::max(out.max_imag, std::abs(ev[idx[k]].imag()));
    }
    Vec3 v = es.eigenvectors().col(idx[0]).real();
    v.normalize();
    if (v[(i + 1) % 3] < 0.0)
        v = -v;
    out.unstable_eigvec = v;
    return out;
}

struct SaddleValues {
    Vec3 nu;            // lambda_s^i / lambda_u^i
    double product = 0; // nu(Gamma)
    bool stable = false;
};

/// Saddle values with lambda_s = 1 (both stable eigenvalues are -1 by construction).
inline SaddleValues saddle_values(const LotkaVolterra& sys)
{
    SaddleValues out;
    out.product = 1.0;
    for (int i = 0; i < 3; ++i) {
        out.nu[i] = 1.0 / sys.lambda_u()[i];
        out.product *= out.nu[i];
    }
    out.stable = out.product > 1.0;
    return out;
}

/// Strict competitivity: every off-diagonal Jacobian entry < 0 at every grid node.
inline bool is_competitive(const VectorField& field, const Box& box, int res)
{
    bool ok = true;
    for_each_grid_node(box, res, [&](const Vec& x) {
        if (!ok)
            return;
        const Mat j = field.jacobian(x);
        for (Eigen::Index r = 0; r < j.rows(); ++r)
            for (Eigen::Index c = 0; c < j.cols(); ++c)
                if (r != c && !(j(r, c) < 0.0))
                    ok = false;
    });
    return ok;
}

} // namespace seqdyn::lv
