#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "seqdyn/core/activation.hpp"
#include "seqdyn/core/types.hpp"
#include "seqdyn/core/vector_field.hpp"

namespace seqdyn::nfield {

/**
 * Discrete neural-field system x' = -x + sigma(W x + b) together with the
 * equilibria it was constructed to have (columns of `equilibria()`).
 *
 * The axial variant places equilibria at a_i e_i and fixes
 *     W = A - b u^T,  A = diag(sigma^{-1}(a_i) / a_i),  u_i = 1 / a_i.
 * The perturbed variant uses an invertible equilibrium matrix X and
 *     W = (sigma^{-1}(X) - b 1^T) X^{-1}.
 */
class NeuralFieldSystem {
public:
    int dim() const { return static_cast<int>(b_.size()); }
    const Mat& W() const { return w_; }
    const Vec& b() const { return b_; }
    const Activation& sigma() const { return sigma_; }
    const Mat& equilibria() const { return x_; }
    bool axial() const { return axial_; }
    /// Axial amplitudes a_i (diagonal of the equilibrium matrix in the axial case).
    Vec amplitudes() const { return x_.diagonal(); }

    Vec eval(const Vec& x) const { return -x + sigma_.value(Vec(w_ * x + b_)); }

    Mat jacobian(const Vec& x) const
    {
        const Vec d = sigma_.derivative(Vec(w_ * x + b_));
        return -Mat::Identity(dim(), dim()) + d.asDiagonal() * w_;
    }

    VectorField field() const
    {
        return {dim(), [self = *this](const Vec& x) { return self.eval(x); },
                [self = *this](const Vec& x) { return self.jacobian(x); }, "neural_field"};
    }

    /// max_k ||f(column_k)||_inf
    double equilibrium_residual() const
    {
        double r = 0.0;
        for (Eigen::Index k = 0; k < x_.cols(); ++k)
            r = std::max(r, eval(x_.col(k)).cwiseAbs().maxCoeff());
        return r;
    }

    static NeuralFieldSystem from_parts(Mat W, Vec b, Activation sigma, Mat X, bool axial)
    {
        require(W.rows() == W.cols() && W.rows() == b.size(), "NeuralFieldSystem: shape mismatch");
        require(X.rows() == b.size() && X.cols() == b.size(), "NeuralFieldSystem: equilibria shape mismatch");
        NeuralFieldSystem s;
        s.w_ = std::move(W);
        s.b_ = std::move(b);
        s.sigma_ = sigma;
        s.x_ = std::move(X);
        s.axial_ = axial;
        return s;
    }

private:
    Mat w_;
    Vec b_;
    Activation sigma_;
    Mat x_;
    bool axial_ = true;
};

inline NeuralFieldSystem build_axial(const Vec& a, const Vec& b, Activation sigma = {})
{
    const auto n = a.size();
    require(n >= 3, "build_axial: need n >= 3");
    require(b.size() == n, "build_axial: a and b must have the same length");
    for (Eigen::Index i = 0; i < n; ++i) {
        require(a[i] > 0.0 && a[i] < 1.0,
                "build_axial: a_i must lie in (0, 1) (every positive equilibrium satisfies a_i < 1)");
        require(b[i] > 0.0, "build_axial: b_i must be positive");
    }
    Vec diag(n), u(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        diag[i] = sigma.inverse(a[i]) / a[i];
        u[i] = 1.0 / a[i];
    }
    Mat w = Mat(diag.asDiagonal()) - b * u.transpose();
    return NeuralFieldSystem::from_parts(std::move(w), b, sigma, Mat(a.asDiagonal()), true);
}

struct PerturbedBuild {
    NeuralFieldSystem system;
    double condition_number = 0.0;
};

inline double condition_number(const Mat& m)
{
    Eigen::JacobiSVD<Mat> svd(m);
    const Vec& s = svd.singularValues();
    return s[s.size() - 1] > 0.0 ? s[0] / s[s.size() - 1] : std::numeric_limits<double>::infinity();
}

/// Rejects X_eps when its 2-norm condition number exceeds max_condition.
inline PerturbedBuild build_perturbed(const Mat& x_eps, const Vec& b, Activation sigma = {},
                                      double max_condition = 1e10)
{
    const auto n = b.size();
    require(x_eps.rows() == n && x_eps.cols() == n, "build_perturbed: X must be n x n");
    for (Eigen::Index i = 0; i < n; ++i)
        require(b[i] > 0.0, "build_perturbed: b_i must be positive");
    require((x_eps.array().abs() < 1.0).all(), "build_perturbed: entries of X must lie in (-1, 1)");
    const double cond = condition_number(x_eps);
    if (!(cond < max_condition)) {
        std::ostringstream os;
        os << "build_perturbed: X is singular or ill-conditioned (cond = " << cond << ")";
        throw PreconditionError(os.str());
    }
    Mat lhs = sigma.inverse(x_eps) - b * Vec::Ones(n).transpose();
    // W X = lhs  <=>  X^T W^T = lhs^T
    Mat w = x_eps.transpose().partialPivLu().solve(lhs.transpose()).transpose();
    return {NeuralFieldSystem::from_parts(std::move(w), b, sigma, x_eps, false), cond};
}

} // namespace seqdyn::nfield
