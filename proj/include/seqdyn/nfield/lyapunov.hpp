#pragma once

#include <cmath>
#include <functional>

#include "seqdyn/core/activation.hpp"
#include "seqdyn/nfield/neural_field.hpp"

namespace seqdyn {

namespace detail {

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                           double fm, double fb, double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol (signed for b < a).
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                               int max_depth = 50)
{
    if (a == b)
        return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

} // namespace seqdyn

namespace seqdyn::nfield {

/**
 * Lyapunov-like function for an axial neural-field system in normalized
 * coordinates v_i = x_i / a_i:
 *
 *     V(v) = u(v)^2 / 2 + sum_i int_0^{v_i} q_i(r) dr,
 *     u(v) = 1 - sum_k v_k,   q_i(r) = (sigma^{-1}(a_i r) - s_i r) / b_i,   s_i = sigma^{-1}(a_i).
 *
 * Defined on the open cube Q = prod_i (-alpha / a_i, beta / a_i).
 */
class LyapunovEvaluator {
public:
    explicit LyapunovEvaluator(const NeuralFieldSystem& sys, double quad_tol = 1e-10)
        : a_(sys.amplitudes()), b_(sys.b()), sigma_(sys.sigma()), quad_tol_(quad_tol)
    {
        require(sys.axial(), "LyapunovEvaluator: requires an axial system");
        s_.resize(a_.size());
        for (Eigen::Index i = 0; i < a_.size(); ++i)
            s_[i] = sigma_.inverse(a_[i]);
    }

    int dim() const { return static_cast<int>(a_.size()); }
    const Vec& a() const { return a_; }
    const Vec& b() const { return b_; }
    const Vec& s() const { return s_; }

    bool in_domain(const Vec& v) const
    {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const double y = a_[i] * v[i];
            if (!(y > -sigma_.range_low() && y < sigma_.range_high()))
                return false;
        }
        return true;
    }

    static double u(const Vec& v) { return 1.0 - v.sum(); }

    double q(int i, double r) const { return (sigma_.inverse(a_[i] * r) - s_[i] * r) / b_[i]; }

    double q_integral(int i, double v) const
    {
        return adaptive_simpson([this, i](double r) { return q(i, r); }, 0.0, v, quad_tol_);
    }

    double value(const Vec& v) const
    {
        check_domain(v);
        const double uu = u(v);
        double total = 0.5 * uu * uu;
        for (int i = 0; i < dim(); ++i)
            total += q_integral(i, v[i]);
        return total;
    }

    /// dV/dv_i = q_i(v_i) - u(v)
    Vec gradient(const Vec& v) const
    {
        check_domain(v);
        const double uu = u(v);
        Vec g(dim());
        for (int i = 0; i < dim(); ++i)
            g[i] = q(i, v[i]) - uu;
        return g;
    }

    /// m_i(v) = (b_i / a_i) * divided difference of sigma between s_i v_i + b_i u and sigma^{-1}(a_i v_i).
    Vec multipliers(const Vec& v) const
    {
        check_domain(v);
        const double uu = u(v);
        Vec m(dim());
        for (int i = 0; i < dim(); ++i) {
            const double z1 = s_[i] * v[i] + b_[i] * uu;
            const double z2 = sigma_.inverse(a_[i] * v[i]);
            const double dz = z1 - z2;
            const double slope = std::abs(dz) > 1e-7 * std::max(1.0, std::abs(z1))
                                     ? (sigma_.value(z1) - sigma_.value(z2)) / dz
                                     : sigma_.derivative(0.5 * (z1 + z2));
            m[i] = b_[i] / a_[i] * slope;
        }
        return m;
    }

    /// -sum_i m_i(v) (u(v) - q_i(v_i))^2
    double derivative_factored(const Vec& v) const
    {
        const Vec m = multipliers(v);
        const double uu = u(v);
        double total = 0.0;
        for (int i = 0; i < dim(); ++i) {
            const double d = uu - q(i, v[i]);
            total -= m[i] * d * d;
        }
        return total;
    }

private:
    void check_domain(const Vec& v) const
    {
        require(v.size() == a_.size(), "LyapunovEvaluator: dimension mismatch");
        if (!in_domain(v))
            throw PreconditionError("LyapunovEvaluator: v outside the domain cube Q");
    }

    Vec a_;
    Vec b_;
    Activation sigma_;
    double quad_tol_;
    Vec s_;
};

/// Field of the system in normalized coordinates, F(v) = f(a .* v) ./ a.
inline Vec normalized_field(const NeuralFieldSystem& sys, const Vec& v)
{
    const Vec a = sys.amplitudes();
    return sys.eval(Vec(a.cwiseProduct(v))).cwiseQuotient(a);
}

inline double lyapunov_value(const LyapunovEvaluator& ev, const Vec& v) { return ev.value(v); }

/// Chain-rule form grad V(v) . F(v) with F taken from the W-matrix representation of sys.
inline double lyapunov_derivative(const LyapunovEvaluator& ev, const NeuralFieldSystem& sys, const Vec& v)
{
    return ev.gradient(v).dot(normalized_field(sys, v));
}

} // namespace seqdyn::nfield
