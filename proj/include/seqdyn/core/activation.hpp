#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "seqdyn/core/types.hpp"

namespace seqdyn {

enum class ActivationKind { tanh, scaled_logistic };

/**
 * Odd sigmoidal nonlinearity normalized so that sigma(0) = 0 and sigma'(0) = 1,
 * with range (-range_low, range_high).
 *
 * scaled_logistic is 2 / (1 + exp(-2 s)) - 1. The factor 2 on the argument
 * restores the unit slope at the origin; without it the logistic variant has
 * sigma'(0) = 1/2.
 */
class Activation {
public:
    constexpr Activation() = default;
    constexpr explicit Activation(ActivationKind kind) : kind_(kind) {}

    constexpr ActivationKind kind() const { return kind_; }

    // alpha and beta: sigma(R) = (-alpha, beta)
    constexpr double range_low() const { return 1.0; }
    constexpr double range_high() const { return 1.0; }

    double value(double s) const
    {
        switch (kind_) {
        case ActivationKind::tanh:
            return std::tanh(s);
        case ActivationKind::scaled_logistic:
            return 2.0 / (1.0 + std::exp(-2.0 * s)) - 1.0;
        }
        return 0.0;
    }

    double derivative(double s) const
    {
        switch (kind_) {
        case ActivationKind::tanh: {
            const double t = std::tanh(s);
            return 1.0 - t * t;
        }
        case ActivationKind::scaled_logistic: {
            // 4 l (1 - l) with l the logistic at 2s; written via exp(-2|s|) to avoid overflow
            const double e = std::exp(-2.0 * std::abs(s));
            return 4.0 * e / ((1.0 + e) * (1.0 + e));
        }
        }
        return 0.0;
    }

    double second_derivative(double s) const
    {
        // both kinds coincide with tanh analytically: sigma'' = -2 sigma sigma'
        const double v = value(s);
        return -2.0 * v * derivative(s);
    }

    /// Closed-form inverse on (-alpha, beta); throws outside.
    double inverse(double y) const
    {
        if (!(y > -range_low() && y < range_high()))
            throw PreconditionError("activation inverse: argument " + std::to_string(y) +
                                    " outside the open range (-1, 1)");
        switch (kind_) {
        case ActivationKind::tanh:
            return std::atanh(y);
        case ActivationKind::scaled_logistic: {
            const double p = 0.5 * (1.0 + y);
            return 0.5 * std::log(p / (1.0 - p));
        }
        }
        return 0.0;
    }

    Vec value(const Vec& s) const { return s.unaryExpr([this](double v) { return value(v); }); }
    Vec derivative(const Vec& s) const
    {
        return s.unaryExpr([this](double v) { return derivative(v); });
    }
    Mat inverse(const Mat& y) const { return y.unaryExpr([this](double v) { return inverse(v); }); }

    /// Entrywise sigma on a matrix through the vectorized exponential, 1 - 2 / (exp(2 s) + 1),
    /// which is the closed form of both kinds; agrees with the scalar path to a few ulp.
    Mat value(const Mat& s) const { return (1.0 - 2.0 / ((2.0 * s.array()).exp() + 1.0)).matrix(); }

    /// sigma' expressed through sigma itself: 1 - sigma^2 for both kinds.
    static double derivative_from_value(double v) { return 1.0 - v * v; }

    std::string name() const { return std::string(kind_name(kind_)); }

    static constexpr std::string_view kind_name(ActivationKind k)
    {
        return k == ActivationKind::tanh ? "tanh" : "scaled_logistic";
    }

    static std::optional<ActivationKind> parse(std::string_view s)
    {
        if (s == "tanh")
            return ActivationKind::tanh;
        if (s == "scaled_logistic" || s == "logistic")
            return ActivationKind::scaled_logistic;
        return std::nullopt;
    }

private:
    ActivationKind kind_ = ActivationKind::tanh;
};

struct SigmaEval {
    double value;
    double derivative;
};

inline SigmaEval eval_sigma(const Activation& fn, double s)
{
    require(std::isfinite(s), "eval_sigma: non-finite argument");
    return {fn.value(s), fn.derivative(s)};
}

} // namespace seqdyn
