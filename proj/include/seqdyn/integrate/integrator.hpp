#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "seqdyn/core/trajectory.hpp"
#include "seqdyn/core/vector_field.hpp"

namespace seqdyn {

enum class IntegratorMethod { rk4_fixed, rkf45_adaptive };

struct IntegratorConfig {
    IntegratorMethod method = IntegratorMethod::rkf45_adaptive;
    double dt = 1e-2;      // fixed step, or initial step for the adaptive method
    double rtol = 1e-9;
    double atol = 1e-11;
    double t_max = 200.0;
    double max_dt = 0.5;   // adaptive step ceiling, keeps the Hermite interpolant accurate
    std::int64_t max_steps = 5'000'000;

    void validate() const
    {
        require(dt > 0.0, "IntegratorConfig: dt must be positive");
        require(rtol > 0.0 && atol > 0.0, "IntegratorConfig: tolerances must be positive");
        require(t_max > 0.0, "IntegratorConfig: t_max must be positive");
        require(max_dt > 0.0, "IntegratorConfig: max_dt must be positive");
        require(max_steps > 0, "IntegratorConfig: max_steps must be positive");
    }
};

enum class IntegrationStatus { ok, step_underflow, max_steps_exceeded, non_finite_state };

constexpr std::string_view status_name(IntegrationStatus s)
{
    switch (s) {
    case IntegrationStatus::ok:
        return "ok";
    case IntegrationStatus::step_underflow:
        return "step_underflow";
    case IntegrationStatus::max_steps_exceeded:
        return "max_steps_exceeded";
    case IntegrationStatus::non_finite_state:
        return "non_finite_state";
    }
    return "unknown";
}

/// Trajectory plus termination status; on failure the trajectory holds everything up to the failure.
struct IntegrationResult {
    Trajectory trajectory;
    IntegrationStatus status = IntegrationStatus::ok;
    std::string message;
    std::int64_t rejected_steps = 0;

    bool ok() const { return status == IntegrationStatus::ok; }
};

namespace detail {

// Fehlberg 4(5) tableau
struct Fehlberg {
    static constexpr double c2 = 1.0 / 4, c3 = 3.0 / 8, c4 = 12.0 / 13, c5 = 1.0, c6 = 1.0 / 2;
    static constexpr double a21 = 1.0 / 4;
    static constexpr double a31 = 3.0 / 32, a32 = 9.0 / 32;
    static constexpr double a41 = 1932.0 / 2197, a42 = -7200.0 / 2197, a43 = 7296.0 / 2197;
    static constexpr double a51 = 439.0 / 216, a52 = -8.0, a53 = 3680.0 / 513, a54 = -845.0 / 4104;
    static constexpr double a61 = -8.0 / 27, a62 = 2.0, a63 = -3544.0 / 2565, a64 = 1859.0 / 4104,
                            a65 = -11.0 / 40;
    static constexpr double b1 = 16.0 / 135, b3 = 6656.0 / 12825, b4 = 28561.0 / 56430, b5 = -9.0 / 50,
                            b6 = 2.0 / 55;
    // b(5th) - b(4th)
    static constexpr double e1 = 16.0 / 135 - 25.0 / 216, e3 = 6656.0 / 12825 - 1408.0 / 2565,
                            e4 = 28561.0 / 56430 - 2197.0 / 4104, e5 = -9.0 / 50 + 1.0 / 5, e6 = 2.0 / 55;
};

} // namespace detail

template <typename Field>
IntegrationResult integrate_rk4(const Field& field, const Vec& x0, const IntegratorConfig& cfg)
{
    IntegrationResult res;
    res.trajectory = Trajectory(static_cast<int>(x0.size()));
    Vec x = x0;
    Vec k1 = field(x);
    double t = 0.0;
    res.trajectory.push_back(t, x, k1);
    const auto n_steps = static_cast<std::int64_t>(std::ceil(cfg.t_max / cfg.dt - 1e-9));
    if (n_steps > cfg.max_steps) {
        res.status = IntegrationStatus::max_steps_exceeded;
        res.message = "rk4: t_max / dt exceeds max_steps";
        return res;
    }
    for (std::int64_t k = 0; k < n_steps; ++k) {
        const double h = std::min(cfg.dt, cfg.t_max - t);
        const Vec k2 = field(x + 0.5 * h * k1);
        const Vec k3 = field(x + 0.5 * h * k2);
        const Vec k4 = field(x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = (k + 1 == n_steps) ? cfg.t_max : t + h;
        k1 = field(x);
        if (!x.allFinite() || !k1.allFinite()) {
            res.status = IntegrationStatus::non_finite_state;
            res.message = "rk4: non-finite state at t=" + std::to_string(t);
            return res;
        }
        res.trajectory.push_back(t, x, k1);
    }
    return res;
}

template <typename Field>
IntegrationResult integrate_rkf45(const Field& field, const Vec& x0, const IntegratorConfig& cfg)
{
    using F = detail::Fehlberg;
    IntegrationResult res;
    res.trajectory = Trajectory(static_cast<int>(x0.size()));
    Vec x = x0;
    Vec k1 = field(x);
    if (!x.allFinite() || !k1.allFinite()) {
        res.status = IntegrationStatus::non_finite_state;
        res.message = "rkf45: non-finite initial state";
        return res;
    }
    double t = 0.0;
    double h = std::min(cfg.dt, cfg.max_dt);
    res.trajectory.push_back(t, x, k1);

    std::int64_t steps = 0;
    while (t < cfg.t_max) {
        if (steps >= cfg.max_steps) {
            res.status = IntegrationStatus::max_steps_exceeded;
            res.message = "rkf45: max_steps reached at t=" + std::to_string(t);
            return res;
        }
        h = std::min({h, cfg.max_dt, cfg.t_max - t});
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            res.status = IntegrationStatus::step_underflow;
            res.message = "rkf45: step size underflow at t=" + std::to_string(t);
            return res;
        }
        const Vec k2 = field(x + h * (F::a21 * k1));
        const Vec k3 = field(x + h * (F::a31 * k1 + F::a32 * k2));
        const Vec k4 = field(x + h * (F::a41 * k1 + F::a42 * k2 + F::a43 * k3));
        const Vec k5 = field(x + h * (F::a51 * k1 + F::a52 * k2 + F::a53 * k3 + F::a54 * k4));
        const Vec k6 =
            field(x + h * (F::a61 * k1 + F::a62 * k2 + F::a63 * k3 + F::a64 * k4 + F::a65 * k5));
        const Vec x_new = x + h * (F::b1 * k1 + F::b3 * k3 + F::b4 * k4 + F::b5 * k5 + F::b6 * k6);
        const Vec err = h * (F::e1 * k1 + F::e3 * k3 + F::e4 * k4 + F::e5 * k5 + F::e6 * k6);

        double err_norm = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double scale = cfg.atol + cfg.rtol * std::max(std::abs(x[i]), std::abs(x_new[i]));
            err_norm = std::max(err_norm, std::abs(err[i]) / scale);
        }
        if (!std::isfinite(err_norm)) {
            // shrink hard; a genuinely non-finite field shows up as underflow or below
            if (!x_new.allFinite() && h < 1e-10) {
                res.status = IntegrationStatus::non_finite_state;
                res.message = "rkf45: non-finite stage values at t=" + std::to_string(t);
                return res;
            }
            h *= 0.1;
            ++res.rejected_steps;
            continue;
        }
        if (err_norm <= 1.0) {
            t = (cfg.t_max - t - h < 1e-12 * std::max(1.0, cfg.t_max)) ? cfg.t_max : t + h;
            x = x_new;
            k1 = field(x);
            if (!x.allFinite() || !k1.allFinite()) {
                res.status = IntegrationStatus::non_finite_state;
                res.message = "rkf45: non-finite state at t=" + std::to_string(t);
                return res;
            }
            res.trajectory.push_back(t, x, k1);
            ++steps;
        } else {
            ++res.rejected_steps;
        }
        const double factor = err_norm == 0.0 ? 5.0 : 0.9 * std::pow(err_norm, -0.2);
        h *= std::clamp(factor, 0.2, 5.0);
    }
    return res;
}

/// Integrates x' = field(x) from t = 0 to cfg.t_max.
template <typename Field>
IntegrationResult integrate(const Field& field, const Vec& x0, const IntegratorConfig& cfg = {})
{
    cfg.validate();
    require(x0.size() > 0 && x0.allFinite(), "integrate: initial state must be finite and nonempty");
    return cfg.method == IntegratorMethod::rk4_fixed ? integrate_rk4(field, x0, cfg)
                                                     : integrate_rkf45(field, x0, cfg);
}

} // namespace seqdyn
