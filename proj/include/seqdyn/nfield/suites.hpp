#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "seqdyn/integrate/integrator.hpp"
#include "seqdyn/nfield/lyapunov.hpp"
#include "seqdyn/nfield/perturbation.hpp"
#include "seqdyn/nfield/spectrum.hpp"

namespace seqdyn::nfield {

/// Property suites over random axial systems: a_i ~ U(0.2, 0.9), b_i ~ U(0.1, 1.0), tanh.

struct AxialDraw {
    std::uint64_t seed = 0;
    Vec a;
    Vec b;
};

/// Seed of draw k at dimension n; recorded in reports so any single draw can be replayed.
inline std::uint64_t draw_seed(std::uint64_t seed, int n, int k)
{
    return seed * 0x9E3779B97F4A7C15ULL + (static_cast<std::uint64_t>(n) << 32) + static_cast<std::uint64_t>(k);
}

inline AxialDraw random_axial_draw(int n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ua(0.2, 0.9), ub(0.1, 1.0);
    AxialDraw d{seed, Vec(n), Vec(n)};
    for (int i = 0; i < n; ++i) {
        d.a[i] = ua(rng);
        d.b[i] = ub(rng);
    }
    return d;
}

struct LyapunovCheck {
    int points = 0;
    int derivative_violations = 0; // dV/dt > slack
    int strictness_violations = 0; // dV/dt >= 0 farther than 1e-3 from every axial vertex
    int form_disagreements = 0;    // chain-rule and factored forms differ by more than 1e-9
    int trajectories = 0;
    int monotonicity_violations = 0; // V increases by more than slack between stored nodes
    int visit_violations = 0;        // V not lower on entering the next equilibrium ball
    int integration_failures = 0;
    double max_derivative = -std::numeric_limits<double>::infinity();

    bool passed() const
    {
        return derivative_violations == 0 && strictness_violations == 0 && form_disagreements == 0 &&
               monotonicity_violations == 0 && visit_violations == 0 && integration_failures == 0;
    }
};

struct LyapunovSuiteOptions {
    int points = 500;
    int trajectories = 10;
    double slack = 1e-8;
    double t_max = 30.0;
    double visit_radius = 0.05; // normalized coordinates
};

namespace detail {

// uniform point in Q, kept 2% away from its faces
inline Vec random_in_q(std::mt19937_64& rng, const Vec& a, double scale = 1.0)
{
    std::uniform_real_distribution<double> u(-0.98, 0.98);
    Vec v(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        v[i] = scale * u(rng) / a[i];
    return v;
}

inline double distance_to_vertices(const Vec& v)
{
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        Vec d = v;
        d[i] -= 1.0;
        best = std::min(best, d.norm());
    }
    return best;
}

} // namespace detail

/**
 * Samples dV/dt at random points of Q and follows trajectories from random starts.
 * Along each trajectory, the V value on first entering the ball of one axial vertex
 * must lie below the V value on last leaving the previously visited one.
 */
inline LyapunovCheck lyapunov_suite(const NeuralFieldSystem& sys, std::uint64_t seed, const LyapunovSuiteOptions& opt = {})
{
    const LyapunovEvaluator ev(sys);
    const Vec a = sys.amplitudes();
    const int n = sys.dim();
    std::mt19937_64 rng(seed);
    LyapunovCheck out;

    for (int k = 0; k < opt.points; ++k) {
        const Vec v = detail::random_in_q(rng, a);
        const double dv = lyapunov_derivative(ev, sys, v);
        const double fac = ev.derivative_factored(v);
        ++out.points;
        out.max_derivative = std::max(out.max_derivative, dv);
        if (dv > opt.slack)
            ++out.derivative_violations;
        if (detail::distance_to_vertices(v) > 1e-3 && !(dv < 0.0))
            ++out.strictness_violations;
        if (std::abs(dv - fac) > 1e-9)
            ++out.form_disagreements;
    }

    const VectorField f(n, [&](const Vec& v) { return normalized_field(sys, v); }, {}, "normalized");
    IntegratorConfig cfg;
    cfg.t_max = opt.t_max;
    for (int k = 0; k < opt.trajectories; ++k) {
        ++out.trajectories;
        const auto res = integrate(f, detail::random_in_q(rng, a, 0.5), cfg);
        if (!res.ok()) {
            ++out.integration_failures;
            continue;
        }
        const Trajectory& tr = res.trajectory;
        int current = -1;   // index of the ball the orbit is in, -1 outside all
        int last_ball = -1;
        double v_leave = 0.0, prev = 0.0;
        for (std::size_t s = 0; s < tr.size(); ++s) {
            const Vec& v = tr.state(s);
            const double val = ev.value(v);
            if (s > 0 && val > prev + opt.slack)
                ++out.monotonicity_violations;
            int ball = -1;
            for (int i = 0; i < n; ++i) {
                Vec d = v;
                d[i] -= 1.0;
                if (d.norm() < opt.visit_radius)
                    ball = i;
            }
            if (ball != current) {
                if (current >= 0) {
                    last_ball = current;
                    v_leave = prev;
                }
                if (ball >= 0 && last_ball >= 0 && !(val < v_leave + opt.slack))
                    ++out.visit_violations;
                current = ball;
            }
            prev = val;
        }
    }
    return out;
}

struct SpectralCheck {
    int equilibria = 0;
    int count_violations = 0;  // fewer than n-2 positive or no negative eigenvalue
    int imag_violations = 0;   // |Im| >= 1e-9
    int secular_mismatches = 0; // secular root differs from the eigensolver by more than 1e-8
    double max_secular_gap = 0.0;
    int min_positive = std::numeric_limits<int>::max();

    bool passed() const { return count_violations == 0 && imag_violations == 0 && secular_mismatches == 0; }
};

inline SpectralCheck spectral_suite(const NeuralFieldSystem& sys)
{
    SpectralCheck out;
    const int n = sys.dim();
    for (int i = 0; i < n; ++i) {
        const AxialSpectrum sp = axial_spectrum(sys, i);
        const std::vector<double> sec = secular_spectrum(sys, i);
        ++out.equilibria;
        out.min_positive = std::min(out.min_positive, sp.n_positive);
        if (sp.n_positive < n - 2 || sp.n_negative < 1)
            ++out.count_violations;
        if (!(sp.max_imag < 1e-9))
            ++out.imag_violations;
        double gap = sec.size() == sp.eigenvalues.size() ? 0.0 : std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < std::min(sec.size(), sp.eigenvalues.size()); ++m)
            gap = std::max(gap, std::abs(sec[m] - sp.eigenvalues[m]));
        out.max_secular_gap = std::max(out.max_secular_gap, gap);
        if (!(gap <= 1e-8))
            ++out.secular_mismatches;
    }
    return out;
}

struct PerturbationCheck {
    std::vector<ConvergenceRow> rows;
    std::vector<double> residuals; // equilibrium residual of each constructed system
    std::vector<double> ratios;    // c1 ratio between successive eps
    bool monotone = false;
    bool ratios_in_band = false;
    bool residuals_ok = false;
    double largest_eps_v_decreasing = 0.0; // 0 when no tested eps keeps V decreasing

    bool passed() const { return monotone && ratios_in_band && residuals_ok; }
};

struct PerturbationSuiteOptions {
    std::vector<double> eps{1e-2, 1e-3, 1e-4};
    int res = 21;             // grid nodes per axis over [0, 1]^n
    double ratio_lo = 0.05;
    double ratio_hi = 0.2;
    int trajectories = 3;     // for the V-decrease surrogate
    double t_max = 30.0;
};

/// Grid resolution keeping res^n near 21^3 nodes.
inline int perturbation_grid_res(int n)
{
    return std::max(3, static_cast<int>(std::floor(std::pow(9261.0, 1.0 / n) + 1e-9)));
}

/**
 * Perturbs the axial equilibria along a random unit direction, checks the equilibrium
 * residual of every constructed system and the first-order shrinkage of the C^1 distance.
 * Also reports the largest eps for which the unperturbed V still decreases along
 * trajectories of the perturbed field (a numeric surrogate, no bound is claimed).
 */
inline PerturbationCheck perturbation_suite(const Vec& a, const Vec& b, std::uint64_t seed,
                                            const PerturbationSuiteOptions& opt = {}, Activation sigma = {})
{
    const auto n = static_cast<int>(a.size());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    const Mat dir = Mat::NullaryExpr(n, n, [&]() { return nd(rng); });
    PerturbationCheck out;
    out.rows = perturbation_convergence(a, b, sigma, dir, opt.eps, Box::cube(n, 0.0, 1.0), opt.res);

    out.residuals_ok = true;
    const NeuralFieldSystem base = build_axial(a, b, sigma);
    const LyapunovEvaluator ev(base);
    std::vector<Vec> starts;
    for (int k = 0; k < opt.trajectories; ++k)
        starts.push_back(detail::random_in_q(rng, a, 0.5));
    for (const auto& row : out.rows) {
        if (!row.valid) {
            out.residuals.push_back(std::numeric_limits<double>::quiet_NaN());
            out.residuals_ok = false;
            continue;
        }
        const Mat x = perturbed_equilibria(a, dir, row.eps);
        const PerturbedBuild built = build_perturbed(x, b, sigma);
        const double r = built.system.equilibrium_residual();
        out.residuals.push_back(r);
        if (!(r < 1e-12))
            out.residuals_ok = false;

        const NormalizedField field(x, b, sigma);
        const VectorField f(n, [&](const Vec& v) { return field.eval(v); }, {}, "perturbed");
        IntegratorConfig cfg;
        cfg.t_max = opt.t_max;
        bool decreasing = true;
        for (const Vec& v0 : starts) {
            const auto res = integrate(f, v0, cfg);
            if (!res.ok()) {
                decreasing = false;
                break;
            }
            double prev = std::numeric_limits<double>::infinity();
            for (const Vec& v : res.trajectory.states()) {
                if (!ev.in_domain(v)) {
                    decreasing = false;
                    break;
                }
                const double val = ev.value(v);
                if (val > prev + 1e-10)
                    decreasing = false;
                prev = val;
            }
        }
        if (decreasing)
            out.largest_eps_v_decreasing = std::max(out.largest_eps_v_decreasing, row.eps);
    }

    out.monotone = out.residuals_ok;
    out.ratios_in_band = out.residuals_ok;
    for (std::size_t k = 1; k < out.rows.size(); ++k) {
        const double ratio = out.rows[k].c1() / out.rows[k - 1].c1();
        out.ratios.push_back(ratio);
        if (!(ratio < 1.0))
            out.monotone = false;
        if (!(ratio >= opt.ratio_lo && ratio <= opt.ratio_hi))
            out.ratios_in_band = false;
    }
    return out;
}

} // namespace seqdyn::nfield
