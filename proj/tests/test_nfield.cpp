#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "seqdyn/integrate/integrator.hpp"
#include "seqdyn/nfield/lyapunov.hpp"
#include "seqdyn/nfield/neural_field.hpp"
#include "seqdyn/nfield/perturbation.hpp"
#include "seqdyn/nfield/spectrum.hpp"
#include "seqdyn/nfield/suites.hpp"

using namespace seqdyn;
using namespace seqdyn::nfield;

namespace {

struct Draw {
    Vec a, b;
};

Draw random_axial(std::mt19937_64& rng, int n)
{
    std::uniform_real_distribution<double> ua(0.1, 0.9), ub(0.1, 1.0);
    Draw d{Vec(n), Vec(n)};
    for (int i = 0; i < n; ++i) {
        d.a[i] = ua(rng);
        d.b[i] = ub(rng);
    }
    return d;
}

// uniform point in the open cube Q, kept 2% away from its faces
Vec random_in_q(std::mt19937_64& rng, const Vec& a)
{
    std::uniform_real_distribution<double> u(-0.98, 0.98);
    Vec v(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        v[i] = u(rng) / a[i];
    return v;
}

} // namespace

TEST(NeuralField, AxialWeightsByHand)
{
    const Vec a = Vec::Constant(3, 0.5), b = Vec::Constant(3, 0.3);
    const auto sys = build_axial(a, b);
    // sigma^{-1}(0.5) / 0.5 = 2 atanh(0.5) = ln 3, and b_i / a_j = 0.6
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            EXPECT_NEAR(sys.W()(i, j), (i == j ? std::log(3.0) : 0.0) - 0.6, 1e-15);
    EXPECT_NEAR(2.0 * std::atanh(0.5), 1.09861228866810969, 1e-15);
    EXPECT_TRUE(sys.axial());
    EXPECT_LT(sys.equilibrium_residual(), 1e-15);
}

TEST(NeuralField, AxialResidualsOnRandomDraws)
{
    std::mt19937_64 rng(7);
    for (int n = 3; n <= 8; ++n)
        for (int k = 0; k < 50; ++k) {
            const Draw d = random_axial(rng, n);
            const auto sys = build_axial(d.a, d.b);
            for (int i = 0; i < n; ++i)
                EXPECT_LT(sys.eval(sys.equilibria().col(i)).cwiseAbs().maxCoeff(), 1e-14);
        }
}

TEST(NeuralField, RejectsBadParameters)
{
    EXPECT_THROW(build_axial(Vec::Constant(2, 0.5), Vec::Constant(2, 0.3)), PreconditionError);
    EXPECT_THROW(build_axial(Vec::Constant(3, 1.2), Vec::Constant(3, 0.3)), PreconditionError);
    EXPECT_THROW(build_axial(Vec::Constant(3, 0.5), Vec::Constant(3, -0.3)), PreconditionError);
    EXPECT_THROW(build_perturbed(Mat::Constant(3, 3, 0.5), Vec::Constant(3, 0.3)), PreconditionError);
}

TEST(Lyapunov, ValueAtAxialVertexClosedForm)
{
    const auto sys = build_axial(Vec::Constant(3, 0.5), Vec::Constant(3, 0.3));
    const LyapunovEvaluator ev(sys, 1e-13);
    // u(e_1) = 0, so V(e_1) = (1/b) (int_0^1 atanh(r/2) dr - atanh(1/2)/2)
    const double s = std::atanh(0.5);
    const double integral = 2.0 * (0.5 * s + 0.5 * std::log(0.75));
    const double expect = (integral - 0.5 * s) / 0.3;
    EXPECT_NEAR(expect, -0.0434300009491783486, 1e-15);
    EXPECT_NEAR(ev.value(Vec::Unit(3, 0)), expect, 1e-11);
    EXPECT_NEAR(ev.value(Vec::Zero(3)), 0.5, 1e-15);
}

TEST(Lyapunov, GradientMatchesFiniteDifferences)
{
    std::mt19937_64 rng(11);
    const Draw d = random_axial(rng, 4);
    const auto sys = build_axial(d.a, d.b);
    const LyapunovEvaluator ev(sys, 1e-13);
    for (int k = 0; k < 20; ++k) {
        const Vec v = random_in_q(rng, d.a) * 0.9;
        const Vec g = ev.gradient(v);
        for (int i = 0; i < 4; ++i) {
            const double h = 1e-5;
            const Vec e = Vec::Unit(4, i);
            const double fd = (ev.value(v + h * e) - ev.value(v - h * e)) / (2 * h);
            EXPECT_NEAR(g[i], fd, 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST(Lyapunov, DerivativeFormsAgreeAndAreNonpositive)
{
    std::mt19937_64 rng(12);
    for (int n = 3; n <= 6; ++n)
        for (int sysk = 0; sysk < 10; ++sysk) {
            const Draw d = random_axial(rng, n);
            const auto sys = build_axial(d.a, d.b);
            const LyapunovEvaluator ev(sys);
            for (int k = 0; k < 100; ++k) {
                const Vec v = random_in_q(rng, d.a);
                const double chain = lyapunov_derivative(ev, sys, v);
                const double fact = ev.derivative_factored(v);
                EXPECT_NEAR(chain, fact, 1e-9 * std::max(1.0, std::abs(chain)));
                EXPECT_LE(chain, 1e-8);
                EXPECT_TRUE((ev.multipliers(v).array() >= 0.0).all());
            }
        }
}

TEST(Lyapunov, NonincreasingAlongTrajectories)
{
    std::mt19937_64 rng(13);
    const Draw d = random_axial(rng, 4);
    const auto sys = build_axial(d.a, d.b);
    const LyapunovEvaluator ev(sys);
    const VectorField f(4, [&](const Vec& v) { return normalized_field(sys, v); }, {}, "normalized");
    IntegratorConfig cfg;
    cfg.t_max = 30.0;
    for (int k = 0; k < 5; ++k) {
        const auto res = integrate(f, random_in_q(rng, d.a) * 0.5, cfg);
        ASSERT_TRUE(res.ok());
        double prev = ev.value(res.trajectory.state(0));
        for (std::size_t s = 1; s < res.trajectory.size(); ++s) {
            const double cur = ev.value(res.trajectory.state(s));
            EXPECT_LE(cur, prev + 1e-8);
            prev = cur;
        }
    }
}

TEST(Lyapunov, RejectsPointsOutsideQ)
{
    const auto sys = build_axial(Vec::Constant(3, 0.5), Vec::Constant(3, 0.3));
    const LyapunovEvaluator ev(sys);
    EXPECT_FALSE(ev.in_domain(Vec::Constant(3, 2.0)));
    EXPECT_THROW(ev.value(Vec::Constant(3, 2.0)), PreconditionError);
    EXPECT_TRUE(ev.in_domain(Vec::Constant(3, 1.99)));
}

TEST(Spectrum, CountsAtAxialEquilibria)
{
    std::mt19937_64 rng(21);
    for (int n = 4; n <= 8; ++n)
        for (int k = 0; k < 20; ++k) {
            const Draw d = random_axial(rng, n);
            const auto sys = build_axial(d.a, d.b);
            for (int i = 0; i < n; ++i) {
                const auto sp = axial_spectrum(sys, i);
                EXPECT_GE(sp.n_positive, n - 2);
                EXPECT_GE(sp.n_negative, 1);
                EXPECT_LT(sp.max_imag, 1e-9);
            }
        }
}

TEST(Spectrum, SecularRootsMatchEigensolver)
{
    std::mt19937_64 rng(22);
    for (int n = 3; n <= 8; ++n)
        for (int k = 0; k < 20; ++k) {
            const Draw d = random_axial(rng, n);
            const auto sys = build_axial(d.a, d.b);
            for (int i = 0; i < n; ++i) {
                const auto direct = axial_spectrum(sys, i).eigenvalues;
                const auto sec = secular_spectrum(sys, i);
                ASSERT_EQ(direct.size(), sec.size());
                for (std::size_t m = 0; m < sec.size(); ++m)
                    EXPECT_NEAR(direct[m], sec[m], 1e-8);
            }
        }
}

TEST(Spectrum, RepeatedPolesKeepMultiplicity)
{
    const auto sys = build_axial(Vec::Constant(5, 0.4), Vec::Constant(5, 0.2));
    for (int i = 0; i < 5; ++i) {
        const auto direct = axial_spectrum(sys, i).eigenvalues;
        const auto sec = secular_spectrum(sys, i);
        ASSERT_EQ(sec.size(), 5u);
        for (std::size_t m = 0; m < 5; ++m)
            EXPECT_NEAR(direct[m], sec[m], 1e-8);
    }
}

TEST(Spectrum, DeterminantLemmaFactorization)
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ul(-3.0, 3.0);
    const Draw d = random_axial(rng, 5);
    const auto sys = build_axial(d.a, d.b);
    for (int i = 0; i < 5; ++i)
        for (int k = 0; k < 10; ++k) {
            const double l = ul(rng);
            const double direct = characteristic_direct(sys, i, l);
            EXPECT_NEAR(characteristic_secular(sys, i, l), direct, 1e-10 * std::max(1.0, std::abs(direct)));
        }
}

TEST(Perturbation, ResidualAtPerturbedEquilibria)
{
    std::mt19937_64 rng(31);
    std::normal_distribution<double> nd;
    const Vec a = Vec::Constant(4, 0.5), b = Vec::Constant(4, 0.3);
    const Mat e = Mat::NullaryExpr(4, 4, [&]() { return nd(rng); });
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const auto built = build_perturbed(perturbed_equilibria(a, e, eps), b);
        EXPECT_FALSE(built.system.axial());
        EXPECT_LT(built.system.equilibrium_residual(), 1e-12);
        EXPECT_LT(built.condition_number, 10.0);
    }
    // eps = 0 reproduces the axial weights
    const auto zero = build_perturbed(perturbed_equilibria(a, e, 0.0), b);
    EXPECT_LT((zero.system.W() - build_axial(a, b).W()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Perturbation, C1DistanceShrinksLinearly)
{
    std::mt19937_64 rng(32);
    std::normal_distribution<double> nd;
    const Vec a = Vec::Constant(3, 0.5), b = Vec::Constant(3, 0.3);
    const Mat e = Mat::NullaryExpr(3, 3, [&]() { return nd(rng); });
    const auto rows = perturbation_convergence(a, b, {}, e, {1e-2, 1e-3, 1e-4}, Box::cube(3, 0.0, 1.0), 11);
    ASSERT_EQ(rows.size(), 3u);
    for (std::size_t k = 0; k < rows.size(); ++k)
        ASSERT_TRUE(rows[k].valid) << rows[k].reason;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const double ratio = rows[k].c1() / rows[k - 1].c1();
        EXPECT_GE(ratio, 0.05);
        EXPECT_LE(ratio, 0.2);
    }
}

TEST(Perturbation, InvalidRowsAreReported)
{
    const Vec a = Vec::Constant(3, 0.5), b = Vec::Constant(3, 0.3);
    const auto rows = perturbation_convergence(a, b, {}, Mat::Identity(3, 3), {0.6}, Box::cube(3, 0.0, 1.0), 3);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_FALSE(rows[0].valid);
    EXPECT_FALSE(rows[0].reason.empty());
}

TEST(Suites, DrawsAreReplayableFromTheirSeed)
{
    const auto d1 = random_axial_draw(5, draw_seed(3, 5, 7));
    const auto d2 = random_axial_draw(5, draw_seed(3, 5, 7));
    EXPECT_EQ(d1.a, d2.a);
    EXPECT_EQ(d1.b, d2.b);
    EXPECT_NE(draw_seed(3, 5, 7), draw_seed(3, 5, 8));
    EXPECT_NE(draw_seed(3, 5, 7), draw_seed(3, 6, 7));
    EXPECT_TRUE((d1.a.array() >= 0.2).all() && (d1.a.array() < 0.9).all());
    EXPECT_TRUE((d1.b.array() >= 0.1).all() && (d1.b.array() < 1.0).all());
}

TEST(Suites, PassOnRandomDraws)
{
    for (int n : {3, 5}) {
        const auto d = random_axial_draw(n, draw_seed(1, n, 0));
        const auto sys = build_axial(d.a, d.b);
        LyapunovSuiteOptions lo;
        lo.points = 100;
        lo.trajectories = 3;
        const auto ly = lyapunov_suite(sys, d.seed, lo);
        EXPECT_TRUE(ly.passed());
        EXPECT_EQ(ly.points, 100);
        EXPECT_LE(ly.max_derivative, 0.0);
        EXPECT_TRUE(spectral_suite(sys).passed());
        PerturbationSuiteOptions po;
        po.res = perturbation_grid_res(n);
        const auto pc = perturbation_suite(d.a, d.b, d.seed, po);
        EXPECT_TRUE(pc.passed());
        EXPECT_EQ(pc.ratios.size(), 2u);
    }
}

TEST(Suites, PerturbationFlagsBadBand)
{
    const Vec a = Vec::Constant(3, 0.5), b = Vec::Constant(3, 0.3);
    PerturbationSuiteOptions po;
    po.res = 5;
    po.ratio_lo = 0.5; // first-order shrinkage gives about 0.1
    const auto pc = perturbation_suite(a, b, 4, po);
    EXPECT_TRUE(pc.monotone);
    EXPECT_FALSE(pc.ratios_in_band);
    EXPECT_FALSE(pc.passed());
}
