#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "seqdyn/core/activation.hpp"
#include "seqdyn/core/trajectory.hpp"
#include "seqdyn/core/vector_field.hpp"
#include "seqdyn/lv/lotka_volterra.hpp"

using namespace seqdyn;

namespace {

const Activation kinds[] = {Activation(ActivationKind::tanh), Activation(ActivationKind::scaled_logistic)};

} // namespace

TEST(Activation, NormalizedAtOrigin)
{
    for (const auto& fn : kinds) {
        const auto [v, d] = eval_sigma(fn, 0.0);
        EXPECT_EQ(v, 0.0) << fn.name();
        EXPECT_DOUBLE_EQ(d, 1.0) << fn.name();
    }
}

TEST(Activation, TanhAtOne)
{
    // mpmath at 30 digits: tanh(1), 1 - tanh(1)^2
    const auto [v, d] = eval_sigma(Activation(ActivationKind::tanh), 1.0);
    EXPECT_NEAR(v, 0.761594155955764888, 1e-15);
    EXPECT_NEAR(d, 0.419974341614026069, 1e-15);
}

TEST(Activation, DerivativeBoundsAndRange)
{
    for (const auto& fn : kinds) {
        for (double s = -40.0; s <= 40.0; s += 0.01) {
            const double d = fn.derivative(s);
            const double v = fn.value(s);
            if (std::abs(s) < 15.0) {
                EXPECT_GT(d, 0.0);
                EXPECT_GT(v, -fn.range_low());
                EXPECT_LT(v, fn.range_high());
            }
            EXPECT_LE(d, 1.0 + 1e-15);
        }
    }
}

TEST(Activation, InverseRoundTrip)
{
    for (const auto& fn : kinds) {
        for (double s = -3.0; s <= 3.0; s += 0.001)
            EXPECT_NEAR(fn.inverse(fn.value(s)), s, 1e-12) << fn.name() << " s=" << s;
        for (double y = -0.99; y <= 0.99; y += 0.001)
            EXPECT_NEAR(fn.value(fn.inverse(y)), y, 1e-12);
    }
}

TEST(Activation, InverseOutsideRangeThrows)
{
    for (const auto& fn : kinds) {
        EXPECT_THROW(fn.inverse(1.0), PreconditionError);
        EXPECT_THROW(fn.inverse(-1.0), PreconditionError);
        EXPECT_THROW(fn.inverse(1.5), PreconditionError);
    }
}

TEST(Activation, StrictConcavitySideCondition)
{
    // sigma'(s) < sigma(s) / s < 1 for s != 0
    for (const auto& fn : kinds) {
        for (double s = -10.0; s <= 10.0; s += 0.005) {
            if (std::abs(s) < 1e-3)
                continue;
            const double ratio = fn.value(s) / s;
            EXPECT_LT(fn.derivative(s), ratio) << fn.name() << " s=" << s;
            EXPECT_LT(ratio, 1.0) << fn.name() << " s=" << s;
        }
    }
}

TEST(Activation, KindsAgreeAfterRescaling)
{
    // 2 / (1 + exp(-2s)) - 1 coincides with tanh(s)
    const Activation t(ActivationKind::tanh), l(ActivationKind::scaled_logistic);
    for (double s = -5.0; s <= 5.0; s += 0.01) {
        EXPECT_NEAR(t.value(s), l.value(s), 1e-15);
        EXPECT_NEAR(t.derivative(s), l.derivative(s), 1e-15);
    }
}

TEST(Activation, ParseNames)
{
    EXPECT_EQ(Activation::parse("tanh"), ActivationKind::tanh);
    EXPECT_EQ(Activation::parse("scaled_logistic"), ActivationKind::scaled_logistic);
    EXPECT_FALSE(Activation::parse("relu").has_value());
}

TEST(FiniteDiff, IdentityAndDecay)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 10; ++k) {
        Vec x(4);
        for (auto& v : x)
            v = u(rng);
        EXPECT_LT((finite_diff_jacobian(fields::identity(4), x) - Mat::Identity(4, 4)).norm(), 1e-9);
        EXPECT_LT((finite_diff_jacobian(fields::linear_decay(4), x) + Mat::Identity(4, 4)).norm(), 1e-9);
    }
}

TEST(FiniteDiff, LotkaVolterraAgainstHandJacobian)
{
    // g_i = x_i (1 - sum_j rho_ij x_j) with a = 1, lambda_u = 0.9:
    // rho = [[1, 2, 0.1], [0.1, 1, 2], [2, 0.1, 1]]
    const auto sys = lv::build_lv({1, 1, 1}, {0.9, 0.9, 0.9});
    Vec x(3);
    x << 0.5, 0.1, 0.1;
    Mat expected(3, 3);
    // row 1: d/dx1 = 1 - 2*0.5 - 2*0.1 - 0.1*0.1, d/dx2 = -0.5*2, d/dx3 = -0.5*0.1
    expected << 1 - 1.0 - 0.2 - 0.01, -1.0, -0.05,
        -0.1 * 0.1, 1 - 0.05 - 0.2 - 0.2, -0.1 * 2,
        -0.1 * 2, -0.1 * 0.1, 1 - 1.0 - 0.01 - 0.2;
    EXPECT_LT((finite_diff_jacobian(sys.field(), x) - expected).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT((sys.jacobian(x) - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(FiniteDiff, RegisteredAnalyticJacobiansAgree)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const VectorField registered[] = {fields::rotation(1.3), fields::hopf(0.7, 2.0),
                                      lv::build_lv({1, 0.8, 1.2}, {0.3, 0.6, 0.9}).field()};
    for (const auto& f : registered) {
        for (int k = 0; k < 100; ++k) {
            Vec x(f.dim());
            for (auto& v : x)
                v = u(rng);
            EXPECT_LT(jacobian_mismatch(f, x), 1e-5) << f.name();
        }
    }
}

TEST(FiniteDiff, NonFiniteEvaluationPropagates)
{
    VectorField bad(1, [](const Vec& x) { return Vec::Constant(1, std::log(x[0])); });
    EXPECT_THROW(finite_diff_jacobian(bad, Vec::Constant(1, 0.0)), NumericError);
}

TEST(FiniteDiff, RejectsNonPositiveStep)
{
    EXPECT_THROW(finite_diff_jacobian(fields::identity(2), Vec::Zero(2), 0.0), PreconditionError);
}

TEST(Trajectory, InterpolantReproducesNodes)
{
    Trajectory tr(2);
    for (int k = 0; k < 20; ++k) {
        const double t = 0.1 * k + 0.01 * k * k;
        Vec x(2), dx(2);
        x << std::sin(t), std::cos(t);
        dx << std::cos(t), -std::sin(t);
        tr.push_back(t, x, dx);
    }
    for (std::size_t k = 0; k < tr.size(); ++k)
        EXPECT_LT((tr.at(tr.time(k)) - tr.state(k)).norm(), 1e-12);
    // cubic Hermite is fourth order: mid-step error tiny for smooth data
    EXPECT_NEAR(tr.at(0.55)[0], std::sin(0.55), 1e-4);
}

TEST(Trajectory, RejectsNonIncreasingTimes)
{
    Trajectory tr(1);
    tr.push_back(0.0, Vec::Zero(1), Vec::Zero(1));
    EXPECT_THROW(tr.push_back(0.0, Vec::Zero(1), Vec::Zero(1)), PreconditionError);
}
