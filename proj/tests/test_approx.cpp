#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "seqdyn/approx/dataset.hpp"
#include "seqdyn/approx/diagnostics.hpp"
#include "seqdyn/approx/lift.hpp"
#include "seqdyn/approx/network.hpp"
#include "seqdyn/approx/train.hpp"
#include "seqdyn/integrate/integrator.hpp"
#include "seqdyn/lv/lotka_volterra.hpp"

#include "fixtures.hpp"

using namespace seqdyn;
using namespace seqdyn::approx;

namespace {

const std::vector<int> kBlocks{15, 15, 15};

ApproxNetwork random_net(std::uint64_t seed)
{
    // bias drawn away from zero so that the fixture exercises the full sigma range
    ApproxNetwork net = init_network(3, 45, kBlocks, seed);
    std::mt19937_64 rng(seed + 1000);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Vec b = Vec::NullaryExpr(45, [&]() { return u(rng); });
    net.set_parameters(net.P(), 2.0 * net.W(), b);
    return net;
}

} // namespace

TEST(ApproxNetwork, BlockLayoutNonzeros)
{
    const auto net = init_network(3, 45, kBlocks, 1);
    EXPECT_EQ((net.P().array() != 0.0).count(), 45);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ((net.P().row(i).array() != 0.0).count(), 15);
        for (int j = 0; j < 45; ++j)
            if (j / 15 != i) {
                EXPECT_EQ(net.P()(i, j), 0.0);
            }
    }
    EXPECT_EQ(net.parameter_count(), 45 + 45 * 3 + 45);

    const auto dense = init_network(3, 45, std::nullopt, 1);
    EXPECT_EQ((dense.P().array() != 0.0).count(), 3 * 45);
    EXPECT_EQ(dense.parameter_count(), 3 * 45 + 45 * 3 + 45);
}

TEST(ApproxNetwork, InitializationRanges)
{
    const auto net = init_network(3, 45, kBlocks, 5);
    EXPECT_LE(net.W().cwiseAbs().maxCoeff(), std::sqrt(6.0 / 48.0));
    EXPECT_EQ(net.b().cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE(net.P().cwiseAbs().maxCoeff(), 1.0 / std::sqrt(15.0));
}

TEST(ApproxNetwork, SameSeedBitIdentical)
{
    const auto a = init_network(3, 45, kBlocks, 42), b = init_network(3, 45, kBlocks, 42);
    EXPECT_EQ(a.P(), b.P());
    EXPECT_EQ(a.W(), b.W());
    EXPECT_EQ(a.b(), b.b());
    EXPECT_NE(init_network(3, 45, kBlocks, 43).W(), a.W());
}

TEST(ApproxNetwork, InvalidLayoutsRejected)
{
    EXPECT_THROW(init_network(3, 45, std::vector<int>{15, 15}, 1), PreconditionError);
    EXPECT_THROW(init_network(3, 45, std::vector<int>{15, 15, 14}, 1), PreconditionError);
    EXPECT_THROW(init_network(3, 45, std::vector<int>{30, 15, 0}, 1), PreconditionError);
    EXPECT_THROW(init_network(3, 2, std::nullopt, 1), PreconditionError);
}

TEST(ApproxNetwork, JacobianMatchesFiniteDifferences)
{
    const auto net = random_net(3);
    const VectorField f = net.field();
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    for (int k = 0; k < 100; ++k) {
        const Vec x = Vec::NullaryExpr(3, [&]() { return u(rng); });
        EXPECT_LT(jacobian_mismatch(f, x), 1e-5);
    }
}

TEST(ApproxNetwork, BatchEvalMatchesPointwise)
{
    const auto net = random_net(6);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Mat x = Mat::NullaryExpr(3, 50, [&]() { return u(rng); });
    const Mat fx = net.eval_batch(x);
    for (int k = 0; k < 50; ++k)
        EXPECT_LT((fx.col(k) - net.eval(x.col(k))).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Dataset, DeterministicAndUniform)
{
    const auto g = lv::build_lv(lv::Vec3(1, 1, 1), lv::Vec3(0.6, 0.6, 0.6)).field();
    const Box box = Box::cube(3, 0.0, 1.0);
    const auto one = sample_dataset(g, box, 1, 9), again = sample_dataset(g, box, 1, 9);
    EXPECT_EQ(one.x, again.x);
    EXPECT_EQ(one.y, again.y);

    const auto big = sample_dataset(g, box, 200000, 10);
    EXPECT_TRUE(big.y.allFinite());
    EXPECT_GE(big.x.minCoeff(), 0.0);
    EXPECT_LT(big.x.maxCoeff(), 1.0);
    // 6 standard errors of the mean of U(0, 1) over 2e5 samples
    const Vec mean = big.x.rowwise().mean();
    EXPECT_LT((mean.array() - 0.5).abs().maxCoeff(), 6.0 * std::sqrt(1.0 / 12.0 / 200000.0));
    for (int k = 0; k < 100; ++k)
        EXPECT_EQ(big.y.col(k), g(big.x.col(k)));
}

TEST(Train, ZeroEpochsReturnsInitialization)
{
    const auto g = lv::build_lv(lv::Vec3(1, 1, 1), lv::Vec3(0.6, 0.6, 0.6)).field();
    TrainConfig cfg;
    cfg.dataset_size = 2048;
    cfg.epochs = 0;
    const auto ds = sample_dataset(g, cfg.domain, cfg.dataset_size, 1);
    const auto init = init_network(3, 45, kBlocks, 1);
    const auto res = train(init, ds, g, cfg);
    EXPECT_EQ(res.net.P(), init.P());
    EXPECT_EQ(res.net.W(), init.W());
    EXPECT_EQ(res.net.b(), init.b());
    EXPECT_EQ(res.epochs_run, 0);
    ASSERT_EQ(res.train_mse.size(), 1u);
    EXPECT_DOUBLE_EQ(res.train_mse[0], mse(init, ds.x, ds.y));
}

TEST(Train, ConfigPreconditions)
{
    TrainConfig cfg;
    cfg.batch_size = cfg.dataset_size + 1;
    EXPECT_THROW(cfg.validate(), PreconditionError);
    cfg = TrainConfig{};
    cfg.jacobian_penalty_weight = -1.0;
    EXPECT_THROW(cfg.validate(), PreconditionError);
    EXPECT_NO_THROW(TrainConfig::desk().validate());
    EXPECT_NO_THROW(TrainConfig::paper().validate());
    EXPECT_EQ(TrainConfig::paper().dataset_size, 1000000);
}

TEST(Train, GradientMatchesFiniteDifferences)
{
    const auto g = lv::build_lv(lv::Vec3(1, 1, 1), lv::Vec3(0.6, 0.6, 0.6)).field();
    const auto ds = sample_dataset(g, Box::cube(3, 0.0, 1.0), 64, 3);
    const Mat jt = approx::detail::target_jacobians(g, ds.x);
    const auto net = random_net(8);
    for (double jw : {0.0, 0.3}) {
        approx::detail::Grad grad;
        approx::detail::Workspace ws;
        approx::detail::batch_gradient(net, ds.x, ds.y, &jt, jw, grad, ws);
        auto objective = [&](const ApproxNetwork& m) {
            approx::detail::Grad tmp;
            approx::detail::Workspace w2;
            return approx::detail::batch_gradient(m, ds.x, ds.y, &jt, jw, tmp, w2);
        };
        const double h = 1e-6;
        for (int r = 0; r < 45; r += 7)
            for (int c = 0; c < 3; ++c) {
                Mat wp = net.W(), wm = net.W();
                wp(r, c) += h;
                wm(r, c) -= h;
                ApproxNetwork np = net, nm = net;
                np.set_parameters(net.P(), wp, net.b());
                nm.set_parameters(net.P(), wm, net.b());
                EXPECT_NEAR(grad.w(r, c), (objective(np) - objective(nm)) / (2 * h), 1e-6) << "jw=" << jw;
            }
        for (int j = 0; j < 45; j += 4) {
            Mat pp = net.P(), pm = net.P();
            const int i = j / 15;
            pp(i, j) += h;
            pm(i, j) -= h;
            ApproxNetwork np = net, nm = net;
            np.set_parameters(pp, net.W(), net.b());
            nm.set_parameters(pm, net.W(), net.b());
            EXPECT_NEAR(grad.p(i, j), (objective(np) - objective(nm)) / (2 * h), 1e-6) << "jw=" << jw;
            Vec bp = net.b(), bm = net.b();
            bp[j] += h;
            bm[j] -= h;
            np.set_parameters(net.P(), net.W(), bp);
            nm.set_parameters(net.P(), net.W(), bm);
            EXPECT_NEAR(grad.b[j], (objective(np) - objective(nm)) / (2 * h), 1e-6) << "jw=" << jw;
        }
        EXPECT_EQ(grad.p.cwiseProduct((1.0 - net.mask().array()).matrix()).cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(Train, SelfDistillationReachesTinyLoss)
{
    const fixtures::SelfDistillation fx;
    const VectorField g = fx.teacher.field();
    const auto ds = sample_dataset(g, fx.config.domain, fx.config.dataset_size, fx.data_seed);
    const auto res = train(fx.student, ds, g, fx.config);
    ASSERT_NE(res.status, TrainStatus::diverged) << res.message;
    EXPECT_LT(res.final_mse, 1e-6);
    const auto c1 = c1_error(res.net, g, fx.config.domain, 11);
    EXPECT_LT(c1.sup_value, 1e-3);
    EXPECT_LT(c1.sup_jacobian, 1e-3);
    // structural zeros survive training
    EXPECT_EQ((res.net.P().array() != 0.0).count(), 45);
    EXPECT_LT(res.final_mse, res.train_mse.front());
    double running = res.train_mse.front();
    for (double v : res.train_mse)
        running = std::min(running, v);
    EXPECT_LE(running, res.final_mse);
}

TEST(Train, DeterministicForFixedSeed)
{
    const auto g = lv::build_lv(lv::Vec3(1, 1, 1), lv::Vec3(0.6, 0.6, 0.6)).field();
    TrainConfig cfg = TrainConfig::desk();
    cfg.dataset_size = 4096;
    cfg.epochs = 3;
    const auto ds = sample_dataset(g, cfg.domain, cfg.dataset_size, 2);
    const auto a = train(init_network(3, 45, kBlocks, 2), ds, g, cfg);
    const auto b = train(init_network(3, 45, kBlocks, 2), ds, g, cfg);
    EXPECT_EQ(a.net.P(), b.net.P());
    EXPECT_EQ(a.net.W(), b.net.W());
    EXPECT_EQ(a.net.b(), b.net.b());
    EXPECT_EQ(a.train_mse, b.train_mse);
}

TEST(Train, InwardPenaltyGradientMatchesFiniteDifferences)
{
    const auto net = random_net(21);
    std::vector<int> faces;
    const Mat pts = approx::detail::face_points(Box::cube(3, 0.0, 1.0), 60, 5, faces);
    for (int j = 0; j < 60; ++j)
        EXPECT_EQ(pts(faces[j], j), 0.0);
    const double w = 1.0, m = 0.3;
    approx::detail::Grad grad;
    grad.p = Mat::Zero(3, 45);
    grad.w = Mat::Zero(45, 3);
    grad.b = Vec::Zero(45);
    approx::detail::Workspace ws;
    approx::detail::inward_gradient(net, pts, faces, w, m, grad, ws);
    auto objective = [&](const ApproxNetwork& q) {
        approx::detail::Grad t{Mat::Zero(3, 45), Mat::Zero(45, 3), Vec::Zero(45)};
        approx::detail::Workspace w2;
        return approx::detail::inward_gradient(q, pts, faces, w, m, t, w2);
    };
    const double h = 1e-6;
    for (int j = 0; j < 45; j += 5) {
        Vec bp = net.b(), bm = net.b();
        bp[j] += h;
        bm[j] -= h;
        ApproxNetwork np = net, nm = net;
        np.set_parameters(net.P(), net.W(), bp);
        nm.set_parameters(net.P(), net.W(), bm);
        EXPECT_NEAR(grad.b[j], (objective(np) - objective(nm)) / (2 * h), 1e-7);
    }
}

TEST(Diagnostics, ExactTargetVanishesAtSaddles)
{
    const auto sys = lv::build_lv(lv::Vec3(1, 1, 1), lv::Vec3(0.6, 0.6, 0.6));
    const auto sc = check_side_conditions(sys.field(), sys);
    EXPECT_FALSE(sc.all_nonvanishing());
    EXPECT_TRUE(sc.competitive_on_tube);
    EXPECT_GT(sc.tube_points, 10);
    const auto c1 = c1_error(sys.field(), sys.field(), Box::cube(3, 0.0, 1.0), 5);
    EXPECT_EQ(c1.sup_value, 0.0);
    EXPECT_EQ(c1.sup_jacobian, 0.0);
}

TEST(Diagnostics, ConstantOffsetIsDetected)
{
    const auto sys = lv::build_lv(lv::Vec3(1, 1, 1), lv::Vec3(0.6, 0.6, 0.6));
    const auto shifted = VectorField(
        3, [&](const Vec& x) { return Vec(sys.eval(x) + Vec::Constant(3, 0.01)); },
        [&](const Vec& x) { return sys.jacobian(x); });
    const auto sc = check_side_conditions(shifted, sys);
    EXPECT_TRUE(sc.all_nonvanishing());
    for (int i = 0; i < 3; ++i) {
        // e_i^u is proportional to (-2 / 1.6, 1, 0) up to rotation of the indices
        const double expect = 0.01 * (1.0 - 2.0 / 1.6) / std::sqrt(1.0 + std::pow(2.0 / 1.6, 2));
        EXPECT_NEAR(sc.unstable_push[i], expect, 1e-14);
        EXPECT_FALSE(sc.positivity[i]);
    }
    EXPECT_NEAR(c1_error(shifted, sys.field(), Box::cube(3, 0.0, 1.0), 5).sup_value, 0.01 * std::sqrt(3.0), 1e-15);
}

TEST(Lift, ProjectionIdentity)
{
    std::mt19937_64 rng(31);
    std::normal_distribution<double> nd;
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto net = random_net(seed);
        const LiftedSystem ls = lift(net);
        EXPECT_EQ(ls.dim(), 45);
        EXPECT_LT((ls.connectivity() - net.W() * net.P()).cwiseAbs().maxCoeff(), 1e-15);
        for (int k = 0; k < 100; ++k) {
            const Vec y = Vec::NullaryExpr(45, [&]() { return nd(rng); });
            EXPECT_LT((ls.project(ls.eval(y)) - net.eval(ls.project(y))).norm(), 1e-12);
        }
        EXPECT_LT(jacobian_mismatch(ls.field(), Vec::Constant(45, 0.1)), 1e-5);
    }
}

TEST(Lift, TrajectoriesAgree)
{
    const auto net = random_net(41);
    const LiftedSystem ls = lift(net);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 0.3);
    const Vec y0 = Vec::NullaryExpr(45, [&]() { return u(rng); });
    IntegratorConfig cfg;
    cfg.t_max = 50.0;
    const auto ry = integrate(ls.field(), y0, cfg);
    const auto rx = integrate(net.field(), ls.project(y0), cfg);
    ASSERT_TRUE(ry.ok() && rx.ok());
    double worst = 0.0;
    for (double t = 0.0; t <= 50.0; t += 0.25)
        worst = std::max(worst, (ls.project(ry.trajectory.at(t)) - rx.trajectory.at(t)).cwiseAbs().maxCoeff());
    EXPECT_LT(worst, 1e-6);
}
