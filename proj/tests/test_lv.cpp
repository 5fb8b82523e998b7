#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "seqdyn/analysis/residence.hpp"
#include "seqdyn/lv/heteroclinic.hpp"
#include "seqdyn/lv/lotka_volterra.hpp"
#include "seqdyn/lv/simulate.hpp"

using namespace seqdyn;
using lv::Vec3;

TEST(LotkaVolterra, CoefficientsSymmetric)
{
    const auto sys = lv::build_lv(Vec3(1, 1, 1), Vec3(0.9, 0.9, 0.9));
    lv::Mat3 expect;
    // rho_jj = 1, rho_{j+1,j} = 0.1, rho_{j+2,j} = 2 (row i, column j)
    expect << 1.0, 2.0, 0.1,
              0.1, 1.0, 2.0,
              2.0, 0.1, 1.0;
    EXPECT_LT((sys.rho() - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(LotkaVolterra, SlowFirstSaddleChangesOneCoefficient)
{
    const auto base = lv::build_lv(Vec3(1, 1, 1), Vec3(0.9, 0.9, 0.9));
    const auto slow = lv::build_lv(Vec3(1, 1, 1), Vec3(0.2, 0.9, 0.9));
    EXPECT_DOUBLE_EQ(slow.rho()(1, 0), 0.8);
    lv::Mat3 diff = slow.rho() - base.rho();
    diff(1, 0) = 0.0;
    EXPECT_EQ(diff.cwiseAbs().maxCoeff(), 0.0);
}

TEST(LotkaVolterra, RejectsOutOfRangeParameters)
{
    EXPECT_THROW(lv::build_lv(Vec3(1, 1, 1), Vec3(0.6, 1.2, 0.6)), PreconditionError);
    EXPECT_THROW(lv::build_lv(Vec3(1, 1, 1), Vec3(0.0, 0.6, 0.6)), PreconditionError);
    EXPECT_THROW(lv::build_lv(Vec3(1, -1, 1), Vec3(0.6, 0.6, 0.6)), PreconditionError);
    EXPECT_THROW(lv::build_lv(Vec3(1, 1, 1), Vec3(1.0, 0.6, 0.6)), PreconditionError);
}

TEST(LotkaVolterra, EquilibriaAndSpectraOnRandomDraws)
{
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> ua(0.2, 3.0), ul(0.01, 0.99);
    for (int draw = 0; draw < 200; ++draw) {
        const Vec3 a(ua(rng), ua(rng), ua(rng));
        const Vec3 l(ul(rng), ul(rng), ul(rng));
        const auto sys = lv::build_lv(a, l);
        EXPECT_TRUE((sys.rho().array() > 0.0).all());
        for (int i = 0; i < 3; ++i) {
            EXPECT_LT(sys.eval(sys.equilibrium(i)).cwiseAbs().maxCoeff(), 1e-14);
            const auto sp = lv::lv_jacobian_at_equilibrium(sys, i);
            EXPECT_NEAR(sp.eigenvalues[0], l[i], 1e-9);
            EXPECT_NEAR(sp.eigenvalues[1], -1.0, 1e-9);
            EXPECT_NEAR(sp.eigenvalues[2], -1.0, 1e-9);
            EXPECT_LT(sp.max_imag, 1e-9);
        }
        EXPECT_GT(lv::saddle_values(sys).product, 1.0);
    }
}

TEST(LotkaVolterra, UnstableEigenvectorByHand)
{
    // at e_1 the Jacobian is [[-1, -2, -0.4], [0, l, 0], [0, 0, -1]] for a = 1, l_3 = 0.6
    for (double l : {0.2, 0.6, 0.9}) {
        const auto sys = lv::build_lv(Vec3(1, 1, 1), Vec3(l, 0.6, 0.6));
        Vec3 v(-2.0 / (1.0 + l), 1.0, 0.0);
        v.normalize();
        const auto sp = lv::lv_jacobian_at_equilibrium(sys, 0);
        EXPECT_LT((sp.unstable_eigvec - v).norm(), 1e-12) << "lambda_u = " << l;
        EXPECT_GT(sp.unstable_eigvec[1], 0.0);
    }
    const auto sys = lv::build_lv(Vec3(1, 1, 1), Vec3(0.6, 0.6, 0.6));
    EXPECT_GT(lv::lv_jacobian_at_equilibrium(sys, 1).unstable_eigvec[2], 0.0);
    EXPECT_GT(lv::lv_jacobian_at_equilibrium(sys, 2).unstable_eigvec[0], 0.0);
}

TEST(LotkaVolterra, SaddleValueProducts)
{
    const auto s9 = lv::saddle_values(lv::build_lv(Vec3(1, 1, 1), Vec3(0.9, 0.9, 0.9)));
    EXPECT_NEAR(s9.product, 1.0 / (0.9 * 0.9 * 0.9), 1e-12);
    EXPECT_NEAR(s9.product, 1.371742112482853, 1e-12);
    EXPECT_TRUE(s9.stable);
    const auto s6 = lv::saddle_values(lv::build_lv(Vec3(1, 1, 1), Vec3(0.6, 0.6, 0.6)));
    EXPECT_NEAR(s6.product, 4.62962962962963, 1e-12);
    const auto edge = lv::saddle_values(lv::build_lv(Vec3(1, 1, 1), Vec3(0.999999, 0.999999, 0.999999)));
    EXPECT_GT(edge.product, 1.0);
    EXPECT_LT(edge.product - 1.0, 1e-5);
}

TEST(LotkaVolterra, Competitivity)
{
    const Box box = Box::cube(3, 0.05, 1.0);
    EXPECT_TRUE(lv::is_competitive(lv::build_lv(Vec3(1, 1, 1), Vec3(0.6, 0.6, 0.6)).field(), box, 11));
    const auto flipped = lv::LotkaVolterra::unchecked(Vec3(1, 1, 1), Vec3(1.5, 0.6, 0.6));
    EXPECT_LT(flipped.rho()(1, 0), 0.0);
    EXPECT_FALSE(lv::is_competitive(flipped.field(), box, 11));
    EXPECT_FALSE(lv::is_competitive(fields::linear_decay(3), box, 5));
}

TEST(LotkaVolterra, CyclicVisitsFromNearFirstSaddle)
{
    for (double l : {0.6, 0.9}) {
        const auto sys = lv::build_lv(Vec3(1, 1, 1), Vec3(l, l, l));
        IntegratorConfig cfg;
        cfg.t_max = 4000.0;
        const auto res = lv::simulate(sys, lv::near_saddle_start(sys, 0, 1e-3), cfg);
        ASSERT_TRUE(res.ok()) << res.message;
        const std::vector<Vec> saddles{sys.equilibrium(0), sys.equilibrium(1), sys.equilibrium(2)};
        const auto prof = analysis::residence_times(res.trajectory, saddles, 0.1);
        ASSERT_GE(prof.visits.size(), 9u) << "lambda_u = " << l;
        EXPECT_EQ(prof.visits.front().saddle, 0);
        EXPECT_TRUE(prof.cyclic_order());
    }
}

TEST(LotkaVolterra, SlowSaddleHasLongestResidence)
{
    const auto sys = lv::build_lv(Vec3(1, 1, 1), Vec3(0.2, 0.9, 0.9));
    IntegratorConfig cfg;
    cfg.t_max = 1500.0;
    const auto res = lv::simulate(sys, lv::near_saddle_start(sys, 0, 1e-3), cfg);
    ASSERT_TRUE(res.ok());
    const std::vector<Vec> saddles{sys.equilibrium(0), sys.equilibrium(1), sys.equilibrium(2)};
    const auto prof = analysis::residence_times(res.trajectory, saddles, 0.1);
    ASSERT_FALSE(std::isnan(prof.means[0]));
    EXPECT_GT(prof.means[0], prof.means[1]);
    EXPECT_GT(prof.means[0], prof.means[2]);
}

TEST(HeteroclinicReference, LegsLieInCoordinatePlanes)
{
    const auto sys = lv::build_lv(Vec3(1, 1, 1), Vec3(0.6, 0.6, 0.6));
    const auto ref = lv::heteroclinic_reference(sys, 0.01);
    ASSERT_EQ(ref.leg_start.size(), 3u);
    for (int leg = 0; leg < 3; ++leg) {
        const std::size_t end = leg < 2 ? ref.leg_start[leg + 1] : ref.points.size() - 1;
        for (std::size_t k = ref.leg_start[leg]; k < end; ++k)
            EXPECT_EQ(ref.points[k][(leg + 2) % 3], 0.0);
    }
    for (std::size_t k = 1; k < ref.points.size(); ++k)
        EXPECT_LE((ref.points[k] - ref.points[k - 1]).norm(), 0.01 + 1e-12);
    EXPECT_LT((ref.points.front() - ref.points.back()).norm(), 1e-15);

    const SectionSpec sec = lv::cycle_section(sys, ref);
    EXPECT_NEAR(sec.normal.norm(), 1.0, 1e-15);
    for (int i = 0; i < 3; ++i)
        EXPECT_GT((sec.point - sys.equilibrium(i)).norm(), 0.5);
}
