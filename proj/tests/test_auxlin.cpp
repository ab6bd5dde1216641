#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "aux_oracle.hpp"
#include "epa/auxlin.hpp"

using namespace epa;

namespace {
const PhysParams kP(0.5, 1.0);
}

class ClosedFormVsOdeint : public ::testing::TestWithParam<EigenRegime> {};

TEST_P(ClosedFormVsOdeint, HundredRandomDraws) {
    std::mt19937_64 rng(20240611 + static_cast<int>(GetParam()));
    for (const PhysParams& P : {kP, PhysParams(4.0, 1.0), PhysParams(2.0, 0.5)}) {
        for (int i = 0; i < 100; ++i) {
            const auto d = testing_oracle::draw(P, GetParam(), rng);
            ASSERT_EQ(classify_regime(P, d.beta), GetParam());
            EXPECT_LT(testing_oracle::max_relative_error(P, d), 1e-8) << "beta = " << d.beta;
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Regimes, ClosedFormVsOdeint,
                         ::testing::Values(EigenRegime::Spiral, EigenRegime::Node, EigenRegime::Degenerate));

TEST(AuxTrajectory, StartAndEquilibrium) {
    const AuxTrajectory tr(kP, 0.75, {0.3, 2.0});
    EXPECT_DOUBLE_EQ(tr.evaluate(0.0).p, 0.3);
    EXPECT_DOUBLE_EQ(tr.evaluate(0.0).q, 2.0);
    const AuxTrajectory eq(kP, 0.75, {0.75, 1.0});
    EXPECT_NEAR(eq.evaluate(-7.0).p, 0.75, 1e-14);
    EXPECT_NEAR(eq.evaluate(-7.0).q, 1.0, 1e-14);
}

TEST(AuxTrajectory, VelocityMatchesFiniteDifference) {
    for (double beta : {0.5, std::sqrt(2.0), 2.5}) {
        const AuxTrajectory tr(kP, beta, {-0.4, 0.7});
        const double t = -1.3, h = 1e-6;
        const auto fd = (1.0 / (2 * h)) * (tr.evaluate(t + h) - tr.evaluate(t - h));
        const auto v = tr.velocity(t);
        EXPECT_NEAR(fd.p, v.p, 1e-7);
        EXPECT_NEAR(fd.q, v.q, 1e-7);
    }
}

TEST(Crossing, FirstReturnFromOriginAllRegimes) {
    for (double beta : {0.25, 0.75, std::sqrt(2.0), 1.5, 4.0}) {
        const AuxTrajectory tr(kP, beta, {0.0, 0.0});
        const double t = crossing_time_q(tr, 1.0 / kP.c, FirstNegative{});
        EXPECT_NEAR(t, first_return_time_from_origin(kP, beta), 1e-10) << beta;
        EXPECT_NEAR(tr.evaluate(t).q, 1.0, 1e-12);
    }
}

TEST(Crossing, SkipsTrivialRootAtZero) {
    const AuxTrajectory tr(kP, 0.75, {0.2, 1.0});
    const double t = crossing_time_q(tr, 1.0, FirstNegative{});
    EXPECT_LT(t, -1e-6);
    EXPECT_NEAR(tr.evaluate(t).q, 1.0, 1e-12);
}

TEST(Crossing, NoCrossingReported) {
    // a node trajectory sitting at equilibrium never moves
    const AuxTrajectory tr(kP, 2.0, {2.0, 1.0});
    EXPECT_THROW(crossing_time_q(tr, 0.0, UniqueNegative{}), NoCrossing);
    EXPECT_THROW(crossing_time_q(tr, 0.0, LargestNegativeInBracket{-1.0, -0.5}), NoCrossing);
    EXPECT_THROW(crossing_time_q(tr, 0.0, LargestNegativeInBracket{-0.5, -1.0}), std::invalid_argument);
}

TEST(Crossing, BracketReturnsLargestRoot) {
    const AuxTrajectory tr(kP, 0.25, {0.0, 0.0});
    const double first = crossing_time_q(tr, 1.0, FirstNegative{});
    const double in_bracket = crossing_time_q(tr, 1.0, LargestNegativeInBracket{first - 1e-3, 0.0});
    EXPECT_NEAR(first, in_bracket, 1e-12);
}

TEST(Crossing, FirstBackwardTurn) {
    const AuxTrajectory tr(kP, 0.5, {0.0, 0.0});
    const double t = first_backward_turn(tr);
    ASSERT_TRUE(std::isfinite(t));
    EXPECT_NEAR(tr.q_dot(t), 0.0, 1e-12);
    const AuxTrajectory eq(kP, 2.0, {2.0, 1.0});
    EXPECT_EQ(first_backward_turn(eq), -kInf);
}

TEST(TrajectorySegment, EndpointsExact) {
    const AuxTrajectory tr(kP, 0.5, {0.1, 0.2});
    const auto seg = trajectory_segment(tr, -2.0, 0.0, 17);
    ASSERT_EQ(seg.size(), 17u);
    EXPECT_EQ(seg.front().t, -2.0);
    EXPECT_EQ(seg.back().t, 0.0);
    EXPECT_DOUBLE_EQ(seg.back().p, 0.1);
    EXPECT_THROW(trajectory_segment(tr, 0.0, -1.0, 5), std::invalid_argument);
}
