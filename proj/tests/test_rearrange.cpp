#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "epa/kernels.hpp"
#include "epa/rearrange.hpp"
#include "oracle_values.hpp"
#include "random_fields.hpp"

using namespace epa;

TEST(RearrangedKernel, SortsAndIntegrates) {
    const RearrangedKernel k({1.0, 4.0, 2.0, 3.0});
    EXPECT_EQ(k.values(), (std::vector<double>{4.0, 3.0, 2.0, 1.0}));
    EXPECT_DOUBLE_EQ(k.l1_norm(), 2.5);
    EXPECT_DOUBLE_EQ(k.head(0.25), 1.0);
    EXPECT_DOUBLE_EQ(k.head(0.375), 1.0 + 0.125 * 3.0);  // fractional cell
    EXPECT_DOUBLE_EQ(k.tail(0.5), 0.75);
    EXPECT_DOUBLE_EQ(k.gamma(), 0.75);
    EXPECT_DOUBLE_EQ(k.head(1.0), k.l1_norm());
    EXPECT_THROW(RearrangedKernel({}), std::domain_error);
    EXPECT_THROW(RearrangedKernel({1.0, -1.0}), std::domain_error);
}

TEST(ImprovedBounds, ConstantKernelCollapses) {
    for (double psi : {0.0, 0.7, 3.0}) {
        for (const BoundsConfig& b : {BoundsConfig(0.0, 2.0), BoundsConfig(0.3, 5.0), BoundsConfig(0.9, 1.1)}) {
            const auto r = improved_bounds(RearrangedKernel(kernels::constant(1024, psi)), b, 1.0);
            EXPECT_NEAR(r.lower, psi, 1e-12);
            EXPECT_NEAR(r.upper, psi, 1e-12);
        }
    }
}

TEST(ImprovedBounds, MatchGreedyOracleExactly) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const auto psi = testing_fields::random_kernel(256, rng);
        const BoundsConfig b(0.2 * (trial % 4), 1.5 + 0.5 * (trial % 3));
        const auto bounds = improved_bounds(RearrangedKernel(psi), b, 1.0);
        const auto lo = bound_oracle(psi, b, 1.0, OracleTarget::Min);
        const auto hi = bound_oracle(psi, b, 1.0, OracleTarget::Max);
        EXPECT_NEAR(lo.value, bounds.lower, 1e-12 * (1.0 + bounds.upper));
        EXPECT_NEAR(hi.value, bounds.upper, 1e-12 * (1.0 + bounds.upper));
        // the oracle densities are feasible
        const double mass = std::accumulate(lo.density.begin(), lo.density.end(), 0.0) / 256.0;
        EXPECT_NEAR(mass, 1.0, 1e-12);
        for (double r : hi.density) {
            EXPECT_GE(r, b.rho_min);
            EXPECT_LE(r, b.rho_max);
        }
    }
}

TEST(ImprovedBounds, HoldForRandomDensities) {
    std::mt19937_64 rng(7);
    const BoundsConfig b(0.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const auto psi = testing_fields::random_kernel(256, rng);
        const auto bounds = improved_bounds(RearrangedKernel(psi), b, 1.0);
        const double slack = 1e-12 * (1.0 + bounds.upper);
        for (int j = 0; j < 100; ++j) {
            const auto rho = testing_fields::random_density(256, b, 1.0, rng);
            const double v = discrete_convolution_at(psi, rho, static_cast<std::size_t>(j) % 256);
            EXPECT_GE(v, bounds.lower - slack);
            EXPECT_LE(v, bounds.upper + slack);
        }
    }
}

TEST(ImprovedBounds, TighterThanNaive) {
    std::mt19937_64 rng(9);
    const auto psi = testing_fields::random_kernel(128, rng);
    const BoundsConfig b(0.0, 2.0);
    const RearrangedKernel k(psi);
    const auto r = improved_bounds(k, b, 1.0);
    const double mn = *std::min_element(psi.begin(), psi.end());
    const double mx = *std::max_element(psi.begin(), psi.end());
    EXPECT_GE(r.lower, mn - 1e-12);
    EXPECT_LE(r.upper, mx + 1e-12);
    EXPECT_LE(r.lower, k.l1_norm());
    EXPECT_GE(r.upper, k.l1_norm());
}

TEST(Kernels, InverseSqrtRearrangement) {
    // psi = |x|^{-1/2}: continuous L1 = 2 sqrt 2, gamma = 2 sqrt 2 - 2
    EXPECT_NEAR(kernels::inverse_sqrt_gamma(1.0, 0.0), oracle::kInvSqrtGamma, 1e-15);
    const auto cells = kernels::inverse_sqrt(4096, 1.0, 0.0);
    const RearrangedKernel k(cells);
    EXPECT_NEAR(k.l1_norm(), oracle::kInvSqrtL1, 1e-12);
    // averaging flattens the rearrangement, so the discrete tail is slightly larger
    EXPECT_GE(k.gamma(), oracle::kInvSqrtGamma - 1e-14);
    EXPECT_NEAR(k.gamma(), oracle::kInvSqrtGamma, 1e-3);
}

TEST(Kernels, InverseSqrtForTargets) {
    const auto co = kernels::inverse_sqrt_for(2.0, 0.95);
    EXPECT_NEAR(kernels::inverse_sqrt_gamma(co.a, co.b), 0.95, 1e-14);
    EXPECT_NEAR(co.a * oracle::kInvSqrtL1 + co.b, 2.0, 1e-14);
    EXPECT_THROW(kernels::inverse_sqrt_for(2.0, 0.2), std::domain_error);
}

TEST(Kernels, RaisedCosineMeanAndRange) {
    const auto cells = kernels::raised_cosine(256, 0.25, 0.75);
    const double mean = std::accumulate(cells.begin(), cells.end(), 0.0) / 256.0;
    EXPECT_NEAR(mean, 0.5, 1e-14);
    for (double v : cells) {
        EXPECT_GE(v, 0.25 - 1e-14);
        EXPECT_LE(v, 0.75 + 1e-14);
    }
    for (std::size_t m = 1; m < 128; ++m) EXPECT_EQ(cells[m], cells[256 - m]);
}

TEST(WeaklySingularBand, DiscreteNestsInContinuous) {
    const auto co = kernels::inverse_sqrt_for(2.0, 0.95);
    const BoundsConfig b(0.0, 2.0);
    const auto cont = band_for_weakly_singular(InfluenceModel::weakly_singular(2.0, 0.95), b, 1.0);
    EXPECT_NEAR(cont.beta_min, 1.9, 1e-14);
    EXPECT_NEAR(cont.beta_max, 2.1, 1e-14);
    for (std::size_t n : {64u, 256u, 1024u}) {
        const auto disc = band_for_weakly_singular(InfluenceModel::tabulated(kernels::inverse_sqrt(n, co.a, co.b)), b, 1.0);
        EXPECT_GE(disc.beta_min, cont.beta_min - 1e-12) << n;
        EXPECT_LE(disc.beta_max, cont.beta_max + 1e-12) << n;
    }
    EXPECT_THROW(band_for_weakly_singular(InfluenceModel::weakly_singular(2.0, 0.95), BoundsConfig(0.0, 3.0), 1.0),
                 std::domain_error);
}

TEST(BoundOracle, TiesKeepIndexOrder) {
    const std::vector<double> psi(8, 1.0);
    const auto r = bound_oracle(psi, BoundsConfig(0.0, 2.0), 1.0, OracleTarget::Max);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(r.density[i], 2.0);
    for (std::size_t i = 4; i < 8; ++i) EXPECT_DOUBLE_EQ(r.density[i], 0.0);
}
