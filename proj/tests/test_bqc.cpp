#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qcomb/bqc.hpp"
#include "qcomb/error.hpp"
#include "qcomb/fixtures.hpp"

using namespace qcomb;

namespace {

BqcSetup triangle(int angles) {
    const auto seeds = angles == 4 ? fixtures::four_angle_seeds() : fixtures::eight_angle_seeds();
    return {fixtures::bqc_triangle(), {1, 2, 3}, closed_angle_set(seeds, angles)};
}

}  // namespace

TEST(Bqc, AngleClosure) {
    const auto a4 = closed_angle_set({std::numbers::pi / 4});
    ASSERT_EQ(a4.size(), 4);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(a4.angles[k], (2 * k + 1) * std::numbers::pi / 4, 1e-12);
    const auto a8 = closed_angle_set(fixtures::eight_angle_seeds());
    ASSERT_EQ(a8.size(), 8);
    for (int i = 0; i < a8.size(); ++i) {
        EXPECT_EQ(a8.neg[a8.neg[i]], i);
        EXPECT_EQ(a8.shift[a8.shift[i]], i);
        EXPECT_NEAR(std::fmod(a8.angles[a8.shift[i]] - a8.angles[i] + 4 * std::numbers::pi, 2 * std::numbers::pi),
                    std::numbers::pi, 1e-12);
    }
    EXPECT_EQ(closed_angle_set({0.0}).size(), 2);  // {0, pi}
    EXPECT_THROW(closed_angle_set({std::numbers::pi / 4}, 8), InvalidInput);
    EXPECT_THROW(closed_angle_set({}), InvalidInput);
}

TEST(Bqc, TriangleHasOneOutputSet) {
    const auto outs = output_sets(triangle(4));
    ASSERT_EQ(outs.size(), 1u);
    EXPECT_EQ(outs[0].outputs, (VertexSet{2, 3}));
    EXPECT_EQ(outs[0].gflows.size(), 2u);
}

TEST(Bqc, ReportedAngleWithZeroPadsAndOutcomes) {
    const auto s = triangle(4);
    const auto cs = output_sets(s)[0].sets[0];
    const std::vector<int> alpha{0, 1, 2}, zero{0, 0, 0};
    // Vertex 1 has no corrections, so with r = 0 the angle is reported as is.
    EXPECT_EQ(reported_angle(s, cs, 1, alpha, zero, zero), 0);
    // A pad on vertex 1 shifts its reported angle by pi.
    EXPECT_EQ(reported_angle(s, cs, 1, alpha, {1, 0, 0}, zero), s.angles.shift[0]);
}

TEST(Bqc, SigmaCombsAreValid) {
    const auto s = triangle(4);
    const auto o = output_sets(s)[0];
    const auto sig = build_sigma_bqc(s, {0, 1, 2}, {1, 0, 1}, o.sets[1]);
    EXPECT_TRUE(validate_classical_comb(sig).valid);
    const auto mix = build_sigma_alpha_O(s, {3, 2, 1}, o.sets);
    EXPECT_TRUE(validate_classical_comb(mix).valid);
}

TEST(Bqc, SingleRoundGuessingIsOneEighth) {
    const auto s = triangle(4);
    const auto d = build_D_client_sparse(s);
    EXPECT_EQ(d.blocks.size(), 64u);
    const auto r = min_entropy_classical(d);
    EXPECT_NEAR(r.p_guess, 0.125, 1e-12);
    EXPECT_NEAR(r.h_min, 3.0, 1e-12);
    const auto b = classical_bounds(d);
    EXPECT_NEAR(b.lower, 0.125, 1e-12);
    EXPECT_NEAR(b.upper, 0.125, 1e-12);
    const auto dense = build_D_client(s);
    EXPECT_NEAR(min_entropy_classical(dense).p_guess, 0.125, 1e-12);
}

TEST(Bqc, AnalyticBoundsOfTheTriangle) {
    const auto tb = theorem_bounds(triangle(4));
    EXPECT_NEAR(tb.single_round, 3.0, 1e-12);
    EXPECT_NEAR(tb.any_round, 2.0, 1e-12);
}

TEST(Bqc, PreimagesAndOutputSymmetry) {
    const auto s = triangle(4);
    EXPECT_TRUE(check_preimage_uniqueness(s));
    EXPECT_LE(check_output_symmetry(s), 1e-12);
}

TEST(Bqc, OrderSelectsOutputSets) {
    OpenGraph g;
    g.n = 2;
    g.edges = {{1, 2}};
    const BqcSetup s{g, {1, 2}, closed_angle_set({std::numbers::pi / 4})};
    const auto outs = output_sets(s);
    ASSERT_EQ(outs.size(), 1u);
    EXPECT_EQ(outs[0].outputs, VertexSet{2});
}
