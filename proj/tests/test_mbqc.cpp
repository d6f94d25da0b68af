#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "qcomb/error.hpp"
#include "qcomb/fixtures.hpp"
#include "qcomb/mbqc.hpp"
#include "support.hpp"

using namespace qcomb;

TEST(Mbqc, PauliStringAlgebra) {
    PauliString x, y;
    x.letters = {{1, 'X'}};
    y.letters = {{1, 'Y'}};
    const auto xy = x * y;
    EXPECT_EQ(xy.letters.at(1), 'Z');
    EXPECT_EQ(xy.phase % 4, 1);  // XY = iZ
    EXPECT_LT((xy.matrix(1) - cplx(0, 1) * pauli::Z()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Mbqc, GraphStateIsStabilised) {
    const auto g = fixtures::four_qubit_graph();
    const auto rho = graph_state(g).state;
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
    for (int v = 1; v <= g.n; ++v) {
        const Mat k = stabilizer(g, v).matrix(g.n);
        EXPECT_NEAR((k * rho.data).trace().real(), 1.0, 1e-12) << "K_" << v;
    }
    // Single-qubit marginals of a connected graph state are maximally mixed.
    const auto r1 = partial_trace(rho, {"A2", "A3", "A4"});
    EXPECT_LT((r1.data - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Mbqc, StabiliserProductsMultiply) {
    const auto g = fixtures::four_qubit_graph();
    const Mat k12 = stabilizer(g, VertexSet{1, 2}).matrix(g.n);
    EXPECT_LT((k12 - stabilizer(g, 1).matrix(g.n) * stabilizer(g, 2).matrix(g.n)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Mbqc, MeasurementBasesAreOrthonormal) {
    for (Plane p : {Plane::XY, Plane::XZ, Plane::YZ})
        for (double a : {0.0, 0.3, 1.9, 4.4}) {
            const Vec v0 = measurement_vector({p, a}, 0), v1 = measurement_vector({p, a}, 1);
            EXPECT_NEAR(v0.norm(), 1.0, 1e-14);
            EXPECT_NEAR(v1.norm(), 1.0, 1e-14);
            EXPECT_NEAR(std::abs(v0.dot(v1)), 0.0, 1e-14);
        }
    Vec plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const Vec r = rz(0.7) * plus;
    EXPECT_NEAR(std::abs(measurement_vector({Plane::XY, 0.7}, 0).dot(r)), 1.0, 1e-14);
}

TEST(Mbqc, MeasurementChannelIsAChannel) {
    const auto ch = measurement_channel({Plane::XZ, 0.4}, "A", "C");
    TimeStepStructure s;
    s.steps = {{{"A"}, {"C"}}};
    EXPECT_TRUE(validate_comb(ch, s).valid);
}

TEST(Mbqc, CatalogueIsDeterministic) {
    const auto g = fixtures::four_qubit_graph();
    std::mt19937_64 rng(2024);
    for (const auto& f : fixtures::four_qubit_catalogue())
        EXPECT_LE(check_determinism(f, g, support::random_plane_angles(f, rng)), 1e-9);
}

TEST(Mbqc, MissingCorrectionsBreakDeterminism) {
    const auto g = fixtures::four_qubit_graph();
    const auto f = fixtures::four_qubit_catalogue()[0];
    std::mt19937_64 rng(5);
    const auto angles = support::random_plane_angles(f, rng);
    CorrectionSets none;
    EXPECT_GT(check_determinism(none, g, {1, 2}, angles), 1e-3);
}

TEST(Mbqc, SigmaIsACombAndAQuantumCausalModel) {
    const auto g = fixtures::four_qubit_graph();
    for (int i : {0, 2, 7, 14}) {
        const auto f = fixtures::four_qubit_catalogue()[i];
        const auto sigma = build_sigma_mbqc(f, g, default_measurement_order({f}, g));
        const auto rep = validate_comb(sigma);
        EXPECT_TRUE(rep.valid) << rep.failure;
        const auto q = check_qcm_structure(f, g);
        EXPECT_TRUE(q.ok()) << "g" << i + 1 << " residual " << q.product_residual;
    }
}

TEST(Mbqc, XyRestrictedGflowsAreCausallyEquivalent) {
    const auto g = fixtures::four_qubit_graph();
    const auto cat = fixtures::four_qubit_catalogue();
    std::vector<Gflow> xs;
    for (int i : fixtures::xy_restricted_indices()) xs.push_back(cat[i - 1]);
    EXPECT_LE(check_causal_equivalence(xs, g), 1e-9);
    EXPECT_THROW(check_causal_equivalence({cat[0], cat[5]}, g), InvalidInput);
}

TEST(Mbqc, GflowCombBlocksAreCombs) {
    const auto g = fixtures::four_qubit_graph();
    const auto cat = fixtures::four_qubit_catalogue();
    const auto cq = build_D_gflow(g, cat, std::vector<double>(15, 1.0 / 15));
    ASSERT_EQ(cq.blocks.size(), 15u);
    for (const auto& b : cq.blocks) {
        EXPECT_EQ(b.op.dim(), 64);
        EXPECT_LE(validate_comb(b).max_residual(), 1e-9);
    }
    const auto mp = build_D_mp(g);
    EXPECT_EQ(mp.blocks.size(), 3u);
}

TEST(Mbqc, CalibrationCombRange) {
    EXPECT_THROW(build_D_calibr(1), InvalidInput);
    EXPECT_THROW(build_D_calibr(33), InvalidInput);
    const auto cq = build_D_calibr(3);
    EXPECT_EQ(cq.blocks.size(), 3u);
    for (const auto& b : cq.blocks) EXPECT_TRUE(validate_comb(b).valid);
}
