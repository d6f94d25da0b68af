#include <gtest/gtest.h>

#include "qcomb/combs.hpp"
#include "qcomb/error.hpp"
#include "support.hpp"

using namespace qcomb;

namespace {

LabeledOperator identity_choi(const std::string& in, const std::string& out) {
    Mat m = Mat::Zero(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i * 2 + i, j * 2 + j) = 1.0;
    return LabeledOperator(SpaceLayout({{in, 2}, {out, 2}}), m);
}

TimeStepStructure two_step() {
    TimeStepStructure s;
    s.steps = {{{}, {"A1"}}, {{"B1"}, {"A2"}}};
    return s;
}

}  // namespace

TEST(Combs, IdentityChannelIsAComb) {
    TimeStepStructure s;
    s.steps = {{{"A"}, {"B"}}};
    const auto rep = validate_comb(identity_choi("A", "B"), s);
    EXPECT_TRUE(rep.valid) << rep.failure;
    EXPECT_NEAR(rep.d0, 1.0, 1e-12);
    EXPECT_LE(rep.max_residual(), 1e-12);
}

TEST(Combs, BackwardSignallingIsRejected) {
    // a1 copies the later input b1.
    const SpaceLayout l({{"A1", 2}, {"B1", 2}, {"A2", 2}});
    Mat d = Mat::Zero(8, 8);
    for (int b = 0; b < 2; ++b) d((b * 2 + b) * 2, (b * 2 + b) * 2) = 1.0;
    const auto rep = validate_comb(LabeledOperator(l, d), two_step());
    EXPECT_FALSE(rep.valid);
    EXPECT_NE(rep.failure.find("partial-trace"), std::string::npos);
}

TEST(Combs, NegativeOperatorIsRejected) {
    TimeStepStructure s;
    s.steps = {{{}, {"A"}}};
    Mat d(2, 2);
    d << 1.5, 0, 0, -0.5;
    const auto rep = validate_comb(LabeledOperator(SpaceLayout({{"A", 2}}), d), s);
    EXPECT_FALSE(rep.valid);
    EXPECT_FALSE(rep.psd);
}

TEST(Combs, StructureMustCoverLayout) {
    TimeStepStructure s;
    s.steps = {{{}, {"A"}}};
    EXPECT_THROW(validate_comb(identity_choi("A", "B"), s), InvalidInput);
}

TEST(Combs, BornRuleOfStateAndTraceEffectIsOne) {
    Mat rho(2, 2);
    rho << 0.7, cplx(0.1, 0.2), cplx(0.1, -0.2), 0.3;
    const LabeledOperator d(SpaceLayout({{"A", 2}}), rho);
    const LabeledOperator e(SpaceLayout({{"A", 2}}), Mat::Identity(2, 2));
    EXPECT_NEAR(born(d, e).real(), 1.0, 1e-14);
    // Tr[D E^T] uses the transpose of the effect.
    Mat p(2, 2);
    p << 0.5, cplx(0, -0.5), cplx(0, 0.5), 0.5;  // |+i><+i|
    EXPECT_NEAR(born(d, LabeledOperator(SpaceLayout({{"A", 2}}), p)).real(), (rho * p.transpose()).trace().real(), 1e-14);
}

TEST(Combs, DualStructureInterleaves) {
    const auto d = dual_structure(two_step());
    ASSERT_EQ(d.steps.size(), 2u);
    EXPECT_EQ(d.steps[0], (Slot{{"A1"}, {"B1"}}));
    EXPECT_EQ(d.steps[1], (Slot{{"A2"}, {}}));
    const auto g = guessing_structure(two_step(), "X");
    EXPECT_EQ(g.steps.back(), (Slot{{"A2"}, {"X"}}));
}

TEST(Combs, RandomClassicalCombsValidateBothWays) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto mi = support::random_micro_instance(seed);
        for (const auto& b : mi.cq.blocks) EXPECT_TRUE(validate_classical_comb(b).valid);
        const auto q = support::as_quantum(mi.cq);
        for (const auto& b : q.blocks) EXPECT_TRUE(validate_comb(b).valid);
        EXPECT_TRUE(validate_both_orderings(q));
    }
}

TEST(Combs, MultiRoundProductIsAComb) {
    const auto q = support::as_quantum(support::random_micro_instance(2, 2).cq);
    const auto m2 = multi_round(q, 2);
    ASSERT_EQ(m2.blocks.size(), 2u);
    EXPECT_EQ(m2.blocks[0].op.dim(), 12 * 12);
    for (const auto& b : m2.blocks) {
        const auto rep = validate_comb(b);
        EXPECT_TRUE(rep.valid) << rep.failure;
    }
    const auto c2 = multi_round(support::random_micro_instance(2, 2).cq, 2);
    for (const auto& b : c2.blocks) EXPECT_TRUE(validate_classical_comb(b).valid);
}

TEST(Combs, CapGuardsAssembly) {
    const auto q = support::as_quantum(support::random_micro_instance(3).cq);
    EXPECT_THROW(assemble(q, 8), CapExceeded);
    EXPECT_EQ(assemble(q).dim(), 36);
}

TEST(Combs, PriorMustBeADistribution) {
    auto mi = support::random_micro_instance(4);
    mi.cq.prior[0] += 0.1;
    EXPECT_THROW(check_cq(mi.cq), InvalidInput);
}
