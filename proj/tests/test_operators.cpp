#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qcomb/error.hpp"
#include "qcomb/operators.hpp"

using namespace qcomb;

namespace {

Mat random_density(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Mat g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = cplx(n(rng), n(rng));
    Mat r = g * g.adjoint();
    return r / r.trace();
}

// Unnormalised maximally entangled projector on (in, out).
LabeledOperator identity_choi(const std::string& in, const std::string& out, int d) {
    Mat m = Mat::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i * d + i, j * d + j) = 1.0;
    return LabeledOperator(SpaceLayout({{in, d}, {out, d}}), m);
}

}  // namespace

TEST(Operators, PartialTraceOfProductKeepsFactor) {
    std::mt19937_64 rng(7);
    const LabeledOperator a(SpaceLayout({{"A", 2}}), random_density(2, rng));
    const LabeledOperator b(SpaceLayout({{"B", 3}}), random_density(3, rng));
    const auto ab = kron(a, b);
    EXPECT_LT(max_abs_diff(partial_trace(ab, {"B"}), a), 1e-12);
    EXPECT_LT(max_abs_diff(partial_trace(ab, {"A"}), b), 1e-12);
    EXPECT_NEAR(partial_trace(ab, {"A", "B"}).data(0, 0).real(), 1.0, 1e-12);
}

TEST(Operators, LeftmostFactorIsMostSignificant) {
    const LabeledOperator a(SpaceLayout({{"A", 2}}), ket_bra(2, 1, 1));
    const LabeledOperator b(SpaceLayout({{"B", 3}}), ket_bra(3, 0, 0));
    EXPECT_DOUBLE_EQ(kron(a, b).data(3, 3).real(), 1.0);
}

TEST(Operators, PermuteRoundTrip) {
    std::mt19937_64 rng(3);
    const LabeledOperator op(SpaceLayout({{"A", 2}, {"B", 3}, {"C", 2}}), random_density(12, rng));
    const auto p = permute(op, {"C", "A", "B"});
    EXPECT_EQ(p.layout.names(), (std::vector<std::string>{"C", "A", "B"}));
    EXPECT_LT(max_abs_diff(permute(p, {"A", "B", "C"}), op), 1e-14);
    EXPECT_THROW(permute(op, {"A", "B"}), InvalidInput);
}

TEST(Operators, PartialTransposeOfSwapIsEntangledProjector) {
    // (SWAP)^{T_B} = d |Phi><Phi|
    Mat swap = Mat::Zero(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) swap(i * 2 + j, j * 2 + i) = 1.0;
    const LabeledOperator s(SpaceLayout({{"A", 2}, {"B", 2}}), swap);
    EXPECT_LT(max_abs_diff(partial_transpose(s, {"B"}), identity_choi("A", "B", 2)), 1e-14);
}

TEST(Operators, LinkProductWithIdentityChannelRelabels) {
    std::mt19937_64 rng(11);
    const LabeledOperator rho(SpaceLayout({{"A", 2}}), random_density(2, rng));
    const auto out = link_product(rho, identity_choi("A", "B", 2));
    ASSERT_EQ(out.layout.names(), std::vector<std::string>{"B"});
    EXPECT_LT((out.data - rho.data).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Operators, LinkProductComposesChannels) {
    // Z conjugation composed with itself is the identity channel.
    Mat z(2, 2);
    z << 1, 0, 0, -1;
    Mat v = Mat::Zero(4, 1);
    v(0) = 1.0;
    v(3) = -1.0;
    const LabeledOperator zab(SpaceLayout({{"A", 2}, {"B", 2}}), v * v.adjoint());
    const LabeledOperator zbc(SpaceLayout({{"B", 2}, {"C", 2}}), v * v.adjoint());
    EXPECT_LT(max_abs_diff(link_product(zab, zbc), identity_choi("A", "C", 2)), 1e-12);
}

TEST(Operators, PsdAndHermitianChecks) {
    Mat m(2, 2);
    m << 1, 0, 0, -0.5;
    EXPECT_FALSE(check_psd(m).psd);
    EXPECT_NEAR(check_psd(m).min_eigenvalue, -0.5, 1e-12);
    Mat h(2, 2);
    h << 1, cplx(0, 1), 0, 1;
    EXPECT_FALSE(check_psd(h).hermitian);
    EXPECT_THROW(is_psd(LabeledOperator(SpaceLayout({{"A", 2}}), h)), InvalidInput);
}

TEST(Operators, TraceNormOfPauliIsDimension) {
    EXPECT_NEAR(trace_norm(pauli::X()), 2.0, 1e-12);
    EXPECT_NEAR(trace_norm(pauli::Y()), 2.0, 1e-12);
    EXPECT_LT((pauli::X() * pauli::Y() - cplx(0, 1) * pauli::Z()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Operators, RejectsMalformedLayouts) {
    EXPECT_THROW(SpaceLayout({{"A", 2}, {"A", 2}}), InvalidInput);
    EXPECT_THROW(SpaceLayout({{"A", 0}}), InvalidInput);
    EXPECT_THROW(LabeledOperator(SpaceLayout({{"A", 2}}), Mat::Zero(3, 3)), InvalidInput);
}
