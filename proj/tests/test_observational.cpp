#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qcomb/entropy.hpp"
#include "qcomb/error.hpp"
#include "qcomb/mbqc.hpp"
#include "qcomb/observational.hpp"

using namespace qcomb;

namespace {

// x in {0, 1} prepares |x> on A1; the outcome comes back on C1 and nothing follows.
ClassicalQuantumComb computational_basis_device() {
    ClassicalQuantumComb cq;
    TimeStepStructure s;
    s.steps = {{{}, {"A1"}}, {{"C1"}, {}}};
    const SpaceLayout l({{"A1", 2}, {"C1", 2}});
    for (int x = 0; x < 2; ++x) cq.blocks.push_back({LabeledOperator(l, kron(ket_bra(2, x, x), Mat::Identity(2, 2))), s, true});
    cq.prior = {0.5, 0.5};
    cq.x_label = {"X", 2};
    return cq;
}

}  // namespace

TEST(Observational, FibonacciSphereCoversTheSphere) {
    const auto pts = fibonacci_sphere(200);
    ASSERT_EQ(pts.size(), 200u);
    double zsum = 0.0;
    for (const auto& p : pts) {
        EXPECT_GE(p.theta, 0.0);
        EXPECT_LE(p.theta, std::numbers::pi);
        zsum += std::cos(p.theta);
    }
    EXPECT_NEAR(zsum, 0.0, 1e-9);
    EXPECT_THROW(fibonacci_sphere(0), InvalidInput);
}

TEST(Observational, BlochStatesFormABasis) {
    const BlochDirection d{1.1, 2.3};
    const Vec a = bloch_vector_state(d, 0), b = bloch_vector_state(d, 1);
    EXPECT_NEAR(a.norm(), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(a.dot(b)), 0.0, 1e-14);
    // <sigma> of outcome 0 points along (theta, phi).
    const double x = 2.0 * (std::conj(a[0]) * a[1]).real(), z = std::norm(a[0]) - std::norm(a[1]);
    EXPECT_NEAR(x, std::sin(1.1) * std::cos(2.3), 1e-12);
    EXPECT_NEAR(z, std::cos(1.1), 1e-12);
}

TEST(Observational, MeasuringInTheRightBasisIsPerfect) {
    const auto cq = computational_basis_device();
    EXPECT_NEAR(observational_value(cq, {{0.0, 0.0}}), 1.0, 1e-9);
    EXPECT_NEAR(observational_value(cq, {{std::numbers::pi / 2, 0.4}}), 0.5, 1e-9);
    ObservationalOptions o;
    o.mesh = 50;
    o.refine_levels = 4;
    const auto r = observational_search(cq, o);
    EXPECT_GT(r.p_guess, 0.999);
    EXPECT_LE(r.p_guess, 1.0 + 1e-9);
    EXPECT_TRUE(r.pure_branches);
}

TEST(Observational, NoMeasuredWireReducesToStateDiscrimination) {
    ClassicalQuantumComb cq;
    TimeStepStructure s;
    s.steps = {{{}, {"A"}}};
    const double h = std::sqrt(0.5);
    Vec zero(2), plus(2);
    zero << 1, 0;
    plus << h, h;
    for (const auto& v : {zero, plus}) cq.blocks.push_back({LabeledOperator(SpaceLayout({{"A", 2}}), v * v.adjoint()), s, true});
    cq.prior = {0.5, 0.5};
    cq.x_label = {"X", 2};
    EXPECT_NEAR(observational_search(cq).p_guess, 0.5 * (1.0 + h), 1e-9);
}

TEST(Observational, NeverBeatsTheOptimalStrategy) {
    const auto cq = build_D_calibr(3);
    ObservationalOptions o;
    o.mesh = 40;
    o.refine_levels = 2;
    const auto obs = observational_search(cq, o);
    const auto opt = min_entropy(cq);
    EXPECT_LE(obs.p_guess, opt.p_guess + 1e-7);
    EXPECT_GE(obs.p_guess, 1.0 / 3.0 - 1e-9);
}

TEST(Observational, RejectsUnsupportedStructures) {
    ClassicalQuantumComb cq = computational_basis_device();
    cq.blocks[0].structure.steps[1] = {{}, {"C1"}};
    cq.blocks[1].structure = cq.blocks[0].structure;
    EXPECT_THROW(observational_search(cq), InvalidInput);
    ObservationalOptions o;
    o.mesh = 0;
    EXPECT_THROW(observational_search(computational_basis_device(), o), InvalidInput);
}
