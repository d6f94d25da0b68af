#pragma once

#include <algorithm>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include "qcomb/combs.hpp"
#include "qcomb/gflow.hpp"
#include "qcomb/mbqc.hpp"

namespace qcomb::support {

// Random classical cq comb on (C -> A1), (B1 -> A2): P_x(a1, a2 | b1) = P_x(a1) P_x(a2 | a1, b1).
struct MicroInstance {
    ClassicalCqComb cq;
    int da1 = 2, db1 = 2, da2 = 3;

    double entry(int x, int a1, int b1, int a2) const { return cq.blocks[x].diag[(a1 * db1 + b1) * da2 + a2]; }

    // Independent value: sum_a1 max_b1 sum_a2 max_x P(x) P_x(a1, a2 | b1).
    double brute_force() const {
        double total = 0.0;
        for (int a1 = 0; a1 < da1; ++a1) {
            double best = 0.0;
            for (int b1 = 0; b1 < db1; ++b1) {
                double s = 0.0;
                for (int a2 = 0; a2 < da2; ++a2) {
                    double m = 0.0;
                    for (std::size_t x = 0; x < cq.blocks.size(); ++x) m = std::max(m, cq.prior[x] * entry(static_cast<int>(x), a1, b1, a2));
                    s += m;
                }
                best = std::max(best, s);
            }
            total += best;
        }
        return total;
    }
};

inline std::vector<double> random_simplex(std::mt19937_64& rng, int n) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> p(n);
    double s = 0.0;
    for (auto& v : p) s += v = e(rng);
    for (auto& v : p) v /= s;
    return p;
}

inline MicroInstance random_micro_instance(std::uint64_t seed, int nx = 3) {
    std::mt19937_64 rng(seed);
    MicroInstance mi;
    const SpaceLayout layout({{"A1", mi.da1}, {"B1", mi.db1}, {"A2", mi.da2}});
    TimeStepStructure s;
    s.steps = {{{}, {"A1"}}, {{"B1"}, {"A2"}}};
    mi.cq.prior = random_simplex(rng, nx);
    for (int x = 0; x < nx; ++x) {
        ClassicalComb c;
        c.layout = layout;
        c.structure = s;
        c.diag = Eigen::VectorXd::Zero(layout.total_dim());
        const auto pa1 = random_simplex(rng, mi.da1);
        for (int a1 = 0; a1 < mi.da1; ++a1)
            for (int b1 = 0; b1 < mi.db1; ++b1) {
                const auto pa2 = random_simplex(rng, mi.da2);
                for (int a2 = 0; a2 < mi.da2; ++a2) c.diag[(a1 * mi.db1 + b1) * mi.da2 + a2] = pa1[a1] * pa2[a2];
            }
        mi.cq.blocks.push_back(c);
        mi.cq.x_names.push_back("x" + std::to_string(x));
    }
    mi.cq.x_label = {"X", nx};
    return mi;
}

// Same comb with each block as a diagonal density operator.
inline ClassicalQuantumComb as_quantum(const ClassicalCqComb& cq) {
    ClassicalQuantumComb out;
    out.prior = cq.prior;
    out.x_label = cq.x_label;
    out.x_names = cq.x_names;
    for (const auto& b : cq.blocks) {
        Mat d = Mat::Zero(b.diag.size(), b.diag.size());
        d.diagonal() = b.diag.cast<cplx>();
        out.blocks.push_back({LabeledOperator(b.layout, d), b.structure, b.normalized});
    }
    return out;
}

inline std::map<int, PlaneMeasurement> random_plane_angles(const Gflow& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    std::map<int, PlaneMeasurement> out;
    for (const auto& [v, p] : g.planes) out[v] = {p, u(rng)};
    return out;
}

}  // namespace qcomb::support
