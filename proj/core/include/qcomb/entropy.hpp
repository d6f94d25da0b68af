#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcomb/combs.hpp"
#include "qcomb/sdp.hpp"

namespace qcomb {

struct MinEntropyOptions {
    SdpOptions sdp;
    long dim_cap = 4096;
};

struct MinEntropyResult {
    double p_guess = 0.0;
    double h_min = 0.0;
    std::string status;
    double duality_gap = 0.0;
    double dual_residual = 0.0;
    double primal_residual = 0.0;
    double wall_ms = 0.0;
    long variables = 0;
    int iterations = 0;
    std::optional<LabeledOperator> gamma;  // quantum certificate
    std::vector<LabeledOperator> w;        // dual multipliers per x
    std::optional<ClassicalComb> classical_gamma;
    std::vector<int> classical_guess;      // per joint entry: guessed x, -1 off the strategy's path
};

MinEntropyResult min_entropy(const ClassicalQuantumComb& cq, const MinEntropyOptions& opt = {});

struct GuessingStrategy {
    LabeledOperator e;  // sum_x |x><x| (x) W_x^T, X leftmost
    TimeStepStructure structure;
    ValidationReport report;
    double achieved = 0.0;
    double gap = 0.0;
};
// Dual optimal strategy from a solved quantum instance; throws SolverFailure if the gap exceeds gap_tol.
GuessingStrategy extract_strategy(const MinEntropyResult& r, const ClassicalQuantumComb& cq, double gap_tol = 1e-5);

// Classical cq comb in sparse form; the layout is in causal order.
struct SparseClassicalCq {
    SpaceLayout layout;
    TimeStepStructure structure;
    std::vector<double> prior;
    std::vector<std::vector<std::pair<long, double>>> blocks;
    std::vector<std::string> x_names;
};
SparseClassicalCq to_sparse(const ClassicalCqComb& cq);

// Exact guessing probability by backward induction; rounds > 1 uses the m-fold product comb.
MinEntropyResult min_entropy_classical(const SparseClassicalCq& cq, int rounds = 1, long work_cap = 2'000'000'000L);
MinEntropyResult min_entropy_classical(const ClassicalCqComb& cq, int rounds = 1);

struct ClassicalBounds {
    double lower = 0.0;
    double upper = 0.0;
};
// Uniform-input lower bound and input-maximised upper bound on P_guess of the m-round comb.
ClassicalBounds classical_bounds(const SparseClassicalCq& cq, int rounds = 1, long work_cap = 2'000'000'000L);

struct RoundValue {
    int rounds = 1;
    double p_guess = 0.0;
    std::optional<ClassicalBounds> bounds;
};
std::vector<RoundValue> monotonicity_check(const ClassicalQuantumComb& cq, int m_max, const MinEntropyOptions& opt = {});
std::vector<RoundValue> monotonicity_check(const SparseClassicalCq& cq, int m_max);

}  // namespace qcomb
