#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcomb/operators.hpp"

namespace qcomb {

// One time step; an empty label list is the trivial space C.
struct Slot {
    std::vector<std::string> in;
    std::vector<std::string> out;
    bool operator==(const Slot&) const = default;
};

struct TimeStepStructure {
    std::vector<Slot> steps;

    std::vector<std::string> inputs() const;
    std::vector<std::string> outputs() const;
    // Labels in causal order: in_1, out_1, in_2, out_2, ...
    std::vector<std::string> causal_order() const;
    bool operator==(const TimeStepStructure&) const = default;
};

// Throws InvalidInput unless every layout factor appears in exactly one slot.
void check_structure(const TimeStepStructure& s, const SpaceLayout& layout);

struct Comb {
    LabeledOperator op;
    TimeStepStructure structure;
    bool normalized = true;
};

struct ClassicalComb {
    SpaceLayout layout;
    Eigen::VectorXd diag;
    TimeStepStructure structure;
    bool normalized = true;
};

struct ClassicalQuantumComb {
    std::vector<double> prior;
    std::vector<Comb> blocks;
    SubsystemLabel x_label{"X", 1};
    std::vector<std::string> x_names;
};

struct ClassicalCqComb {
    std::vector<double> prior;
    std::vector<ClassicalComb> blocks;
    SubsystemLabel x_label{"X", 1};
    std::vector<std::string> x_names;
};

struct ValidationOptions {
    double tol = 1e-9;
    double psd_tol = 1e-8;
    bool require_normalized = true;
};

struct StepResidual {
    std::size_t step = 0;  // 0-based index into structure.steps
    double residual = 0.0;
};

struct ValidationReport {
    bool valid = false;
    bool hermitian = false;
    bool psd = false;
    double min_eigenvalue = 0.0;
    std::vector<StepResidual> residuals;  // last step first
    double d0 = 0.0;
    bool normalized = false;
    std::string failure;

    double max_residual() const;
};

ValidationReport validate_comb(const LabeledOperator& op, const TimeStepStructure& s, const ValidationOptions& opt = {});
ValidationReport validate_comb(const Comb& c, const ValidationOptions& opt = {});
ValidationReport validate_classical_comb(const ClassicalComb& c, double tol = 1e-12, bool require_normalized = true);

// Throws InvalidInput on prior/layout/structure inconsistencies or invalid blocks.
void check_cq(const ClassicalQuantumComb& cq, const ValidationOptions& opt = {});
void check_cq(const ClassicalCqComb& cq, double tol = 1e-12);

// Sum_x P(x)|x><x| (x) sigma_x with X leftmost; guarded by dim_cap.
LabeledOperator assemble(const ClassicalQuantumComb& cq, long dim_cap = 4096);
// Structures for the assembled operator with X first or last in causal order.
TimeStepStructure structure_x_first(const TimeStepStructure& s, const std::string& x);
TimeStepStructure structure_x_last(const TimeStepStructure& s, const std::string& x);
// Membership test: assembled operator validated under both orderings.
bool validate_both_orderings(const ClassicalQuantumComb& cq, const ValidationOptions& opt = {}, long dim_cap = 4096);

std::string round_label(const std::string& name, int round);
ClassicalQuantumComb multi_round(const ClassicalQuantumComb& cq, int m, long dim_cap = 4096);
ClassicalCqComb multi_round(const ClassicalCqComb& cq, int m, long length_cap = 1L << 24);

// Interleaved tester: C->in_1, out_1->in_2, ..., out_{n-1}->in_n, out_n->C (empty slots dropped).
TimeStepStructure dual_structure(const TimeStepStructure& s);
// Guessing-strategy structure: the tester with the final effect replaced by an output on x.
TimeStepStructure guessing_structure(const TimeStepStructure& s, const std::string& x);

// Tr[D E^T], with E reordered onto D's layout.
cplx born(const LabeledOperator& d, const LabeledOperator& e);

}  // namespace qcomb
