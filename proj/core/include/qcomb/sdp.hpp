#pragma once

#include <string>
#include <vector>

#include "qcomb/combs.hpp"
#include "qcomb/operators.hpp"

namespace qcomb {

struct SdpOptions {
    double gap_tol = 1e-8;     // relative duality gap target
    double mu = 10.0;          // barrier parameter growth
    int max_newton = 2000;
    long var_cap = 4096;       // real variables of the reduced comb space
    bool dephase_classical = true;
};

// min Tr[G]/prod(dim in) s.t. G >= P(x) sigma_x for all x, G an unnormalised comb on `structure`.
struct CombSdpResult {
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;
    double dual_residual = 0.0;
    int newton_steps = 0;
    long variables = 0;
    std::vector<std::string> classical_labels;
    LabeledOperator gamma;            // optimal G on the block layout
    std::vector<LabeledOperator> w;   // dual multipliers W_x >= 0 with sum_x W_x a dual comb
};

CombSdpResult solve_guessing_sdp(const std::vector<double>& prior, const std::vector<LabeledOperator>& blocks,
                                 const TimeStepStructure& structure, const SdpOptions& opt = {});

// Labels on which every block is block-diagonal.
std::vector<std::string> classical_labels(const std::vector<LabeledOperator>& blocks, double tol = 1e-12);

// max sum_x Tr[M_x v_x v_x^dag] over POVMs {M_x}; vectors carry their weights.
double pure_state_guessing(const std::vector<Vec>& weighted, double gap_tol = 1e-11);
// Same for general ensembles {P(x) rho_x} (weights folded into rho).
double state_guessing(const std::vector<Mat>& weighted, const SdpOptions& opt = {});

// Hermitian <-> real coordinates with Tr[X B_a] = coords(X)_a for an orthonormal Hermitian basis.
Eigen::VectorXd herm_coords(const Mat& x);
Mat herm_from_coords(const Eigen::VectorXd& c, long d);

}  // namespace qcomb
