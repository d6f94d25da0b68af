#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcomb/combs.hpp"
#include "qcomb/gflow.hpp"
#include "qcomb/operators.hpp"

namespace qcomb {

// Subsystem names: device output qubit A_i, outcome C_i, device input qubit A'_i.
std::string a_label(int v);
std::string c_label(int v);
std::string ap_label(int v);

struct PauliString {
    int phase = 0;  // power of i
    std::map<int, char> letters;

    PauliString operator*(const PauliString& o) const;
    PauliString adjoint() const;
    PauliString transpose() const;
    Mat matrix(int n) const;
};

PauliString stabilizer(const OpenGraph& graph, int v);
// K_S = prod_{v in S} K_v
PauliString stabilizer(const OpenGraph& graph, const VertexSet& s);

struct GraphState {
    OpenGraph graph;
    LabeledOperator state;
};

// rho_G on factors prefix+v, v = 1..n (prefix "A" or "Ap").
GraphState graph_state(const OpenGraph& graph, const std::string& prefix = "A", long dim_cap = 4096);

struct PlaneMeasurement {
    Plane plane = Plane::XY;
    double angle = 0.0;
};

// |+_a> for outcome 0, |-_a> for outcome 1.
Vec measurement_vector(const PlaneMeasurement& m, int outcome);
Mat measurement_projector(const PlaneMeasurement& m, int outcome);
// Choi operator on (out_label, in_label): sum_k |k><k| (x) P_k^T.
LabeledOperator measurement_channel(const PlaneMeasurement& m, const std::string& in_label, const std::string& out_label);
// Single-outcome branch of the measurement channel.
LabeledOperator measurement_effect(const PlaneMeasurement& m, int outcome, const std::string& in_label,
                                   const std::string& out_label);

// Z rotation with R_Z(a)|+> proportional to |+_a>_XY.
Mat rz(double angle);

// U_corr(c) on n qubits; c maps measured vertices to bits. frame conjugates X corrections (X -> R X R^dag).
Mat correction_unitary(const CorrectionSets& cs, int n, const std::map<int, int>& c, const Mat& frame = Mat());

// Measured vertices (O^c) listed in the order they are measured.
using MeasurementOrder = std::vector<int>;

TimeStepStructure sigma_structure(const OpenGraph& graph, const MeasurementOrder& order);
Comb build_sigma_mbqc(const Gflow& g, const OpenGraph& graph, const MeasurementOrder& order);
// Same operator from raw correction sets (no gflow or order checks).
Comb build_sigma_from_sets(const CorrectionSets& cs, const OpenGraph& graph, const MeasurementOrder& order,
                           const Mat& frame = Mat());

// sigma * rho (graph state contracted into A'), reordered to causal order with structure
// C->A_first, C_first->A_second, ..., C_last->A_O.
Comb contract_graph_state(const Comb& sigma, const OpenGraph& graph, const MeasurementOrder& order,
                          const LabeledOperator& rho_on_ap);

// Post-selected output state on A_O for outcome string c, unnormalized.
LabeledOperator branch_output(const Comb& device, const OpenGraph& graph, const std::map<int, PlaneMeasurement>& angles,
                              const std::map<int, int>& c);
double check_determinism(const Gflow& g, const OpenGraph& graph, const std::map<int, PlaneMeasurement>& angles);
double check_determinism(const CorrectionSets& cs, const OpenGraph& graph, const MeasurementOrder& order,
                         const std::map<int, PlaneMeasurement>& angles);

struct QcmReport {
    bool channels_valid = false;
    bool commute = false;
    bool product_matches = false;
    double product_residual = 0.0;
    bool ok() const { return channels_valid && commute && product_matches; }
};
// Node channel rho_{A_i | C_Pa(i), A'_i} on (A_i, C_Pa(i)..., A'_i).
LabeledOperator node_channel(const CorrectionSets& cs, int v, const MeasurementOrder& order);
QcmReport check_qcm_structure(const Gflow& g, const OpenGraph& graph);
// Product of the given node channels compared with sigma (negative-control helper).
double qcm_product_residual(const std::vector<LabeledOperator>& channels, const Comb& sigma);

double check_causal_equivalence(const std::vector<Gflow>& gflows, const OpenGraph& graph);

struct GflowCombOptions {
    std::optional<MeasurementOrder> order;
    double tol = 1e-9;
};
MeasurementOrder default_measurement_order(const std::vector<Gflow>& gflows, const OpenGraph& graph);
ClassicalQuantumComb build_D_gflow(const OpenGraph& graph, const std::vector<Gflow>& gflows, const std::vector<double>& prior,
                                   const GflowCombOptions& opt = {});
ClassicalQuantumComb build_D_mp(const OpenGraph& graph, const GflowCombOptions& opt = {});
ClassicalQuantumComb build_D_calibr(int angle_count);

}  // namespace qcomb
