#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcomb/combs.hpp"
#include "qcomb/entropy.hpp"
#include "qcomb/gflow.hpp"

namespace qcomb {

// Sorted angles in [0, 2pi) closed under a -> -a and a -> a + pi; neg/shift act on indices.
struct AngleSet {
    std::vector<double> angles;
    std::vector<int> neg;
    std::vector<int> shift;

    int size() const { return static_cast<int>(angles.size()); }
    int find(double a) const;  // -1 if absent
};

AngleSet closed_angle_set(const std::vector<double>& seeds, int target_size = 0);

// Graph, agreed total order on all vertices, and angle set.
struct BqcSetup {
    OpenGraph graph;
    std::vector<int> order;
    AngleSet angles;
};

std::string reported_angle_label(int v);
std::string reported_outcome_label(int v);

struct OutputChoice {
    VertexSet outputs;
    std::vector<Gflow> gflows;
    std::vector<CorrectionSets> sets;
};
// Non-trivial output sets admitting an XY gflow (I empty) compatible with the total order.
std::vector<OutputChoice> output_sets(const BqcSetup& s);

// Vectors are indexed by vertex - 1; returns the index of the reported angle.
int reported_angle(const BqcSetup& s, const CorrectionSets& cs, int v, const std::vector<int>& alpha,
                   const std::vector<int>& r, const std::vector<int>& c_prime);

SpaceLayout bqc_layout(const BqcSetup& s);
TimeStepStructure bqc_structure(const BqcSetup& s);

ClassicalComb build_sigma_bqc(const BqcSetup& s, const std::vector<int>& alpha, const std::vector<int>& r,
                              const CorrectionSets& cs);
// Uniform mixture over the given gflows and all pads, as sorted (entry, weight) pairs.
std::vector<std::pair<long, double>> sigma_alpha_o_sparse(const BqcSetup& s, const std::vector<int>& alpha,
                                                          const std::vector<CorrectionSets>& sets);
ClassicalComb build_sigma_alpha_O(const BqcSetup& s, const std::vector<int>& alpha, const std::vector<CorrectionSets>& sets);

struct ClientOptions {
    std::optional<std::vector<VertexSet>> outputs;  // restrict the output sets
    std::optional<std::vector<double>> p_output;    // P(O); uniform if absent
};
// x = (alpha, O) with P(alpha, O) = P(O) / |A|^n.
SparseClassicalCq build_D_client_sparse(const BqcSetup& s, const ClientOptions& opt = {});
ClassicalCqComb build_D_client(const BqcSetup& s, const ClientOptions& opt = {}, long length_cap = 1L << 24);

struct TheoremBounds {
    double single_round = 0.0;  // n + log2 |O-sets|
    double any_round = 0.0;     // -log2 sum_O P(O) / 2^|O|
};
TheoremBounds theorem_bounds(const BqcSetup& s, const ClientOptions& opt = {});

// Each (g, alpha, c') maps distinct pads to distinct reported angles.
bool check_preimage_uniqueness(const BqcSetup& s);
// max |sigma_{alpha,O} - sigma_{alpha~,O}| over alpha~ differing by pi on output qubits.
double check_output_symmetry(const BqcSetup& s);

}  // namespace qcomb
