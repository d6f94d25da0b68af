#pragma once

#include <vector>

#include "qcomb/combs.hpp"

namespace qcomb {

struct ObservationalOptions {
    int mesh = 400;          // Fibonacci-sphere points per measured wire
    int refine_levels = 6;   // local 5x5 refinements with halving spacing
    long max_evaluations = 50'000'000;
};

struct BlochDirection {
    double theta = 0.0;
    double phi = 0.0;
};

struct ObservationalResult {
    double p_guess = 0.0;
    std::vector<BlochDirection> directions;  // one per measured wire, outcome 0 projects onto it
    long evaluations = 0;
    long pruned = 0;
    bool pure_branches = true;
    bool boundary_hit = false;  // optimum on the edge of the last refinement grid
};

// Blocks must have structure C->A_1, C_1->A_2, ..., C_k->OUT with qubit A_i and bit C_i.
ObservationalResult observational_search(const ClassicalQuantumComb& cq, const ObservationalOptions& opt = {});
double observational_value(const ClassicalQuantumComb& cq, const std::vector<BlochDirection>& dirs);

std::vector<BlochDirection> fibonacci_sphere(int points);
Vec bloch_vector_state(const BlochDirection& d, int outcome);

}  // namespace qcomb
