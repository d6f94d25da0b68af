#pragma once

#include <vector>

#include "qcomb/gflow.hpp"

namespace qcomb::fixtures {

// Four-vertex graph with I = {1}, O = {3,4}; planes left free.
OpenGraph four_qubit_graph();
// Catalogue g1..g15 (index i holds g_{i+1}).
std::vector<Gflow> four_qubit_catalogue();
// 1-based catalogue index of g, or 0 if absent.
int catalogue_index(const Gflow& g);
// g1, g2, g4, g5: qubits 1 and 2 in XY with 1 < 2.
std::vector<int> xy_restricted_indices();

// Triangle on {1,2,3} used for the minimal BQC instance (I and O unset).
OpenGraph bqc_triangle();
// Line 1-2-3 with I = {1}, O = {3}, XY planes.
OpenGraph calibration_line();

// Seeds for the printed 8-angle set and a 4-angle set.
std::vector<double> eight_angle_seeds();
std::vector<double> four_angle_seeds();

}  // namespace qcomb::fixtures
