#include "qcomb/fixtures.hpp"

#include <numbers>

namespace qcomb::fixtures {

OpenGraph four_qubit_graph() {
    OpenGraph g;
    g.n = 4;
    g.edges = {{1, 2}, {1, 3}, {1, 4}, {2, 4}, {3, 4}};
    g.inputs = {1};
    g.outputs = {3, 4};
    return g;
}

std::vector<Gflow> four_qubit_catalogue() {
    const std::vector<VertexSet> first{{2}, {3}, {3}, {4}, {2, 3, 4}};
    const std::vector<VertexSet> second_xy{{3, 4}, {3, 4}, {4}, {3, 4}, {3, 4}};
    const std::vector<VertexSet> second_xz{{2, 4}, {2, 4}, {2, 3, 4}, {2, 4}, {2, 4}};
    const std::vector<VertexSet> second_yz{{2, 3}, {2, 3}, {2}, {2, 3}, {2, 3}};
    std::vector<Gflow> out;
    auto add = [&](const std::vector<VertexSet>& second, Plane p2) {
        for (std::size_t i = 0; i < first.size(); ++i) {
            Gflow g;
            g.g = {{1, first[i]}, {2, second[i]}};
            g.planes = {{1, Plane::XY}, {2, p2}};
            out.push_back(g);
        }
    };
    add(second_xy, Plane::XY);
    add(second_xz, Plane::XZ);
    add(second_yz, Plane::YZ);
    return out;
}

int catalogue_index(const Gflow& g) {
    const auto cat = four_qubit_catalogue();
    for (std::size_t i = 0; i < cat.size(); ++i)
        if (cat[i].g == g.g && cat[i].planes == g.planes) return static_cast<int>(i) + 1;
    return 0;
}

std::vector<int> xy_restricted_indices() { return {1, 2, 4, 5}; }

OpenGraph bqc_triangle() {
    OpenGraph g;
    g.n = 3;
    g.edges = {{1, 2}, {1, 3}, {2, 3}};
    return g;
}

OpenGraph calibration_line() {
    OpenGraph g;
    g.n = 3;
    g.edges = {{1, 2}, {2, 3}};
    g.inputs = {1};
    g.outputs = {3};
    g.planes = {{1, Plane::XY}, {2, Plane::XY}};
    return g;
}

std::vector<double> eight_angle_seeds() { return {std::numbers::pi / 5, std::numbers::pi / 3}; }
std::vector<double> four_angle_seeds() { return {std::numbers::pi / 4}; }

}  // namespace qcomb::fixtures
