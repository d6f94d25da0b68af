#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace qcomb {

enum class Plane { XY, XZ, YZ };

std::string to_string(Plane p);
Plane plane_from_string(const std::string& s);

using VertexSet = std::set<int>;

// Vertices are 1..n. A plane missing from `planes` means "any plane" during enumeration.
struct OpenGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
    VertexSet inputs;
    VertexSet outputs;
    std::map<int, Plane> planes;

    VertexSet vertices() const;
    VertexSet non_outputs() const;
    VertexSet neighbours(int v) const;
    bool adjacent(int a, int b) const;
};

// Throws InvalidInput unless the graph is simple, connected and I, O, planes are consistent.
void check_graph(const OpenGraph& graph);

struct Gflow {
    std::map<int, VertexSet> g;
    std::map<int, Plane> planes;
    bool operator==(const Gflow&) const = default;
};

struct GflowCheck {
    bool valid = false;
    std::vector<std::string> violations;
};

struct CorrectionSets {
    std::map<int, VertexSet> x_sets;
    std::map<int, VertexSet> z_sets;
};

using DirectedEdges = std::vector<std::pair<int, int>>;

VertexSet odd_neighbourhood(const OpenGraph& graph, const VertexSet& k);
// Edges v -> v' generated by the first two gflow clauses.
DirectedEdges generated_order(const Gflow& g, const OpenGraph& graph);
GflowCheck verify_gflow(const OpenGraph& graph, const Gflow& candidate);

struct EnumerationOptions {
    std::optional<std::vector<int>> total_order;
    long cap = 10'000'000;
};
std::vector<Gflow> enumerate_gflows(const OpenGraph& graph, const EnumerationOptions& opt = {});

CorrectionSets correction_sets(const Gflow& g, const OpenGraph& graph);
// Edges i -> j for i in X_j or Z_j; throws if a cycle is found.
DirectedEdges induced_dag(const Gflow& g, const OpenGraph& graph);
bool is_acyclic(int n, const DirectedEdges& edges);
bool orders_compatible(const std::vector<Gflow>& gflows, const OpenGraph& graph);
bool embeds_in(const DirectedEdges& order, const std::vector<int>& total_order);
// Lexicographically smallest topological order of `vertices` under the union of generated orders.
std::optional<std::vector<int>> common_total_order(const std::vector<Gflow>& gflows, const OpenGraph& graph,
                                                   const VertexSet& vertices);

std::string to_dot(const DirectedEdges& edges, int n);

}  // namespace qcomb
