#include "qcomb/gflow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <sstream>

#include "qcomb/error.hpp"

namespace qcomb {

std::string to_string(Plane p) {
    switch (p) {
        case Plane::XY: return "XY";
        case Plane::XZ: return "XZ";
        case Plane::YZ: return "YZ";
    }
    return "?";
}

Plane plane_from_string(const std::string& s) {
    if (s == "XY") return Plane::XY;
    if (s == "XZ") return Plane::XZ;
    if (s == "YZ") return Plane::YZ;
    throw InvalidInput("unknown measurement plane '" + s + "'");
}

VertexSet OpenGraph::vertices() const {
    VertexSet v;
    for (int i = 1; i <= n; ++i) v.insert(i);
    return v;
}

VertexSet OpenGraph::non_outputs() const {
    VertexSet v;
    for (int i = 1; i <= n; ++i)
        if (!outputs.count(i)) v.insert(i);
    return v;
}

VertexSet OpenGraph::neighbours(int v) const {
    VertexSet out;
    for (const auto& [a, b] : edges) {
        if (a == v) out.insert(b);
        if (b == v) out.insert(a);
    }
    return out;
}

bool OpenGraph::adjacent(int a, int b) const {
    return std::any_of(edges.begin(), edges.end(),
                       [&](const auto& e) { return (e.first == a && e.second == b) || (e.first == b && e.second == a); });
}

void check_graph(const OpenGraph& graph) {
    if (graph.n < 1) throw InvalidInput("graph has no vertices");
    if (graph.n > 62) throw InvalidInput("graph has more than 62 vertices");
    std::set<std::pair<int, int>> seen;
    for (auto [a, b] : graph.edges) {
        if (a < 1 || a > graph.n || b < 1 || b > graph.n)
            throw InvalidInput("edge (" + std::to_string(a) + "," + std::to_string(b) + ") references an unknown vertex");
        if (a == b) throw InvalidInput("self-loop at vertex " + std::to_string(a));
        if (!seen.insert({std::min(a, b), std::max(a, b)}).second)
            throw InvalidInput("duplicate edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
    }
    for (int v : graph.inputs)
        if (v < 1 || v > graph.n) throw InvalidInput("input vertex " + std::to_string(v) + " out of range");
    for (int v : graph.outputs)
        if (v < 1 || v > graph.n) throw InvalidInput("output vertex " + std::to_string(v) + " out of range");
    for (const auto& [v, p] : graph.planes)
        if (v < 1 || v > graph.n || graph.outputs.count(v))
            throw InvalidInput("plane assigned to vertex " + std::to_string(v) + " which is not a measured vertex");
    // connectivity
    std::vector<bool> vis(graph.n + 1, false);
    std::vector<int> stack{1};
    vis[1] = true;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : graph.neighbours(v))
            if (!vis[w]) {
                vis[w] = true;
                stack.push_back(w);
            }
    }
    for (int v = 1; v <= graph.n; ++v)
        if (!vis[v]) throw InvalidInput("graph is not connected (vertex " + std::to_string(v) + ")");
}

namespace {

using Mask = std::uint64_t;

Mask to_mask(const VertexSet& s) {
    Mask m = 0;
    for (int v : s) m |= Mask{1} << (v - 1);
    return m;
}

VertexSet from_mask(Mask m) {
    VertexSet s;
    for (int v = 1; m; ++v, m >>= 1)
        if (m & 1) s.insert(v);
    return s;
}

std::vector<Mask> adjacency_masks(const OpenGraph& graph) {
    std::vector<Mask> adj(graph.n + 1, 0);
    for (auto [a, b] : graph.edges) {
        adj[a] |= Mask{1} << (b - 1);
        adj[b] |= Mask{1} << (a - 1);
    }
    return adj;
}

Mask odd_mask(const std::vector<Mask>& adj, Mask k) {
    Mask out = 0;
    for (int v = 1; v < static_cast<int>(adj.size()); ++v) {
        if (__builtin_popcountll(adj[v] & k) & 1) out |= Mask{1} << (v - 1);
    }
    return out;
}

bool plane_ok(Plane p, bool in_g, bool in_odd) {
    switch (p) {
        case Plane::XY: return !in_g && in_odd;
        case Plane::XZ: return in_g && in_odd;
        case Plane::YZ: return in_g && !in_odd;
    }
    return false;
}

const char* plane_rule(Plane p) {
    switch (p) {
        case Plane::XY: return "XY requires v not in g(v) and v in Odd(g(v))";
        case Plane::XZ: return "XZ requires v in g(v) and v in Odd(g(v))";
        case Plane::YZ: return "YZ requires v in g(v) and v not in Odd(g(v))";
    }
    return "";
}

int plane_clause(Plane p) { return p == Plane::XY ? 3 : p == Plane::XZ ? 4 : 5; }

}  // namespace

VertexSet odd_neighbourhood(const OpenGraph& graph, const VertexSet& k) {
    for (int v : k)
        if (v < 1 || v > graph.n) throw InvalidInput("vertex " + std::to_string(v) + " out of range");
    return from_mask(odd_mask(adjacency_masks(graph), to_mask(k)));
}

DirectedEdges generated_order(const Gflow& gf, const OpenGraph& graph) {
    const auto adj = adjacency_masks(graph);
    std::set<std::pair<int, int>> e;
    for (const auto& [v, gv] : gf.g) {
        const Mask gm = to_mask(gv);
        const Mask targets = (gm | odd_mask(adj, gm)) & ~(Mask{1} << (v - 1));
        for (int w : from_mask(targets)) e.insert({v, w});
    }
    return {e.begin(), e.end()};
}

bool is_acyclic(int n, const DirectedEdges& edges) {
    std::vector<int> indeg(n + 1, 0);
    std::vector<std::vector<int>> out(n + 1);
    for (auto [a, b] : edges) {
        out[a].push_back(b);
        ++indeg[b];
    }
    std::vector<int> q;
    for (int v = 1; v <= n; ++v)
        if (!indeg[v]) q.push_back(v);
    int seen = 0;
    while (!q.empty()) {
        int v = q.back();
        q.pop_back();
        ++seen;
        for (int w : out[v])
            if (--indeg[w] == 0) q.push_back(w);
    }
    return seen == n;
}

GflowCheck verify_gflow(const OpenGraph& graph, const Gflow& c) {
    GflowCheck r;
    const auto measured = graph.non_outputs();
    for (const auto& [v, gv] : c.g) {
        if (!measured.count(v)) throw InvalidInput("g is defined on vertex " + std::to_string(v) + " outside O^c");
        for (int w : gv) {
            if (w < 1 || w > graph.n) throw InvalidInput("g(" + std::to_string(v) + ") contains unknown vertex");
            if (graph.inputs.count(w))
                throw InvalidInput("g(" + std::to_string(v) + ") contains input vertex " + std::to_string(w));
        }
    }
    for (int v : measured)
        if (!c.g.count(v)) throw InvalidInput("g is undefined on measured vertex " + std::to_string(v));
    for (int v : measured)
        if (!c.planes.count(v)) throw InvalidInput("no measurement plane for vertex " + std::to_string(v));

    for (int v : measured) {
        const VertexSet& gv = c.g.at(v);
        const auto odd = odd_neighbourhood(graph, gv);
        const Plane p = c.planes.at(v);
        if (graph.planes.count(v) && graph.planes.at(v) != p)
            r.violations.push_back("vertex " + std::to_string(v) + ": plane differs from the open graph's assignment");
        if (!plane_ok(p, gv.count(v) > 0, odd.count(v) > 0))
            r.violations.push_back("vertex " + std::to_string(v) + ": clause " + std::to_string(plane_clause(p)) + " (" +
                                   plane_rule(p) + ")");
    }
    if (!is_acyclic(graph.n, generated_order(c, graph)))
        r.violations.push_back("clauses 1-2: the generated order has a cycle, no strict partial order exists");
    r.valid = r.violations.empty();
    return r;
}

bool embeds_in(const DirectedEdges& order, const std::vector<int>& total_order) {
    std::map<int, int> pos;
    for (std::size_t i = 0; i < total_order.size(); ++i) pos[total_order[i]] = static_cast<int>(i);
    for (auto [a, b] : order) {
        if (!pos.count(a) || !pos.count(b)) return false;
        if (pos[a] >= pos[b]) return false;
    }
    return true;
}

std::vector<Gflow> enumerate_gflows(const OpenGraph& graph, const EnumerationOptions& opt) {
    check_graph(graph);
    const auto adj = adjacency_masks(graph);
    const VertexSet measured_set = graph.non_outputs();
    const std::vector<int> measured(measured_set.begin(), measured_set.end());
    Mask allowed = 0;
    for (int v = 1; v <= graph.n; ++v)
        if (!graph.inputs.count(v)) allowed |= Mask{1} << (v - 1);
    const int free_bits = __builtin_popcountll(allowed);
    if (static_cast<double>(measured.size()) * std::pow(2.0, free_bits) > static_cast<double>(opt.cap))
        throw CapExceeded("gflow search space exceeds cap");

    struct Option {
        Mask g;
        Plane p;
        Mask targets;
    };
    std::vector<std::vector<Option>> options;
    double product = 1.0;
    for (int v : measured) {
        std::vector<Option> ov;
        const Mask vb = Mask{1} << (v - 1);
        std::vector<Plane> planes = graph.planes.count(v) ? std::vector<Plane>{graph.planes.at(v)}
                                                          : std::vector<Plane>{Plane::XY, Plane::XZ, Plane::YZ};
        // subsets of `allowed` in increasing bitmask order
        for (Mask s = 0;; s = (s - allowed) & allowed) {
            const Mask odd = odd_mask(adj, s);
            for (Plane p : planes)
                if (plane_ok(p, s & vb, odd & vb)) ov.push_back({s, p, (s | odd) & ~vb});
            if (s == allowed) break;
        }
        std::sort(ov.begin(), ov.end(), [](const Option& a, const Option& b) {
            return a.g != b.g ? a.g < b.g : static_cast<int>(a.p) < static_cast<int>(b.p);
        });
        product *= static_cast<double>(std::max<std::size_t>(ov.size(), 1));
        options.push_back(std::move(ov));
    }
    if (product > static_cast<double>(opt.cap)) throw CapExceeded("gflow candidate product exceeds cap");

    std::vector<Gflow> out;
    std::vector<std::size_t> idx(measured.size(), 0);
    for (const auto& ov : options)
        if (ov.empty()) return out;
    while (true) {
        Gflow cand;
        DirectedEdges e;
        for (std::size_t i = 0; i < measured.size(); ++i) {
            const auto& o = options[i][idx[i]];
            cand.g[measured[i]] = from_mask(o.g);
            cand.planes[measured[i]] = o.p;
            for (int w : from_mask(o.targets)) e.push_back({measured[i], w});
        }
        if (is_acyclic(graph.n, e) && (!opt.total_order || embeds_in(e, *opt.total_order))) out.push_back(std::move(cand));
        // odometer, last vertex fastest
        std::size_t k = measured.size();
        while (k > 0) {
            --k;
            if (++idx[k] < options[k].size()) break;
            idx[k] = 0;
            if (k == 0) return out;
        }
        if (measured.empty()) return out;
    }
}

CorrectionSets correction_sets(const Gflow& gf, const OpenGraph& graph) {
    CorrectionSets cs;
    for (int v = 1; v <= graph.n; ++v) {
        cs.x_sets[v] = {};
        cs.z_sets[v] = {};
    }
    for (const auto& [vp, gv] : gf.g) {
        for (int v : gv)
            if (v != vp) cs.x_sets[v].insert(vp);
        for (int v : odd_neighbourhood(graph, gv))
            if (v != vp) cs.z_sets[v].insert(vp);
    }
    return cs;
}

DirectedEdges induced_dag(const Gflow& gf, const OpenGraph& graph) {
    const auto cs = correction_sets(gf, graph);
    std::set<std::pair<int, int>> e;
    for (int j = 1; j <= graph.n; ++j) {
        for (int i : cs.x_sets.at(j)) e.insert({i, j});
        for (int i : cs.z_sets.at(j)) e.insert({i, j});
    }
    DirectedEdges out(e.begin(), e.end());
    if (!is_acyclic(graph.n, out)) throw std::logic_error("induced DAG has a cycle; gflow verification is inconsistent");
    return out;
}

bool orders_compatible(const std::vector<Gflow>& gflows, const OpenGraph& graph) {
    DirectedEdges all;
    for (const auto& g : gflows) {
        const auto e = generated_order(g, graph);
        all.insert(all.end(), e.begin(), e.end());
    }
    return is_acyclic(graph.n, all);
}

std::optional<std::vector<int>> common_total_order(const std::vector<Gflow>& gflows, const OpenGraph& graph,
                                                   const VertexSet& vertices) {
    DirectedEdges all;
    for (const auto& g : gflows) {
        const auto e = generated_order(g, graph);
        all.insert(all.end(), e.begin(), e.end());
    }
    if (!is_acyclic(graph.n, all)) return std::nullopt;
    // Restrict the transitive order to `vertices` via reachability.
    std::vector<std::vector<bool>> reach(graph.n + 1, std::vector<bool>(graph.n + 1, false));
    for (auto [a, b] : all) reach[a][b] = true;
    for (int k = 1; k <= graph.n; ++k)
        for (int i = 1; i <= graph.n; ++i)
            if (reach[i][k])
                for (int j = 1; j <= graph.n; ++j)
                    if (reach[k][j]) reach[i][j] = true;
    std::map<int, int> indeg;
    for (int v : vertices) {
        indeg[v] = 0;
        for (int u : vertices)
            if (reach[u][v]) ++indeg[v];
    }
    std::priority_queue<int, std::vector<int>, std::greater<int>> q;
    for (auto [v, d] : indeg)
        if (!d) q.push(v);
    std::vector<int> order;
    while (!q.empty()) {
        int v = q.top();
        q.pop();
        order.push_back(v);
        for (int w : vertices)
            if (reach[v][w] && --indeg[w] == 0) q.push(w);
    }
    return order;
}

std::string to_dot(const DirectedEdges& edges, int n) {
    std::ostringstream os;
    os << "digraph dag {\n";
    for (int v = 1; v <= n; ++v) os << "  " << v << ";\n";
    for (auto [a, b] : edges) os << "  " << a << " -> " << b << ";\n";
    os << "}\n";
    return os.str();
}

}  // namespace qcomb
