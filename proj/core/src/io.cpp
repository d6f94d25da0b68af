#include "qcomb/io.hpp"

#include <fstream>
#include <sstream>

#include "qcomb/error.hpp"

namespace qcomb::io {

namespace {

template <class T>
T get(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("field '") + key + "': " + e.what());
    }
}

std::vector<std::string> names(const json& j) {
    try {
        return j.get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("label list: ") + e.what());
    }
}

json set_json(const VertexSet& s) { return json(std::vector<int>(s.begin(), s.end())); }

VertexSet set_from(const json& j) {
    try {
        auto v = j.get<std::vector<int>>();
        return {v.begin(), v.end()};
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("vertex list: ") + e.what());
    }
}

std::string kind_of(const json& j) { return j.is_object() && j.contains("kind") ? get<std::string>(j, "kind") : ""; }

}  // namespace

json to_json(const SpaceLayout& l) {
    json a = json::array();
    for (const auto& f : l.factors()) a.push_back({{"name", f.name}, {"dim", f.dim}});
    return a;
}

json to_json(const TimeStepStructure& s) {
    json a = json::array();
    for (const auto& st : s.steps) a.push_back({{"in", st.in}, {"out", st.out}});
    return a;
}

json to_json(const Comb& c) {
    json rows = json::array();
    for (long i = 0; i < c.op.data.rows(); ++i) {
        json row = json::array();
        for (long k = 0; k < c.op.data.cols(); ++k) row.push_back({c.op.data(i, k).real(), c.op.data(i, k).imag()});
        rows.push_back(std::move(row));
    }
    return {{"kind", "quantum"},
            {"layout", to_json(c.op.layout)},
            {"structure", to_json(c.structure)},
            {"normalized", c.normalized},
            {"matrix", std::move(rows)}};
}

json to_json(const ClassicalComb& c) {
    return {{"kind", "classical"},
            {"layout", to_json(c.layout)},
            {"structure", to_json(c.structure)},
            {"normalized", c.normalized},
            {"diag", std::vector<double>(c.diag.data(), c.diag.data() + c.diag.size())}};
}

json to_json(const ClassicalQuantumComb& cq) {
    json b = json::array();
    for (const auto& x : cq.blocks) b.push_back(to_json(x));
    return {{"kind", "cq"}, {"x_label", cq.x_label.name}, {"prior", cq.prior}, {"x_names", cq.x_names}, {"blocks", b}};
}

json to_json(const ClassicalCqComb& cq) {
    json b = json::array();
    for (const auto& x : cq.blocks) b.push_back(to_json(x));
    return {{"kind", "classical-cq"}, {"x_label", cq.x_label.name}, {"prior", cq.prior}, {"x_names", cq.x_names},
            {"blocks", b}};
}

json to_json(const OpenGraph& g) {
    json planes = json::object();
    for (const auto& [v, p] : g.planes) planes[std::to_string(v)] = to_string(p);
    json edges = json::array();
    for (const auto& [a, b] : g.edges) edges.push_back({a, b});
    return {{"vertices", g.n}, {"edges", edges}, {"inputs", set_json(g.inputs)}, {"outputs", set_json(g.outputs)},
            {"planes", planes}};
}

json to_json(const Gflow& g) {
    json m = json::object(), planes = json::object();
    for (const auto& [v, s] : g.g) m[std::to_string(v)] = set_json(s);
    for (const auto& [v, p] : g.planes) planes[std::to_string(v)] = to_string(p);
    return {{"g", m}, {"planes", planes}};
}

json to_json(const ValidationReport& r) {
    json res = json::array();
    for (const auto& s : r.residuals) res.push_back({{"step", s.step}, {"residual", s.residual}});
    json j = {{"valid", r.valid},       {"hermitian", r.hermitian},   {"psd", r.psd},
              {"min_eigenvalue", r.min_eigenvalue}, {"residuals", res}, {"d0", r.d0},
              {"normalized", r.normalized}};
    if (!r.failure.empty()) j["failure"] = r.failure;
    return j;
}

json to_json(const MinEntropyResult& r) {
    return {{"p_guess", r.p_guess},
            {"h_min", r.h_min},
            {"status", r.status},
            {"duality_gap", r.duality_gap},
            {"dual_residual", r.dual_residual},
            {"primal_residual", r.primal_residual},
            {"wall_ms", r.wall_ms},
            {"variables", r.variables},
            {"iterations", r.iterations}};
}

json dag_to_json(const DirectedEdges& e, int n) {
    json edges = json::array();
    for (const auto& [a, b] : e) edges.push_back({a, b});
    return {{"vertices", n}, {"edges", edges}};
}

SpaceLayout layout_from_json(const json& j) {
    if (!j.is_array()) throw InvalidInput("layout must be an array");
    std::vector<SubsystemLabel> f;
    for (const auto& e : j) f.push_back({get<std::string>(e, "name"), get<int>(e, "dim")});
    return SpaceLayout(f);
}

TimeStepStructure structure_from_json(const json& j) {
    if (!j.is_array()) throw InvalidInput("structure must be an array");
    TimeStepStructure s;
    for (const auto& e : j) {
        if (!e.is_object()) throw InvalidInput("structure entries must be objects");
        s.steps.push_back({e.contains("in") ? names(e["in"]) : std::vector<std::string>{},
                           e.contains("out") ? names(e["out"]) : std::vector<std::string>{}});
    }
    return s;
}

Comb comb_from_json(const json& j) {
    Comb c;
    const auto layout = layout_from_json(get<json>(j, "layout"));
    const long d = layout.total_dim();
    const json m = get<json>(j, "matrix");
    if (!m.is_array() || static_cast<long>(m.size()) != d)
        throw InvalidInput("matrix must have " + std::to_string(d) + " rows");
    Mat data(d, d);
    for (long i = 0; i < d; ++i) {
        if (!m[i].is_array() || static_cast<long>(m[i].size()) != d)
            throw InvalidInput("matrix row " + std::to_string(i) + " must have " + std::to_string(d) + " entries");
        for (long k = 0; k < d; ++k) {
            const auto& e = m[i][k];
            if (e.is_number())
                data(i, k) = e.get<double>();
            else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
                data(i, k) = cplx(e[0].get<double>(), e[1].get<double>());
            else
                throw InvalidInput("matrix entry (" + std::to_string(i) + "," + std::to_string(k) +
                                   ") must be a number or [re, im]");
        }
    }
    c.op = LabeledOperator(layout, data);
    c.structure = structure_from_json(get<json>(j, "structure"));
    c.normalized = j.value("normalized", true);
    check_structure(c.structure, c.op.layout);
    return c;
}

ClassicalComb classical_comb_from_json(const json& j) {
    ClassicalComb c;
    c.layout = layout_from_json(get<json>(j, "layout"));
    const auto d = get<std::vector<double>>(j, "diag");
    if (static_cast<long>(d.size()) != c.layout.total_dim())
        throw InvalidInput("diag must have " + std::to_string(c.layout.total_dim()) + " entries");
    c.diag = Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<long>(d.size()));
    c.structure = structure_from_json(get<json>(j, "structure"));
    c.normalized = j.value("normalized", true);
    check_structure(c.structure, c.layout);
    return c;
}

ClassicalQuantumComb cq_from_json(const json& j) {
    ClassicalQuantumComb cq;
    cq.prior = get<std::vector<double>>(j, "prior");
    cq.x_label.name = j.value("x_label", std::string("X"));
    for (const auto& b : get<json>(j, "blocks")) cq.blocks.push_back(comb_from_json(b));
    if (j.contains("x_names")) cq.x_names = names(j["x_names"]);
    cq.x_label.dim = static_cast<int>(cq.blocks.size());
    return cq;
}

ClassicalCqComb classical_cq_from_json(const json& j) {
    ClassicalCqComb cq;
    cq.prior = get<std::vector<double>>(j, "prior");
    cq.x_label.name = j.value("x_label", std::string("X"));
    for (const auto& b : get<json>(j, "blocks")) cq.blocks.push_back(classical_comb_from_json(b));
    if (j.contains("x_names")) cq.x_names = names(j["x_names"]);
    cq.x_label.dim = static_cast<int>(cq.blocks.size());
    return cq;
}

OpenGraph graph_from_json(const json& j) {
    OpenGraph g;
    g.n = get<int>(j, "vertices");
    for (const auto& e : get<json>(j, "edges")) {
        if (!e.is_array() || e.size() != 2) throw InvalidInput("edges must be pairs of vertices");
        g.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    if (j.contains("inputs")) g.inputs = set_from(j["inputs"]);
    if (j.contains("outputs")) g.outputs = set_from(j["outputs"]);
    if (j.contains("planes"))
        for (const auto& [k, v] : j["planes"].items()) g.planes[std::stoi(k)] = plane_from_string(v.get<std::string>());
    return g;
}

Gflow gflow_from_json(const json& j) {
    Gflow g;
    const auto sets = get<json>(j, "g");
    for (const auto& [k, v] : sets.items()) g.g[std::stoi(k)] = set_from(v);
    if (j.contains("planes"))
        for (const auto& [k, v] : j["planes"].items()) g.planes[std::stoi(k)] = plane_from_string(v.get<std::string>());
    return g;
}

AnyComb any_from_json(const json& j) {
    const std::string k = kind_of(j);
    if (k == "quantum") return comb_from_json(j);
    if (k == "classical") return classical_comb_from_json(j);
    if (k == "cq") return cq_from_json(j);
    if (k == "classical-cq") return classical_cq_from_json(j);
    throw InvalidInput("unknown comb kind '" + k + "'");
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string("JSON parse error: ") + e.what());
    }
}

json read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw InvalidInput(path + ": " + e.what());
    }
}

void write_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace qcomb::io
