#include "qcomb/mbqc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcomb/error.hpp"
#include "qcomb/fixtures.hpp"

namespace qcomb {

std::string a_label(int v) { return "A" + std::to_string(v); }
std::string c_label(int v) { return "C" + std::to_string(v); }
std::string ap_label(int v) { return "Ap" + std::to_string(v); }

namespace {

// Single-qubit Pauli product a*b = i^phase * letter.
std::pair<int, char> mul_letter(char a, char b) {
    if (a == 'I') return {0, b};
    if (b == 'I') return {0, a};
    if (a == b) return {0, 'I'};
    const std::string cyc = "XYZ";
    const auto ia = cyc.find(a), ib = cyc.find(b);
    const char c = cyc[3 - ia - ib];
    return {((ib == (ia + 1) % 3) ? 1 : 3), c};
}

Mat letter_matrix(char l) {
    switch (l) {
        case 'X': return pauli::X();
        case 'Y': return pauli::Y();
        case 'Z': return pauli::Z();
        default: return pauli::I();
    }
}

cplx ipow(int k) {
    static const cplx t[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
    return t[((k % 4) + 4) % 4];
}

}  // namespace

PauliString PauliString::operator*(const PauliString& o) const {
    PauliString r;
    r.phase = phase + o.phase;
    r.letters = letters;
    for (const auto& [v, l] : o.letters) {
        const char a = r.letters.count(v) ? r.letters[v] : 'I';
        const auto [ph, c] = mul_letter(a, l);
        r.phase += ph;
        if (c == 'I')
            r.letters.erase(v);
        else
            r.letters[v] = c;
    }
    r.phase = ((r.phase % 4) + 4) % 4;
    return r;
}

PauliString PauliString::adjoint() const {
    PauliString r = *this;
    r.phase = (4 - phase) % 4;
    return r;
}

PauliString PauliString::transpose() const {
    PauliString r = *this;
    for (const auto& [v, l] : letters)
        if (l == 'Y') r.phase += 2;
    r.phase %= 4;
    return r;
}

Mat PauliString::matrix(int n) const {
    Mat m = Mat::Identity(1, 1);
    for (int v = 1; v <= n; ++v) m = kron(m, letter_matrix(letters.count(v) ? letters.at(v) : 'I'));
    return ipow(phase) * m;
}

PauliString stabilizer(const OpenGraph& graph, int v) {
    PauliString k;
    k.letters[v] = 'X';
    for (int w : graph.neighbours(v)) k.letters[w] = 'Z';
    return k;
}

PauliString stabilizer(const OpenGraph& graph, const VertexSet& s) {
    PauliString k;
    for (int v : s) k = k * stabilizer(graph, v);
    return k;
}

GraphState graph_state(const OpenGraph& graph, const std::string& prefix, long dim_cap) {
    check_graph(graph);
    const long d = 1L << graph.n;
    if (d > dim_cap) throw CapExceeded("graph state dimension " + std::to_string(d) + " exceeds cap");
    Vec psi(d);
    const double amp = 1.0 / std::sqrt(static_cast<double>(d));
    for (long x = 0; x < d; ++x) {
        int parity = 0;
        for (auto [a, b] : graph.edges) {
            const int ba = (x >> (graph.n - a)) & 1, bb = (x >> (graph.n - b)) & 1;
            parity ^= ba & bb;
        }
        psi[x] = parity ? -amp : amp;
    }
    std::vector<SubsystemLabel> f;
    for (int v = 1; v <= graph.n; ++v) f.push_back({prefix + std::to_string(v), 2});
    return {graph, LabeledOperator(SpaceLayout(f), projector(psi))};
}

Vec measurement_vector(const PlaneMeasurement& m, int outcome) {
    const double a = m.angle;
    Vec v(2);
    const double s = 1.0 / std::sqrt(2.0);
    switch (m.plane) {
        case Plane::XY:
            v << s, (outcome ? -1.0 : 1.0) * s * std::exp(cplx(0, -a));
            break;
        case Plane::XZ:
            if (!outcome)
                v << std::cos(a / 2), std::sin(a / 2);
            else
                v << std::sin(a / 2), -std::cos(a / 2);
            break;
        case Plane::YZ:
            if (!outcome)
                v << std::cos(a / 2), cplx(0, std::sin(a / 2));
            else
                v << std::sin(a / 2), cplx(0, -std::cos(a / 2));
            break;
    }
    return v;
}

Mat measurement_projector(const PlaneMeasurement& m, int outcome) { return projector(measurement_vector(m, outcome)); }

LabeledOperator measurement_channel(const PlaneMeasurement& m, const std::string& in_label, const std::string& out_label) {
    Mat d = kron(ket_bra(2, 0, 0), measurement_projector(m, 0).transpose()) +
            kron(ket_bra(2, 1, 1), measurement_projector(m, 1).transpose());
    return {SpaceLayout({{out_label, 2}, {in_label, 2}}), d};
}

LabeledOperator measurement_effect(const PlaneMeasurement& m, int outcome, const std::string& in_label,
                                   const std::string& out_label) {
    Mat d = kron(ket_bra(2, outcome, outcome), measurement_projector(m, outcome).transpose());
    return {SpaceLayout({{out_label, 2}, {in_label, 2}}), d};
}

Mat rz(double angle) {
    Mat r = Mat::Zero(2, 2);
    r(0, 0) = std::exp(cplx(0, angle / 2));
    r(1, 1) = std::exp(cplx(0, -angle / 2));
    return r;
}

Mat correction_unitary(const CorrectionSets& cs, int n, const std::map<int, int>& c, const Mat& frame) {
    const Mat x = frame.size() ? Mat(frame * pauli::X() * frame.adjoint()) : pauli::X();
    Mat u = Mat::Identity(1, 1);
    for (int v = 1; v <= n; ++v) {
        int xb = 0, zb = 0;
        if (cs.x_sets.count(v))
            for (int j : cs.x_sets.at(v)) xb ^= c.count(j) ? c.at(j) : 0;
        if (cs.z_sets.count(v))
            for (int j : cs.z_sets.at(v)) zb ^= c.count(j) ? c.at(j) : 0;
        Mat uv = Mat::Identity(2, 2);
        if (xb) uv = uv * x;
        if (zb) uv = uv * pauli::Z();
        u = kron(u, uv);
    }
    return u;
}

namespace {

std::vector<int> outputs_of(const OpenGraph& graph) { return {graph.outputs.begin(), graph.outputs.end()}; }

void check_order(const OpenGraph& graph, const MeasurementOrder& order) {
    const auto measured = graph.non_outputs();
    if (order.size() != measured.size() || VertexSet(order.begin(), order.end()) != measured)
        throw InvalidInput("measurement order must list every non-output vertex exactly once");
}

std::vector<std::map<int, int>> outcome_strings(const MeasurementOrder& order) {
    std::vector<std::map<int, int>> out;
    const long k = static_cast<long>(order.size());
    for (long bits = 0; bits < (1L << k); ++bits) {
        std::map<int, int> c;
        for (long i = 0; i < k; ++i) c[order[i]] = (bits >> (k - 1 - i)) & 1;
        out.push_back(c);
    }
    return out;
}

}  // namespace

TimeStepStructure sigma_structure(const OpenGraph& graph, const MeasurementOrder& order) {
    TimeStepStructure s;
    std::vector<std::string> prev;
    for (int v = 1; v <= graph.n; ++v) prev.push_back(ap_label(v));
    for (int v : order) {
        s.steps.push_back({prev, {a_label(v)}});
        prev = {c_label(v)};
    }
    std::vector<std::string> outs;
    for (int v : outputs_of(graph)) outs.push_back(a_label(v));
    s.steps.push_back({prev, outs});
    return s;
}

Comb build_sigma_from_sets(const CorrectionSets& cs, const OpenGraph& graph, const MeasurementOrder& order, const Mat& frame) {
    check_order(graph, order);
    const int n = graph.n;
    const long k = static_cast<long>(order.size());
    const long dq = 1L << n, dc = 1L << k;
    std::vector<SubsystemLabel> f;
    for (int v = 1; v <= n; ++v) f.push_back({a_label(v), 2});
    for (int v : order) f.push_back({c_label(v), 2});
    for (int v = 1; v <= n; ++v) f.push_back({ap_label(v), 2});
    const long d = dq * dc * dq;
    if (d > 1L << 14) throw CapExceeded("sigma_MBQC dimension " + std::to_string(d) + " exceeds cap");
    Mat op = Mat::Zero(d, d);
    const auto strings = outcome_strings(order);
    for (long ci = 0; ci < dc; ++ci) {
        const Mat u = correction_unitary(cs, n, strings[ci], frame);
        for (long a = 0; a < dq; ++a)
            for (long ap = 0; ap < dq; ++ap) {
                const long row = (a * dc + ci) * dq + ap;
                for (long b = 0; b < dq; ++b)
                    for (long bp = 0; bp < dq; ++bp) op(row, (b * dc + ci) * dq + bp) = u(a, ap) * std::conj(u(b, bp));
            }
    }
    return {LabeledOperator(SpaceLayout(f), std::move(op)), sigma_structure(graph, order), true};
}

Comb build_sigma_mbqc(const Gflow& g, const OpenGraph& graph, const MeasurementOrder& order) {
    const auto chk = verify_gflow(graph, g);
    if (!chk.valid) throw InvalidInput("not a gflow: " + chk.violations.front());
    check_order(graph, order);
    std::vector<int> full = order;
    for (int v : outputs_of(graph)) full.push_back(v);
    if (!embeds_in(generated_order(g, graph), full))
        throw InvalidInput("measurement order is incompatible with the gflow's partial order");
    return build_sigma_from_sets(correction_sets(g, graph), graph, order);
}

Comb contract_graph_state(const Comb& sigma, const OpenGraph& graph, const MeasurementOrder& order,
                          const LabeledOperator& rho_on_ap) {
    const auto linked = link_product(sigma.op, rho_on_ap);
    std::vector<std::string> causal;
    TimeStepStructure s;
    std::vector<std::string> prev;
    for (int v : order) {
        causal.push_back(a_label(v));
        s.steps.push_back({prev, {a_label(v)}});
        causal.push_back(c_label(v));
        prev = {c_label(v)};
    }
    std::vector<std::string> outs;
    for (int v : outputs_of(graph)) {
        outs.push_back(a_label(v));
        causal.push_back(a_label(v));
    }
    s.steps.push_back({prev, outs});
    return {permute(linked, causal), s, true};
}

LabeledOperator branch_output(const Comb& device, const OpenGraph&, const std::map<int, PlaneMeasurement>& angles,
                              const std::map<int, int>& c) {
    LabeledOperator eff({}, Mat::Identity(1, 1));
    for (const auto& [v, bit] : c) eff = kron(eff, measurement_effect(angles.at(v), bit, a_label(v), c_label(v)));
    return link_product(eff, device.op);
}

double check_determinism(const CorrectionSets& cs, const OpenGraph& graph, const MeasurementOrder& order,
                         const std::map<int, PlaneMeasurement>& angles) {
    const auto rho = graph_state(graph, "Ap").state;
    const auto dev = contract_graph_state(build_sigma_from_sets(cs, graph, order), graph, order, rho);
    double worst = 0.0;
    Mat ref;
    for (const auto& c : outcome_strings(order)) {
        const auto out = branch_output(dev, graph, angles, c);
        const double p = out.data.trace().real();
        if (p <= 1e-14) return 2.0;
        const Mat st = out.data / p;
        if (ref.size() == 0)
            ref = st;
        else
            worst = std::max(worst, trace_norm(st - ref));
    }
    return worst;
}

double check_determinism(const Gflow& g, const OpenGraph& graph, const std::map<int, PlaneMeasurement>& angles) {
    const auto order = default_measurement_order({g}, graph);
    return check_determinism(correction_sets(g, graph), graph, order, angles);
}

LabeledOperator node_channel(const CorrectionSets& cs, int v, const MeasurementOrder& order) {
    std::vector<int> pa;
    for (int u : order)
        if ((cs.x_sets.count(v) && cs.x_sets.at(v).count(u)) || (cs.z_sets.count(v) && cs.z_sets.at(v).count(u)))
            pa.push_back(u);
    std::vector<SubsystemLabel> f{{a_label(v), 2}};
    for (int u : pa) f.push_back({c_label(u), 2});
    f.push_back({ap_label(v), 2});
    const long dc = 1L << pa.size();
    Mat op = Mat::Zero(4 * dc, 4 * dc);
    for (long ci = 0; ci < dc; ++ci) {
        int xb = 0, zb = 0;
        for (std::size_t i = 0; i < pa.size(); ++i) {
            const int bit = (ci >> (pa.size() - 1 - i)) & 1;
            if (cs.x_sets.count(v) && cs.x_sets.at(v).count(pa[i])) xb ^= bit;
            if (cs.z_sets.count(v) && cs.z_sets.at(v).count(pa[i])) zb ^= bit;
        }
        Mat u = Mat::Identity(2, 2);
        if (xb) u = u * pauli::X();
        if (zb) u = u * pauli::Z();
        for (long a = 0; a < 2; ++a)
            for (long ap = 0; ap < 2; ++ap)
                for (long b = 0; b < 2; ++b)
                    for (long bp = 0; bp < 2; ++bp)
                        op((a * dc + ci) * 2 + ap, (b * dc + ci) * 2 + bp) = u(a, ap) * std::conj(u(b, bp));
    }
    return {SpaceLayout(f), op};
}

namespace {

// (small (x) I) * big, with small's factors a subset of big's layout.
LabeledOperator left_multiply(const LabeledOperator& small, const LabeledOperator& big) {
    std::vector<std::string> order = small.layout.names();
    for (const auto& n : big.layout.names())
        if (!small.layout.has(n)) order.push_back(n);
    auto b = permute(big, order);
    const long s = small.dim(), r = b.dim() / s;
    Mat out = Mat::Zero(b.dim(), b.dim());
    for (long i = 0; i < s; ++i)
        for (long j = 0; j < s; ++j) {
            const cplx w = small.data(i, j);
            if (w != cplx(0)) out.middleRows(i * r, r) += w * b.data.middleRows(j * r, r);
        }
    return permute(LabeledOperator(b.layout, std::move(out)), big.layout.names());
}

}  // namespace

double qcm_product_residual(const std::vector<LabeledOperator>& channels, const Comb& sigma) {
    LabeledOperator prod = identity(sigma.op.layout);
    for (const auto& ch : channels) prod = left_multiply(ch, prod);
    return max_abs_diff(prod, sigma.op);
}

QcmReport check_qcm_structure(const Gflow& g, const OpenGraph& graph) {
    const auto order = default_measurement_order({g}, graph);
    const auto cs = correction_sets(g, graph);
    const auto sigma = build_sigma_mbqc(g, graph, order);
    std::vector<LabeledOperator> ch;
    QcmReport rep;
    rep.channels_valid = true;
    for (int v = 1; v <= graph.n; ++v) {
        ch.push_back(node_channel(cs, v, order));
        TimeStepStructure s;
        std::vector<std::string> in;
        for (const auto& n : ch.back().layout.names())
            if (n != a_label(v)) in.push_back(n);
        s.steps.push_back({in, {a_label(v)}});
        if (!validate_comb(ch.back(), s).valid) rep.channels_valid = false;
    }
    rep.commute = true;
    for (std::size_t i = 0; i < ch.size(); ++i)
        for (std::size_t j = i + 1; j < ch.size(); ++j) {
            std::vector<SubsystemLabel> u = ch[i].layout.factors();
            for (const auto& f : ch[j].layout.factors())
                if (!ch[i].layout.has(f.name)) u.push_back(f);
            const SpaceLayout ul(u);
            const auto a = embed(ch[i], ul), b = embed(ch[j], ul);
            if ((a.data * b.data - b.data * a.data).cwiseAbs().maxCoeff() > 1e-12) rep.commute = false;
        }
    rep.product_residual = qcm_product_residual(ch, sigma);
    rep.product_matches = rep.product_residual <= 1e-12;
    return rep;
}

MeasurementOrder default_measurement_order(const std::vector<Gflow>& gflows, const OpenGraph& graph) {
    const auto measured = graph.non_outputs();
    if (auto o = common_total_order(gflows, graph, measured)) return *o;
    return {measured.begin(), measured.end()};
}

double check_causal_equivalence(const std::vector<Gflow>& gflows, const OpenGraph& graph) {
    if (gflows.empty()) throw InvalidInput("no gflows given");
    for (const auto& g : gflows)
        if (g.planes != gflows.front().planes)
            throw InvalidInput("causal equivalence requires identical measurement planes");
    if (!orders_compatible(gflows, graph)) throw InvalidInput("gflow partial orders are not mutually compatible");
    const auto order = default_measurement_order(gflows, graph);
    const auto rho = graph_state(graph, "Ap").state;
    std::vector<Comb> blocks;
    for (const auto& g : gflows)
        blocks.push_back(contract_graph_state(build_sigma_mbqc(g, graph, order), graph, order, rho));
    double worst = 0.0;
    for (const auto& c : outcome_strings(order)) {
        LabeledOperator proj({}, Mat::Identity(1, 1));
        for (const auto& [v, bit] : c) proj = kron(proj, LabeledOperator(SpaceLayout({{c_label(v), 2}}), ket_bra(2, bit, bit)));
        const auto ref = link_product(proj, blocks.front().op);
        for (std::size_t i = 1; i < blocks.size(); ++i) {
            const auto st = link_product(proj, blocks[i].op);
            worst = std::max(worst, trace_norm(st.data - permute(ref, st.layout.names()).data));
        }
    }
    return worst;
}

ClassicalQuantumComb build_D_gflow(const OpenGraph& graph, const std::vector<Gflow>& gflows, const std::vector<double>& prior,
                                   const GflowCombOptions& opt) {
    if (gflows.empty()) throw InvalidInput("no gflows given");
    if (prior.size() != gflows.size()) throw InvalidInput("prior length does not match the number of gflows");
    const auto order = opt.order ? *opt.order : default_measurement_order(gflows, graph);
    const auto rho = graph_state(graph, "Ap").state;
    ClassicalQuantumComb cq;
    cq.prior = prior;
    cq.x_label = {"X", static_cast<int>(gflows.size())};
    for (std::size_t i = 0; i < gflows.size(); ++i) {
        const auto chk = verify_gflow(graph, gflows[i]);
        if (!chk.valid) throw InvalidInput("gflow " + std::to_string(i + 1) + " is invalid: " + chk.violations.front());
        auto block = contract_graph_state(build_sigma_from_sets(correction_sets(gflows[i], graph), graph, order), graph, order, rho);
        const auto rep = validate_comb(block, {opt.tol, 1e-8, true});
        if (!rep.valid)
            throw InvalidInput("gflow " + std::to_string(i + 1) + " does not give a comb in the chosen measurement order: " +
                               rep.failure);
        cq.blocks.push_back(std::move(block));
        cq.x_names.push_back("g" + std::to_string(i + 1));
    }
    check_cq(cq, {opt.tol, 1e-8, true});
    return cq;
}

ClassicalQuantumComb build_D_mp(const OpenGraph& graph, const GflowCombOptions& opt) {
    const auto all = enumerate_gflows(graph);
    if (all.empty()) throw InvalidInput("the open graph has no gflow");
    std::map<std::map<int, Plane>, std::vector<Gflow>> groups;
    for (const auto& g : all) groups[g.planes].push_back(g);
    const auto order = opt.order ? *opt.order : default_measurement_order(all, graph);
    const auto rho = graph_state(graph, "Ap").state;
    ClassicalQuantumComb cq;
    cq.x_label = {"X", static_cast<int>(groups.size())};
    for (const auto& [planes, gs] : groups) {
        if (gs.empty()) throw InvalidInput("a plane assignment has no gflow");
        Comb mix;
        for (std::size_t i = 0; i < gs.size(); ++i) {
            auto b = contract_graph_state(build_sigma_from_sets(correction_sets(gs[i], graph), graph, order), graph, order, rho);
            if (i == 0) {
                mix = b;
                mix.op.data.setZero();
            }
            mix.op.data += b.op.data / static_cast<double>(gs.size());
        }
        const auto rep = validate_comb(mix, {opt.tol, 1e-8, true});
        if (!rep.valid) throw InvalidInput("plane mixture is not a comb: " + rep.failure);
        std::string name;
        for (const auto& [v, p] : planes) name += (name.empty() ? "" : ",") + std::to_string(v) + ":" + to_string(p);
        cq.x_names.push_back(name);
        cq.blocks.push_back(std::move(mix));
    }
    cq.prior.assign(cq.blocks.size(), 1.0 / static_cast<double>(cq.blocks.size()));
    return cq;
}

ClassicalQuantumComb build_D_calibr(int angle_count) {
    if (angle_count < 2 || angle_count > 32) throw InvalidInput("angle_count must lie in [2, 32]");
    const OpenGraph graph = fixtures::calibration_line();
    Gflow g;
    g.g = {{1, {2}}, {2, {3}}};
    g.planes = graph.planes;
    const MeasurementOrder order{1, 2};
    const auto cs = correction_sets(g, graph);
    const auto rho0 = graph_state(graph, "Ap").state;
    ClassicalQuantumComb cq;
    cq.x_label = {"X", angle_count};
    for (int k = 0; k < angle_count; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / angle_count;
        const Mat r = rz(-theta);
        const Mat r3 = kron(kron(r, r), r);
        LabeledOperator rho(rho0.layout, r3 * rho0.data * r3.adjoint());
        auto block = contract_graph_state(build_sigma_from_sets(cs, graph, order, r), graph, order, rho);
        cq.blocks.push_back(std::move(block));
        cq.x_names.push_back("theta_" + std::to_string(k));
    }
    cq.prior.assign(angle_count, 1.0 / angle_count);
    check_cq(cq);
    return cq;
}

}  // namespace qcomb
