#include "qcomb/combs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "qcomb/error.hpp"

namespace qcomb {

std::vector<std::string> TimeStepStructure::inputs() const {
    std::vector<std::string> out;
    for (const auto& s : steps) out.insert(out.end(), s.in.begin(), s.in.end());
    return out;
}

std::vector<std::string> TimeStepStructure::outputs() const {
    std::vector<std::string> out;
    for (const auto& s : steps) out.insert(out.end(), s.out.begin(), s.out.end());
    return out;
}

std::vector<std::string> TimeStepStructure::causal_order() const {
    std::vector<std::string> out;
    for (const auto& s : steps) {
        out.insert(out.end(), s.in.begin(), s.in.end());
        out.insert(out.end(), s.out.begin(), s.out.end());
    }
    return out;
}

void check_structure(const TimeStepStructure& s, const SpaceLayout& layout) {
    std::multiset<std::string> used;
    for (const auto& n : s.causal_order()) {
        if (!layout.has(n)) throw InvalidInput("structure names unknown label '" + n + "'");
        used.insert(n);
    }
    for (const auto& f : layout.factors()) {
        const auto c = used.count(f.name);
        if (c == 0) throw InvalidInput("label '" + f.name + "' is not assigned to any time step");
        if (c > 1) throw InvalidInput("label '" + f.name + "' is assigned to more than one slot");
    }
}

double ValidationReport::max_residual() const {
    double m = 0.0;
    for (const auto& r : residuals) m = std::max(m, r.residual);
    return m;
}

ValidationReport validate_comb(const LabeledOperator& op, const TimeStepStructure& s, const ValidationOptions& opt) {
    check_structure(s, op.layout);
    ValidationReport rep;
    const auto psd = check_psd(op.data, {opt.tol, opt.psd_tol});
    rep.hermitian = psd.hermitian;
    rep.psd = psd.psd;
    rep.min_eigenvalue = psd.min_eigenvalue;

    LabeledOperator dk = op;
    bool chain_ok = true;
    for (std::size_t k = s.steps.size(); k-- > 0;) {
        const auto& slot = s.steps[k];
        LabeledOperator t = slot.out.empty() ? dk : partial_trace(dk, slot.out);
        LabeledOperator prev = slot.in.empty() ? t : partial_trace(t, slot.in);
        const double din = static_cast<double>(op.layout.dim_of(slot.in));
        prev.data /= din;
        double res = 0.0;
        if (!slot.in.empty()) {
            std::vector<SubsystemLabel> f;
            for (const auto& n : slot.in) f.push_back({n, op.layout.dim_of(n)});
            const auto expect = kron(identity(SpaceLayout(f)), prev);
            res = max_abs_diff(expect, t);
        }
        rep.residuals.push_back({k, res});
        if (!(res <= opt.tol)) chain_ok = false;
        dk = std::move(prev);
    }
    rep.d0 = dk.data.size() ? dk.data(0, 0).real() : 0.0;
    rep.normalized = std::abs(rep.d0 - 1.0) <= opt.tol;

    if (!rep.hermitian)
        rep.failure = "not Hermitian";
    else if (!rep.psd)
        rep.failure = "not positive semidefinite (min eigenvalue " + std::to_string(rep.min_eigenvalue) + ")";
    else if (!chain_ok) {
        for (const auto& r : rep.residuals)
            if (!(r.residual <= opt.tol)) {
                rep.failure = "partial-trace condition fails at step " + std::to_string(r.step + 1) + " (residual " +
                              std::to_string(r.residual) + ")";
                break;
            }
    } else if (opt.require_normalized && !rep.normalized)
        rep.failure = "D_0 = " + std::to_string(rep.d0) + " != 1";
    else if (!(rep.d0 > 0))
        rep.failure = "D_0 is not positive";
    rep.valid = rep.failure.empty();
    return rep;
}

ValidationReport validate_comb(const Comb& c, const ValidationOptions& opt) {
    auto o = opt;
    o.require_normalized = c.normalized;
    return validate_comb(c.op, c.structure, o);
}

namespace {

// Sum a diagonal tensor over the factors in `over`; result keeps the remaining factors in order.
Eigen::VectorXd sum_out(const Eigen::VectorXd& v, const std::vector<int>& dims, const std::vector<std::size_t>& over,
                        std::vector<int>& kept_dims, std::vector<std::size_t>& kept) {
    kept.clear();
    kept_dims.clear();
    for (std::size_t i = 0; i < dims.size(); ++i)
        if (std::find(over.begin(), over.end(), i) == over.end()) {
            kept.push_back(i);
            kept_dims.push_back(dims[i]);
        }
    const auto ko = permutation_map(dims, kept);
    const auto to = permutation_map(dims, over);
    Eigen::VectorXd out(static_cast<long>(ko.size()));
    for (std::size_t i = 0; i < ko.size(); ++i) {
        double s = 0.0;
        for (long t : to) s += v[ko[i] + t];
        out[static_cast<long>(i)] = s;
    }
    return out;
}

std::vector<std::size_t> positions(const std::vector<std::string>& names, const std::vector<std::string>& sel) {
    std::vector<std::size_t> out;
    for (const auto& s : sel) out.push_back(static_cast<std::size_t>(std::find(names.begin(), names.end(), s) - names.begin()));
    return out;
}

}  // namespace

ValidationReport validate_classical_comb(const ClassicalComb& c, double tol, bool require_normalized) {
    check_structure(c.structure, c.layout);
    if (c.diag.size() != c.layout.total_dim()) throw InvalidInput("classical comb length does not match layout");
    ValidationReport rep;
    rep.hermitian = true;
    rep.min_eigenvalue = c.diag.size() ? c.diag.minCoeff() : 0.0;
    rep.psd = rep.min_eigenvalue >= 0.0;
    if (!rep.psd) {
        rep.failure = "negative entry " + std::to_string(rep.min_eigenvalue);
        return rep;
    }
    Eigen::VectorXd f = c.diag;
    auto names = c.layout.names();
    auto dims = c.layout.dims();
    bool chain_ok = true;
    for (std::size_t k = c.structure.steps.size(); k-- > 0;) {
        const auto& slot = c.structure.steps[k];
        std::vector<int> kd;
        std::vector<std::size_t> kept;
        Eigen::VectorXd t = sum_out(f, dims, positions(names, slot.out), kd, kept);
        std::vector<std::string> tnames;
        for (auto i : kept) tnames.push_back(names[i]);
        std::vector<int> pd;
        std::vector<std::size_t> pk;
        const auto inpos = positions(tnames, slot.in);
        Eigen::VectorXd prev = sum_out(t, kd, inpos, pd, pk);
        long din = 1;
        for (auto i : inpos) din *= kd[i];
        prev /= static_cast<double>(din);
        // t must equal prev broadcast over the input factors.
        const auto po = permutation_map(kd, pk);
        const auto io = permutation_map(kd, inpos);
        double res = 0.0;
        for (std::size_t i = 0; i < po.size(); ++i)
            for (long t_in : io) res = std::max(res, std::abs(t[po[i] + t_in] - prev[static_cast<long>(i)]));
        rep.residuals.push_back({k, res});
        if (!(res <= tol)) chain_ok = false;
        std::vector<std::string> pn;
        for (auto i : pk) pn.push_back(tnames[i]);
        names = pn;
        dims = pd;
        f = prev;
    }
    rep.d0 = f.size() ? f[0] : 0.0;
    rep.normalized = std::abs(rep.d0 - 1.0) <= std::max(tol, 1e-12);
    if (!chain_ok) {
        for (const auto& r : rep.residuals)
            if (!(r.residual <= tol)) {
                rep.failure = "marginalisation condition fails at step " + std::to_string(r.step + 1);
                break;
            }
    } else if (require_normalized && !rep.normalized)
        rep.failure = "f^(0) = " + std::to_string(rep.d0) + " != 1";
    else if (!(rep.d0 > 0))
        rep.failure = "f^(0) is not positive";
    rep.valid = rep.failure.empty();
    return rep;
}

namespace {

void check_prior(const std::vector<double>& prior, std::size_t blocks) {
    if (prior.size() != blocks) throw InvalidInput("prior length does not match the number of blocks");
    if (blocks == 0) throw InvalidInput("classical-quantum comb has no blocks");
    double s = 0.0;
    for (double p : prior) {
        if (!(p >= 0.0)) throw InvalidInput("prior has a negative entry");
        s += p;
    }
    if (std::abs(s - 1.0) > 1e-12) throw InvalidInput("prior does not sum to 1");
}

}  // namespace

void check_cq(const ClassicalQuantumComb& cq, const ValidationOptions& opt) {
    check_prior(cq.prior, cq.blocks.size());
    for (std::size_t i = 0; i < cq.blocks.size(); ++i) {
        const auto& b = cq.blocks[i];
        if (!(b.op.layout == cq.blocks[0].op.layout) || !(b.structure == cq.blocks[0].structure))
            throw InvalidInput("block " + std::to_string(i) + " has a different layout or structure");
        auto o = opt;
        o.require_normalized = true;
        const auto r = validate_comb(b.op, b.structure, o);
        if (!r.valid) throw InvalidInput("block " + std::to_string(i) + " is not a normalized comb: " + r.failure);
    }
}

void check_cq(const ClassicalCqComb& cq, double tol) {
    check_prior(cq.prior, cq.blocks.size());
    for (std::size_t i = 0; i < cq.blocks.size(); ++i) {
        const auto& b = cq.blocks[i];
        if (!(b.layout == cq.blocks[0].layout) || !(b.structure == cq.blocks[0].structure))
            throw InvalidInput("block " + std::to_string(i) + " has a different layout or structure");
        const auto r = validate_classical_comb(b, tol, true);
        if (!r.valid) throw InvalidInput("block " + std::to_string(i) + " is not a normalized classical comb: " + r.failure);
    }
}

LabeledOperator assemble(const ClassicalQuantumComb& cq, long dim_cap) {
    check_prior(cq.prior, cq.blocks.size());
    const long d = cq.blocks[0].op.dim();
    const long k = static_cast<long>(cq.blocks.size());
    if (d * k > dim_cap)
        throw CapExceeded("assembled dimension " + std::to_string(d * k) + " exceeds cap " + std::to_string(dim_cap));
    std::vector<SubsystemLabel> f{{cq.x_label.name, static_cast<int>(k)}};
    for (const auto& x : cq.blocks[0].op.layout.factors()) f.push_back(x);
    Mat out = Mat::Zero(d * k, d * k);
    for (long x = 0; x < k; ++x) {
        if (!(cq.blocks[x].op.layout == cq.blocks[0].op.layout)) throw InvalidInput("blocks have different layouts");
        out.block(x * d, x * d, d, d) = cq.prior[x] * cq.blocks[x].op.data;
    }
    return {SpaceLayout(f), std::move(out)};
}

TimeStepStructure structure_x_first(const TimeStepStructure& s, const std::string& x) {
    TimeStepStructure out;
    out.steps.push_back({{}, {x}});
    out.steps.insert(out.steps.end(), s.steps.begin(), s.steps.end());
    return out;
}

TimeStepStructure structure_x_last(const TimeStepStructure& s, const std::string& x) {
    TimeStepStructure out = s;
    out.steps.push_back({{}, {x}});
    return out;
}

bool validate_both_orderings(const ClassicalQuantumComb& cq, const ValidationOptions& opt, long dim_cap) {
    const auto d = assemble(cq, dim_cap);
    const auto& s = cq.blocks[0].structure;
    auto o = opt;
    o.require_normalized = true;
    return validate_comb(d, structure_x_first(s, cq.x_label.name), o).valid &&
           validate_comb(d, structure_x_last(s, cq.x_label.name), o).valid;
}

std::string round_label(const std::string& name, int round) { return name + "_r" + std::to_string(round); }

namespace {

TimeStepStructure relabel_structure(const TimeStepStructure& s, int round) {
    TimeStepStructure out;
    for (const auto& slot : s.steps) {
        Slot r;
        for (const auto& n : slot.in) r.in.push_back(round_label(n, round));
        for (const auto& n : slot.out) r.out.push_back(round_label(n, round));
        out.steps.push_back(r);
    }
    return out;
}

SpaceLayout relabel_layout(const SpaceLayout& l, int round) {
    auto f = l.factors();
    for (auto& x : f) x.name = round_label(x.name, round);
    return SpaceLayout(f);
}

}  // namespace

ClassicalQuantumComb multi_round(const ClassicalQuantumComb& cq, int m, long dim_cap) {
    if (m < 1) throw InvalidInput("round count must be >= 1");
    const long d = cq.blocks.at(0).op.dim();
    double total = std::pow(static_cast<double>(d), m);
    if (total > static_cast<double>(dim_cap))
        throw CapExceeded("multi-round block dimension " + std::to_string(static_cast<long>(total)) + " exceeds cap " +
                          std::to_string(dim_cap));
    ClassicalQuantumComb out;
    out.prior = cq.prior;
    out.x_label = cq.x_label;
    out.x_names = cq.x_names;
    for (const auto& b : cq.blocks) {
        Comb c;
        c.normalized = b.normalized;
        c.op = LabeledOperator(relabel_layout(b.op.layout, 1), b.op.data);
        c.structure = relabel_structure(b.structure, 1);
        for (int j = 2; j <= m; ++j) {
            c.op = kron(c.op, LabeledOperator(relabel_layout(b.op.layout, j), b.op.data));
            const auto sj = relabel_structure(b.structure, j);
            c.structure.steps.insert(c.structure.steps.end(), sj.steps.begin(), sj.steps.end());
        }
        out.blocks.push_back(std::move(c));
    }
    return out;
}

ClassicalCqComb multi_round(const ClassicalCqComb& cq, int m, long length_cap) {
    if (m < 1) throw InvalidInput("round count must be >= 1");
    const long d = cq.blocks.at(0).diag.size();
    double total = std::pow(static_cast<double>(d), m) * static_cast<double>(cq.blocks.size());
    if (total > static_cast<double>(length_cap))
        throw CapExceeded("multi-round classical comb size " + std::to_string(static_cast<long>(total)) + " exceeds cap " +
                          std::to_string(length_cap));
    ClassicalCqComb out;
    out.prior = cq.prior;
    out.x_label = cq.x_label;
    out.x_names = cq.x_names;
    for (const auto& b : cq.blocks) {
        ClassicalComb c;
        c.normalized = b.normalized;
        std::vector<SubsystemLabel> f;
        c.diag = b.diag;
        const auto first = relabel_layout(b.layout, 1);
        f = first.factors();
        c.structure = relabel_structure(b.structure, 1);
        for (int j = 2; j <= m; ++j) {
            Eigen::VectorXd next(c.diag.size() * d);
            for (long i = 0; i < c.diag.size(); ++i) next.segment(i * d, d) = c.diag[i] * b.diag;
            c.diag = std::move(next);
            const auto lj = relabel_layout(b.layout, j);
            f.insert(f.end(), lj.factors().begin(), lj.factors().end());
            const auto sj = relabel_structure(b.structure, j);
            c.structure.steps.insert(c.structure.steps.end(), sj.steps.begin(), sj.steps.end());
        }
        c.layout = SpaceLayout(f);
        out.blocks.push_back(std::move(c));
    }
    return out;
}

TimeStepStructure dual_structure(const TimeStepStructure& s) {
    TimeStepStructure out;
    std::vector<std::string> prev_out;
    for (const auto& slot : s.steps) {
        out.steps.push_back({prev_out, slot.in});
        prev_out = slot.out;
    }
    out.steps.push_back({prev_out, {}});
    std::erase_if(out.steps, [](const Slot& x) { return x.in.empty() && x.out.empty(); });
    return out;
}

TimeStepStructure guessing_structure(const TimeStepStructure& s, const std::string& x) {
    TimeStepStructure out;
    std::vector<std::string> prev_out;
    for (const auto& slot : s.steps) {
        out.steps.push_back({prev_out, slot.in});
        prev_out = slot.out;
    }
    out.steps.push_back({prev_out, {x}});
    std::erase_if(out.steps, [](const Slot& v) { return v.in.empty() && v.out.empty(); });
    return out;
}

cplx born(const LabeledOperator& d, const LabeledOperator& e) {
    const auto ep = permute(e, d.layout.names());
    return (d.data.cwiseProduct(ep.data)).sum();
}

}  // namespace qcomb
