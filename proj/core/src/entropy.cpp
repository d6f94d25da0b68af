#include "qcomb/entropy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "qcomb/error.hpp"

namespace qcomb {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// true = input label (maximised), false = output label (summed).
std::vector<bool> input_flags(const SparseClassicalCq& cq) {
    const auto ins = cq.structure.inputs();
    std::vector<bool> f;
    for (const auto& n : cq.layout.names()) f.push_back(std::find(ins.begin(), ins.end(), n) != ins.end());
    return f;
}

// Backward induction over one round; the last layout label is reduced first.
double reduce_round(std::vector<double> s, const std::vector<int>& dims, const std::vector<bool>& is_input) {
    for (long l = static_cast<long>(dims.size()) - 1; l >= 0; --l) {
        const long d = dims[l], n = static_cast<long>(s.size()) / d;
        for (long i = 0; i < n; ++i) {
            double acc = 0.0;
            for (long j = 0; j < d; ++j) acc = is_input[l] ? std::max(acc, s[i * d + j]) : acc + s[i * d + j];
            s[i] = acc;
        }
        s.resize(n);
    }
    return s.empty() ? 0.0 : s[0];
}

double reduce_sum(const std::vector<double>& s) {
    double a = 0.0;
    for (double v : s) a += v;
    return a;
}

using Support = std::vector<std::vector<std::pair<long, double>>>;

struct RoundEngine {
    long n = 0;
    int rounds = 1;
    const Support* supp = nullptr;
    std::vector<std::vector<std::pair<int, double>>> inv;
    std::vector<int> dims;
    std::vector<bool> is_input;
    bool exact = true;
    long work = 0, work_cap = 0;

    void build_inverse(std::size_t nx) {
        inv.assign(n, {});
        for (std::size_t x = 0; x < nx; ++x)
            for (const auto& [e, f] : (*supp)[x]) inv[e].push_back({static_cast<int>(x), f});
    }

    double reduce(const std::vector<double>& s) const { return exact ? reduce_round(s, dims, is_input) : reduce_sum(s); }

    double value(int level, const std::vector<std::pair<int, double>>& list) {
        std::vector<double> s(n, 0.0);
        if (level == rounds - 1) {
            for (const auto& [x, w] : list) {
                work += static_cast<long>((*supp)[x].size());
                for (const auto& [e, f] : (*supp)[x]) s[e] = std::max(s[e], w * f);
            }
        } else {
            std::vector<double> wmap(supp->size(), 0.0);
            for (const auto& [x, w] : list) wmap[x] = w;
            std::vector<std::pair<int, double>> next;
            for (long e = 0; e < n; ++e) {
                next.clear();
                for (const auto& [x, f] : inv[e])
                    if (wmap[x] > 0.0) next.push_back({x, wmap[x] * f});
                if (!next.empty()) s[e] = value(level + 1, next);
            }
        }
        if (work > work_cap) throw CapExceeded("multi-round classical computation exceeds the work cap");
        return reduce(s);
    }
};

std::vector<std::pair<int, double>> prior_list(const SparseClassicalCq& cq) {
    std::vector<std::pair<int, double>> l;
    for (std::size_t x = 0; x < cq.prior.size(); ++x)
        if (cq.prior[x] > 0.0) l.push_back({static_cast<int>(x), cq.prior[x]});
    return l;
}

double input_dim(const SparseClassicalCq& cq) {
    double d = 1.0;
    for (const auto& n : cq.structure.inputs()) d *= cq.layout.dim_of(n);
    return d;
}

}  // namespace

MinEntropyResult min_entropy(const ClassicalQuantumComb& cq, const MinEntropyOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    check_cq(cq);
    for (const auto& b : cq.blocks)
        if (b.op.dim() > opt.dim_cap) throw CapExceeded("block dimension exceeds cap");
    std::vector<LabeledOperator> ops;
    for (const auto& b : cq.blocks) ops.push_back(b.op);
    const auto r = solve_guessing_sdp(cq.prior, ops, cq.blocks.front().structure, opt.sdp);
    MinEntropyResult out;
    out.p_guess = r.primal;
    out.h_min = -std::log2(r.primal);
    out.duality_gap = r.gap;
    out.dual_residual = r.dual_residual;
    out.variables = r.variables;
    out.iterations = r.newton_steps;
    out.gamma = r.gamma;
    out.w = r.w;
    double feas = 0.0;
    for (std::size_t x = 0; x < ops.size(); ++x) {
        const Mat d = r.gamma.data - cq.prior[x] * permute(ops[x], r.gamma.layout.names()).data;
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
        feas = std::max(feas, -es.eigenvalues().minCoeff());
    }
    out.primal_residual = feas;
    out.status = "optimal";
    out.wall_ms = elapsed_ms(t0);
    return out;
}

GuessingStrategy extract_strategy(const MinEntropyResult& r, const ClassicalQuantumComb& cq, double gap_tol) {
    if (r.w.size() != cq.blocks.size()) throw InvalidInput("result carries no dual multipliers for this comb");
    GuessingStrategy s;
    const auto& layout = cq.blocks.front().op.layout;
    const int nx = static_cast<int>(cq.blocks.size());
    std::vector<SubsystemLabel> f{{cq.x_label.name, nx}};
    for (const auto& l : layout.factors()) f.push_back(l);
    const long d = layout.total_dim();
    Mat e = Mat::Zero(nx * d, nx * d);
    s.achieved = 0.0;
    for (int x = 0; x < nx; ++x) {
        const auto wx = permute(r.w[x], layout.names());
        e.block(x * d, x * d, d, d) = wx.data.transpose();
        s.achieved += cq.prior[x] * (cq.blocks[x].op.data * wx.data).trace().real();
    }
    s.e = LabeledOperator(SpaceLayout(f), e);
    s.structure = guessing_structure(cq.blocks.front().structure, cq.x_label.name);
    s.report = validate_comb(s.e, s.structure, {1e-6, 1e-7, true});
    s.gap = std::abs(r.p_guess - s.achieved);
    if (s.gap > gap_tol) throw SolverFailure("duality gap " + std::to_string(s.gap) + " above tolerance");
    if (!s.report.valid) throw SolverFailure("extracted strategy is not a comb: " + s.report.failure);
    return s;
}

SparseClassicalCq to_sparse(const ClassicalCqComb& cq) {
    check_cq(cq);
    SparseClassicalCq out;
    const auto& b0 = cq.blocks.front();
    const auto order = b0.structure.causal_order();
    std::vector<std::size_t> pos;
    std::vector<SubsystemLabel> f;
    for (const auto& n : order) {
        pos.push_back(b0.layout.index_of(n));
        f.push_back({n, b0.layout.dim_of(n)});
    }
    const auto perm = permutation_map(b0.layout.dims(), pos);
    out.layout = SpaceLayout(f);
    out.structure = b0.structure;
    out.prior = cq.prior;
    out.x_names = cq.x_names;
    for (const auto& b : cq.blocks) {
        std::vector<std::pair<long, double>> s;
        for (long i = 0; i < static_cast<long>(perm.size()); ++i) {
            const double v = b.diag[perm[i]];
            if (v != 0.0) s.push_back({i, v});
        }
        out.blocks.push_back(std::move(s));
    }
    return out;
}

MinEntropyResult min_entropy_classical(const SparseClassicalCq& cq, int rounds, long work_cap) {
    const auto t0 = std::chrono::steady_clock::now();
    if (rounds < 1) throw InvalidInput("rounds must be positive");
    if (cq.layout.names() != cq.structure.causal_order()) throw InvalidInput("sparse classical comb layout must be in causal order");
    MinEntropyResult out;
    const long n = cq.layout.total_dim();
    const auto dims = cq.layout.dims();
    const auto inflag = input_flags(cq);
    if (rounds == 1) {
        // Dense backward induction with primal and dual certificates.
        std::vector<double> s(n, 0.0);
        std::vector<int> guess(n, -1);
        for (std::size_t x = 0; x < cq.blocks.size(); ++x)
            for (const auto& [e, f] : cq.blocks[x]) {
                const double v = cq.prior[x] * f;
                if (v > s[e]) {
                    s[e] = v;
                    guess[e] = static_cast<int>(x);
                }
            }
        const long nl = static_cast<long>(dims.size());
        std::vector<std::vector<double>> val(nl + 1);
        std::vector<std::vector<int>> choice(nl);
        val[nl] = s;
        for (long l = nl - 1; l >= 0; --l) {
            const long d = dims[l], m = static_cast<long>(val[l + 1].size()) / d;
            val[l].assign(m, 0.0);
            choice[l].assign(m, 0);
            for (long i = 0; i < m; ++i)
                for (long j = 0; j < d; ++j) {
                    const double v = val[l + 1][i * d + j];
                    if (inflag[l]) {
                        if (v > val[l][i]) {
                            val[l][i] = v;
                            choice[l][i] = static_cast<int>(j);
                        }
                    } else {
                        val[l][i] += v;
                    }
                }
        }
        std::vector<double> mass{val[0][0]};
        std::vector<char> onpath{1};
        for (long l = 0; l < nl; ++l) {
            const long d = dims[l], m = static_cast<long>(mass.size());
            std::vector<double> nm(m * d);
            std::vector<char> np(m * d);
            for (long i = 0; i < m; ++i)
                for (long j = 0; j < d; ++j) {
                    if (inflag[l]) {
                        nm[i * d + j] = mass[i];
                        np[i * d + j] = onpath[i] && choice[l][i] == j;
                    } else {
                        nm[i * d + j] = val[l][i] > 0.0 ? mass[i] * val[l + 1][i * d + j] / val[l][i] : mass[i] / d;
                        np[i * d + j] = onpath[i];
                    }
                }
            mass.swap(nm);
            onpath.swap(np);
        }
        double achieved = 0.0;
        for (long e = 0; e < n; ++e) {
            if (onpath[e]) achieved += s[e];
            else guess[e] = -1;
        }
        ClassicalComb g;
        g.layout = cq.layout;
        g.structure = cq.structure;
        g.normalized = false;
        g.diag = Eigen::Map<Eigen::VectorXd>(mass.data(), n);
        out.p_guess = val[0][0];
        out.classical_gamma = g;
        out.classical_guess = guess;
        out.duality_gap = out.p_guess - achieved;
        double viol = 0.0;
        for (std::size_t x = 0; x < cq.blocks.size(); ++x)
            for (const auto& [e, f] : cq.blocks[x]) viol = std::max(viol, cq.prior[x] * f - mass[e]);
        out.primal_residual = viol;
    } else {
        RoundEngine eng;
        eng.n = n;
        eng.rounds = rounds;
        eng.supp = &cq.blocks;
        eng.dims = dims;
        eng.is_input = inflag;
        eng.work_cap = work_cap;
        eng.build_inverse(cq.blocks.size());
        out.p_guess = eng.value(0, prior_list(cq));
    }
    out.h_min = -std::log2(out.p_guess);
    out.status = "optimal";
    out.wall_ms = elapsed_ms(t0);
    return out;
}

MinEntropyResult min_entropy_classical(const ClassicalCqComb& cq, int rounds) {
    return min_entropy_classical(to_sparse(cq), rounds);
}

ClassicalBounds classical_bounds(const SparseClassicalCq& cq, int rounds, long work_cap) {
    if (rounds < 1) throw InvalidInput("rounds must be positive");
    ClassicalBounds b;
    RoundEngine lo;
    lo.n = cq.layout.total_dim();
    lo.rounds = rounds;
    lo.supp = &cq.blocks;
    lo.exact = false;
    lo.work_cap = work_cap;
    lo.build_inverse(cq.blocks.size());
    b.lower = lo.value(0, prior_list(cq)) / std::pow(input_dim(cq), rounds);

    // Project each block onto outputs, maximising over inputs.
    const auto dims = cq.layout.dims();
    const auto inflag = input_flags(cq);
    const auto strides = strides_of(dims);
    long nout = 1;
    std::vector<long> ostride(dims.size(), 0);
    for (long l = static_cast<long>(dims.size()) - 1; l >= 0; --l)
        if (!inflag[l]) {
            ostride[l] = nout;
            nout *= dims[l];
        }
    Support proj(cq.blocks.size());
    for (std::size_t x = 0; x < cq.blocks.size(); ++x) {
        std::vector<std::pair<long, double>> tmp;
        for (const auto& [e, f] : cq.blocks[x]) {
            long o = 0;
            for (std::size_t l = 0; l < dims.size(); ++l)
                if (!inflag[l]) o += ((e / strides[l]) % dims[l]) * ostride[l];
            tmp.push_back({o, f});
        }
        std::sort(tmp.begin(), tmp.end());
        for (const auto& [o, f] : tmp) {
            if (!proj[x].empty() && proj[x].back().first == o) proj[x].back().second = std::max(proj[x].back().second, f);
            else proj[x].push_back({o, f});
        }
    }
    RoundEngine up;
    up.n = nout;
    up.rounds = rounds;
    up.supp = &proj;
    up.exact = false;
    up.work_cap = work_cap;
    up.build_inverse(proj.size());
    b.upper = up.value(0, prior_list(cq));
    return b;
}

std::vector<RoundValue> monotonicity_check(const ClassicalQuantumComb& cq, int m_max, const MinEntropyOptions& opt) {
    std::vector<RoundValue> out;
    for (int m = 1; m <= m_max; ++m) {
        try {
            const auto mc = multi_round(cq, m, opt.dim_cap);
            out.push_back({m, min_entropy(mc, opt).p_guess, std::nullopt});
        } catch (const CapExceeded&) {
            break;
        }
    }
    return out;
}

std::vector<RoundValue> monotonicity_check(const SparseClassicalCq& cq, int m_max) {
    std::vector<RoundValue> out;
    for (int m = 1; m <= m_max; ++m) {
        RoundValue v;
        v.rounds = m;
        try {
            v.bounds = classical_bounds(cq, m);
            v.p_guess = min_entropy_classical(cq, m).p_guess;
        } catch (const CapExceeded&) {
            if (!v.bounds) break;
            v.p_guess = v.bounds->lower;
        }
        out.push_back(v);
    }
    return out;
}

}  // namespace qcomb
