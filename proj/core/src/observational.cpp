#include "qcomb/observational.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "qcomb/error.hpp"
#include "qcomb/sdp.hpp"

namespace qcomb {

namespace {

// Per outcome branch, per x: weighted vectors whose outer products sum to the branch operator.
using Ensemble = std::vector<std::vector<Vec>>;

struct Prepared {
    int k = 0;
    long dout = 1;
    std::vector<Ensemble> branches;  // index c with c_1 most significant
    bool pure = true;
};

Prepared prepare(const ClassicalQuantumComb& cq) {
    if (cq.blocks.empty()) throw InvalidInput("empty classical-quantum comb");
    const auto& s = cq.blocks.front().structure;
    if (s.steps.empty()) throw InvalidInput("empty time-step structure");
    Prepared p;
    p.k = static_cast<int>(s.steps.size()) - 1;
    const auto& layout = cq.blocks.front().op.layout;
    std::vector<std::string> cs, as, out;
    auto single_qubit = [&](const std::vector<std::string>& l, const char* what) {
        if (l.size() != 1 || layout.dim_of(l.front()) != 2)
            throw InvalidInput(std::string("observational search needs a single two-dimensional ") + what + " per wire");
        return l.front();
    };
    if (!s.steps[0].in.empty()) throw InvalidInput("first step must have a trivial input");
    for (int i = 0; i < p.k; ++i) {
        as.push_back(single_qubit(s.steps[i].out, "output"));
        cs.push_back(single_qubit(s.steps[i + 1].in, "outcome"));
    }
    out = s.steps[p.k].out;
    p.dout = out.empty() ? 1 : layout.dim_of(out);
    std::vector<std::string> order = cs;
    order.insert(order.end(), as.begin(), as.end());
    order.insert(order.end(), out.begin(), out.end());

    const long m = (1L << p.k) * p.dout;
    p.branches.assign(1L << p.k, Ensemble(cq.blocks.size()));
    for (std::size_t x = 0; x < cq.blocks.size(); ++x) {
        if (!(cq.blocks[x].structure == s)) throw InvalidInput("blocks must share one time-step structure");
        const Mat d = permute(cq.blocks[x].op, order).data;
        for (long c = 0; c < (1L << p.k); ++c) {
            Mat b = d.block(c * m, c * m, m, m);
            b = 0.5 * (b + b.adjoint()).eval();
            Eigen::SelfAdjointEigenSolver<Mat> es(b);
            const double top = std::max(es.eigenvalues().maxCoeff(), 0.0);
            int kept = 0;
            for (long i = 0; i < m; ++i) {
                const double lam = es.eigenvalues()[i];
                if (lam <= 1e-12 * std::max(1.0, top)) continue;
                p.branches[c][x].push_back(es.eigenvectors().col(i) * std::sqrt(cq.prior[x] * lam));
                ++kept;
            }
            if (kept > 1) p.pure = false;
        }
    }
    return p;
}

// Projects the leading qubit of each vector onto <psi|.
Vec contract(const Vec& v, const Vec& psi) {
    const long h = v.size() / 2;
    return std::conj(psi[0]) * v.head(h) + std::conj(psi[1]) * v.tail(h);
}

struct Branch {
    std::vector<std::vector<Vec>> per_x;
};

// Dual-feasible bounds: Tr(sum), dout * max Tr, and Tr sqrt(sum_x rho_x^2) (operator monotone square root).
double branch_upper(const Branch& b, long dout) {
    double sum = 0.0, top = 0.0;
    Mat sq;
    for (const auto& vs : b.per_x) {
        if (vs.empty()) continue;
        Mat r = Mat::Zero(vs.front().size(), vs.front().size());
        for (const auto& v : vs) r += v * v.adjoint();
        const double t = r.trace().real();
        sum += t;
        top = std::max(top, t);
        if (sq.size() == 0) sq = Mat::Zero(r.rows(), r.cols());
        sq += r * r;
    }
    double bound = std::min(sum, static_cast<double>(dout) * top);
    if (sq.size() > 0) {
        Eigen::SelfAdjointEigenSolver<Mat> es(sq, Eigen::EigenvaluesOnly);
        double root = 0.0;
        for (long i = 0; i < es.eigenvalues().size(); ++i) root += std::sqrt(std::max(es.eigenvalues()[i], 0.0));
        bound = std::min(bound, root);
    }
    return bound;
}

double branch_value(const Branch& b, bool pure, double tol) {
    if (pure) {
        std::vector<Vec> vs;
        for (const auto& x : b.per_x)
            if (!x.empty() && x.front().squaredNorm() > 1e-16) vs.push_back(x.front());
        if (vs.empty()) return 0.0;
        return pure_state_guessing(vs, tol);
    }
    std::vector<Mat> ms;
    for (const auto& x : b.per_x) {
        if (x.empty()) continue;
        Mat r = Mat::Zero(x.front().size(), x.front().size());
        for (const auto& v : x) r += v * v.adjoint();
        if (r.trace().real() > 1e-16) ms.push_back(r);
    }
    if (ms.empty()) return 0.0;
    SdpOptions o;
    o.gap_tol = tol;
    return state_guessing(ms, o);
}

class Searcher {
public:
    Searcher(const Prepared& p, long max_eval, double tol) : p_(p), max_eval_(max_eval), tol_(tol) {}

    // Exhaustive over the product of per-wire candidates; returns the best candidate index per wire.
    std::vector<int> run(const std::vector<std::vector<BlochDirection>>& cands, double& best) {
        states_.clear();
        for (const auto& c : cands) {
            std::vector<std::array<Vec, 2>> s;
            for (const auto& d : c) s.push_back({bloch_vector_state(d, 0), bloch_vector_state(d, 1)});
            states_.push_back(std::move(s));
        }
        choice_.assign(p_.k, 0);
        best_choice_.assign(p_.k, -1);
        best_ = &best;
        // Level 0 holds all outcome branches stacked; contraction selects the leading qubit per wire.
        std::vector<std::vector<Branch>> start(1L << p_.k, std::vector<Branch>(1));
        for (long c = 0; c < (1L << p_.k); ++c) start[c][0].per_x = p_.branches[c];
        dfs(0, start);
        return best_choice_;
    }

    long evaluations = 0;
    long pruned = 0;

private:
    void dfs(int depth, const std::vector<std::vector<Branch>>& cur) {
        if (depth == p_.k) {
            leaf(cur);
            return;
        }
        const auto& st = states_[depth];
        for (std::size_t i = 0; i < st.size(); ++i) {
            if (evaluations >= max_eval_) throw CapExceeded("observational search exceeded its evaluation budget");
            choice_[depth] = static_cast<int>(i);
            std::vector<std::vector<Branch>> next(cur.size(), std::vector<Branch>(1));
            for (long c = 0; c < static_cast<long>(cur.size()); ++c) {
                const int bit = static_cast<int>((c >> (p_.k - 1 - depth)) & 1);
                const Vec& psi = st[i][bit];
                auto& dst = next[c][0].per_x;
                dst.resize(cur[c][0].per_x.size());
                for (std::size_t x = 0; x < dst.size(); ++x)
                    for (const auto& v : cur[c][0].per_x[x]) dst[x].push_back(contract(v, psi));
            }
            dfs(depth + 1, next);
        }
    }

    void leaf(const std::vector<std::vector<Branch>>& cur) {
        ++evaluations;
        std::vector<double> ub(cur.size());
        double total_ub = 0.0;
        for (std::size_t c = 0; c < cur.size(); ++c) total_ub += ub[c] = branch_upper(cur[c][0], p_.dout);
        if (total_ub <= *best_ + 1e-12) {
            ++pruned;
            return;
        }
        double val = 0.0, rest = total_ub;
        for (std::size_t c = 0; c < cur.size(); ++c) {
            rest -= ub[c];
            val += branch_value(cur[c][0], p_.pure, tol_);
            if (val + rest <= *best_ + 1e-12) {
                ++pruned;
                return;
            }
        }
        if (val > *best_) {
            *best_ = val;
            best_choice_ = choice_;
        }
    }

    const Prepared& p_;
    long max_eval_;
    double tol_;
    std::vector<std::vector<std::array<Vec, 2>>> states_;
    std::vector<int> choice_, best_choice_;
    double* best_ = nullptr;
};

BlochDirection normalize(double theta, double phi) {
    theta = std::fmod(theta, 2.0 * std::numbers::pi);
    if (theta < 0) theta += 2.0 * std::numbers::pi;
    if (theta > std::numbers::pi) {
        theta = 2.0 * std::numbers::pi - theta;
        phi += std::numbers::pi;
    }
    phi = std::fmod(phi, 2.0 * std::numbers::pi);
    if (phi < 0) phi += 2.0 * std::numbers::pi;
    return {theta, phi};
}

}  // namespace

std::vector<BlochDirection> fibonacci_sphere(int points) {
    if (points < 1) throw InvalidInput("mesh must have at least one point");
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    std::vector<BlochDirection> out;
    for (int i = 0; i < points; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / points;
        out.push_back(normalize(std::acos(z), golden * i));
    }
    return out;
}

Vec bloch_vector_state(const BlochDirection& d, int outcome) {
    const double c = std::cos(d.theta / 2), s = std::sin(d.theta / 2);
    const cplx e = std::polar(1.0, d.phi);
    Vec v(2);
    if (outcome == 0)
        v << c, e * s;
    else
        v << -std::conj(e) * s, c;
    return v;
}

double observational_value(const ClassicalQuantumComb& cq, const std::vector<BlochDirection>& dirs) {
    const Prepared p = prepare(cq);
    if (static_cast<int>(dirs.size()) != p.k) throw InvalidInput("one direction per measured wire required");
    std::vector<std::vector<BlochDirection>> cands;
    for (const auto& d : dirs) cands.push_back({d});
    double best = -1.0;
    Searcher s(p, 1, 1e-11);
    s.run(cands, best);
    return best;
}

ObservationalResult observational_search(const ClassicalQuantumComb& cq, const ObservationalOptions& opt) {
    if (opt.mesh < 1) throw InvalidInput("mesh must have at least one point");
    if (opt.refine_levels < 0) throw InvalidInput("refinement levels must be nonnegative");
    const Prepared p = prepare(cq);
    ObservationalResult r;
    r.pure_branches = p.pure;
    // Loose tolerance while scanning; the winner is re-evaluated tightly.
    Searcher s(p, opt.max_evaluations, 1e-7);
    double best = -1.0;
    if (p.k == 0) {
        s.run({}, best);
        r.p_guess = best;
        r.evaluations = s.evaluations;
        return r;
    }
    const auto mesh = fibonacci_sphere(opt.mesh);
    std::vector<std::vector<BlochDirection>> cands(p.k, mesh);
    auto choice = s.run(cands, best);
    std::vector<BlochDirection> dirs;
    for (int i = 0; i < p.k; ++i) dirs.push_back(mesh[choice[i]]);

    double h = std::sqrt(4.0 * std::numbers::pi / opt.mesh);
    for (int level = 0; level < opt.refine_levels; ++level) {
        h /= 2.0;
        std::vector<std::vector<BlochDirection>> local(p.k);
        std::vector<std::vector<bool>> edge(p.k);
        for (int i = 0; i < p.k; ++i) {
            local[i].push_back(dirs[i]);  // centre first so ties keep the incumbent
            edge[i].push_back(false);
            const double sin_t = std::max(std::sin(dirs[i].theta), 0.1);
            for (int a = -2; a <= 2; ++a)
                for (int b = -2; b <= 2; ++b) {
                    if (a == 0 && b == 0) continue;
                    local[i].push_back(normalize(dirs[i].theta + a * h, dirs[i].phi + b * h / sin_t));
                    edge[i].push_back(std::abs(a) == 2 || std::abs(b) == 2);
                }
        }
        const double before = best;
        auto c = s.run(local, best);
        if (best > before) {
            bool on_edge = false;
            for (int i = 0; i < p.k; ++i) {
                dirs[i] = local[i][c[i]];
                on_edge = on_edge || edge[i][c[i]];
            }
            if (level + 1 == opt.refine_levels) r.boundary_hit = on_edge;
        }
    }
    r.p_guess = observational_value(cq, dirs);
    r.directions = dirs;
    r.evaluations = s.evaluations;
    r.pruned = s.pruned;
    return r;
}

}  // namespace qcomb
