#include "qcomb/bqc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcomb/error.hpp"

namespace qcomb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAngleTol = 1e-9;

double wrap(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0) r += kTwoPi;
    if (kTwoPi - r < kAngleTol) r = 0.0;
    return r;
}

bool same_angle(double a, double b) {
    const double d = std::fabs(wrap(a) - wrap(b));
    return d < kAngleTol || kTwoPi - d < kAngleTol;
}

std::vector<int> position_map(const BqcSetup& s) {
    std::vector<int> pos(s.graph.n + 1, -1);
    for (std::size_t k = 0; k < s.order.size(); ++k) pos.at(s.order[k]) = static_cast<int>(k);
    return pos;
}

void check_setup(const BqcSetup& s) {
    if (s.graph.n < 1) throw InvalidInput("BQC graph has no vertices");
    if (static_cast<int>(s.order.size()) != s.graph.n) throw InvalidInput("total order must list every vertex once");
    std::vector<int> sorted = s.order;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < s.graph.n; ++i)
        if (sorted[i] != i + 1) throw InvalidInput("total order must be a permutation of 1..n");
    if (s.angles.size() == 0) throw InvalidInput("empty angle set");
}

int parity(const VertexSet& set, const std::vector<int>& c) {
    int p = 0;
    for (int j : set) p ^= c.at(j - 1);
    return p;
}

void check_vector(const std::vector<int>& v, int n, const char* what) {
    if (static_cast<int>(v.size()) != n) throw InvalidInput(std::string(what) + " must have one entry per vertex");
}

// Entry of the diagonal for reported angles/outcomes indexed by vertex - 1.
long entry_index(const BqcSetup& s, const std::vector<int>& ap, const std::vector<int>& cp) {
    const long a = s.angles.size();
    long idx = 0;
    for (int v : s.order) idx = (idx * a + ap[v - 1]) * 2 + cp[v - 1];
    return idx;
}

// Calls f(alpha') for every c', with alpha' as angle indices.
template <class F>
void for_each_transcript(const BqcSetup& s, const CorrectionSets& cs, const std::vector<int>& alpha,
                         const std::vector<int>& r, F&& f) {
    const int n = s.graph.n;
    std::vector<int> cp(n, 0), ap(n, 0);
    for (long bits = 0; bits < (1L << n); ++bits) {
        for (int k = 0; k < n; ++k) cp[s.order[k] - 1] = static_cast<int>((bits >> (n - 1 - k)) & 1);
        for (int v : s.order) ap[v - 1] = reported_angle(s, cs, v, alpha, r, cp);
        f(ap, cp);
    }
}

std::string set_string(const VertexSet& s) {
    std::string out = "{";
    bool first = true;
    for (int v : s) {
        if (!first) out += ",";
        out += std::to_string(v);
        first = false;
    }
    return out + "}";
}

}  // namespace

int AngleSet::find(double a) const {
    for (std::size_t i = 0; i < angles.size(); ++i)
        if (same_angle(angles[i], a)) return static_cast<int>(i);
    return -1;
}

AngleSet closed_angle_set(const std::vector<double>& seeds, int target_size) {
    if (seeds.empty()) throw InvalidInput("angle seeds must be nonempty");
    std::vector<double> found;
    auto add = [&](double a) {
        a = wrap(a);
        for (double b : found)
            if (same_angle(a, b)) return false;
        found.push_back(a);
        return true;
    };
    std::vector<double> frontier;
    for (double a : seeds) {
        if (!std::isfinite(a) || a < -kAngleTol || a >= kTwoPi + kAngleTol)
            throw InvalidInput("angle seeds must lie in [0, 2pi)");
        if (add(a)) frontier.push_back(wrap(a));
    }
    while (!frontier.empty()) {
        const double a = frontier.back();
        frontier.pop_back();
        for (double b : {-a, a + std::numbers::pi, -a + std::numbers::pi})
            if (add(b)) frontier.push_back(wrap(b));
    }
    std::sort(found.begin(), found.end());
    if (target_size > 0 && static_cast<int>(found.size()) != target_size)
        throw InvalidInput("angle closure has " + std::to_string(found.size()) + " elements, expected " +
                           std::to_string(target_size));
    AngleSet out;
    out.angles = found;
    for (double a : found) {
        out.neg.push_back(out.find(-a));
        out.shift.push_back(out.find(a + std::numbers::pi));
    }
    return out;
}

std::string reported_angle_label(int v) { return "Ar" + std::to_string(v); }
std::string reported_outcome_label(int v) { return "Cr" + std::to_string(v); }

std::vector<OutputChoice> output_sets(const BqcSetup& s) {
    check_setup(s);
    std::vector<OutputChoice> out;
    const int n = s.graph.n;
    for (long mask = 1; mask < (1L << n) - 1; ++mask) {
        OpenGraph g = s.graph;
        g.inputs.clear();
        g.outputs.clear();
        g.planes.clear();
        for (int v = 1; v <= n; ++v) {
            if (mask & (1L << (v - 1)))
                g.outputs.insert(v);
            else
                g.planes[v] = Plane::XY;
        }
        EnumerationOptions eo;
        eo.total_order = s.order;
        auto flows = enumerate_gflows(g, eo);
        if (flows.empty()) continue;
        OutputChoice c;
        c.outputs = g.outputs;
        for (const auto& f : flows) c.sets.push_back(correction_sets(f, g));
        c.gflows = std::move(flows);
        out.push_back(std::move(c));
    }
    // Smaller output sets first, then lexicographic.
    std::stable_sort(out.begin(), out.end(), [](const OutputChoice& a, const OutputChoice& b) {
        if (a.outputs.size() != b.outputs.size()) return a.outputs.size() < b.outputs.size();
        return a.outputs < b.outputs;
    });
    return out;
}

int reported_angle(const BqcSetup& s, const CorrectionSets& cs, int v, const std::vector<int>& alpha,
                   const std::vector<int>& r, const std::vector<int>& c_prime) {
    const int n = s.graph.n;
    check_vector(alpha, n, "alpha");
    check_vector(r, n, "pad");
    check_vector(c_prime, n, "reported outcomes");
    if (v < 1 || v > n) throw InvalidInput("vertex " + std::to_string(v) + " out of range");
    const auto pos = position_map(s);
    std::vector<int> c(n);
    for (int j = 0; j < n; ++j) c[j] = c_prime[j] ^ r[j];
    auto past = [&](const std::map<int, VertexSet>& m) -> VertexSet {
        auto it = m.find(v);
        if (it == m.end()) return {};
        for (int j : it->second)
            if (pos.at(j) >= pos.at(v))
                throw InvalidInput("correction set of vertex " + std::to_string(v) + " references later vertex " +
                                   std::to_string(j));
        return it->second;
    };
    const int sx = parity(past(cs.x_sets), c);
    const int sz = parity(past(cs.z_sets), c) ^ r[v - 1];
    int a = alpha[v - 1];
    if (a < 0 || a >= s.angles.size()) throw InvalidInput("angle index out of range");
    if (sx) a = s.angles.neg[a];
    if (sz) a = s.angles.shift[a];
    return a;
}

SpaceLayout bqc_layout(const BqcSetup& s) {
    std::vector<SubsystemLabel> f;
    for (int v : s.order) {
        f.push_back({reported_angle_label(v), s.angles.size()});
        f.push_back({reported_outcome_label(v), 2});
    }
    return SpaceLayout(f);
}

TimeStepStructure bqc_structure(const BqcSetup& s) {
    TimeStepStructure t;
    Slot cur;
    for (int v : s.order) {
        cur.out = {reported_angle_label(v)};
        t.steps.push_back(cur);
        cur = Slot{{reported_outcome_label(v)}, {}};
    }
    t.steps.push_back(cur);
    return t;
}

ClassicalComb build_sigma_bqc(const BqcSetup& s, const std::vector<int>& alpha, const std::vector<int>& r,
                              const CorrectionSets& cs) {
    check_setup(s);
    ClassicalComb c;
    c.layout = bqc_layout(s);
    c.structure = bqc_structure(s);
    c.diag = Eigen::VectorXd::Zero(c.layout.total_dim());
    for_each_transcript(s, cs, alpha, r,
                        [&](const std::vector<int>& ap, const std::vector<int>& cp) { c.diag[entry_index(s, ap, cp)] = 1.0; });
    return c;
}

std::vector<std::pair<long, double>> sigma_alpha_o_sparse(const BqcSetup& s, const std::vector<int>& alpha,
                                                          const std::vector<CorrectionSets>& sets) {
    check_setup(s);
    if (sets.empty()) throw InvalidInput("no gflows for the output set");
    const int n = s.graph.n;
    const double w = 1.0 / (static_cast<double>(sets.size()) * static_cast<double>(1L << n));
    std::map<long, double> acc;
    std::vector<int> r(n);
    for (const auto& cs : sets)
        for (long bits = 0; bits < (1L << n); ++bits) {
            for (int j = 0; j < n; ++j) r[j] = static_cast<int>((bits >> j) & 1);
            for_each_transcript(s, cs, alpha, r, [&](const std::vector<int>& ap, const std::vector<int>& cp) {
                acc[entry_index(s, ap, cp)] += w;
            });
        }
    return {acc.begin(), acc.end()};
}

ClassicalComb build_sigma_alpha_O(const BqcSetup& s, const std::vector<int>& alpha,
                                  const std::vector<CorrectionSets>& sets) {
    ClassicalComb c;
    c.layout = bqc_layout(s);
    c.structure = bqc_structure(s);
    c.diag = Eigen::VectorXd::Zero(c.layout.total_dim());
    for (const auto& [i, w] : sigma_alpha_o_sparse(s, alpha, sets)) c.diag[i] = w;
    return c;
}

namespace {

std::vector<OutputChoice> selected_outputs(const BqcSetup& s, const ClientOptions& opt) {
    auto all = output_sets(s);
    if (all.empty()) throw InvalidInput("no output set admits an order-compatible gflow");
    if (!opt.outputs) return all;
    std::vector<OutputChoice> out;
    for (const auto& o : *opt.outputs) {
        auto it = std::find_if(all.begin(), all.end(), [&](const OutputChoice& c) { return c.outputs == o; });
        if (it == all.end()) throw InvalidInput("output set " + set_string(o) + " admits no order-compatible gflow");
        out.push_back(*it);
    }
    return out;
}

std::vector<double> output_prior(const std::vector<OutputChoice>& outs, const ClientOptions& opt) {
    std::vector<double> p(outs.size(), 1.0 / static_cast<double>(outs.size()));
    if (opt.p_output) {
        if (opt.p_output->size() != outs.size()) throw InvalidInput("P(O) must have one entry per output set");
        p = *opt.p_output;
        double t = 0.0;
        for (double x : p) {
            if (!(x >= 0.0)) throw InvalidInput("P(O) entries must be nonnegative");
            t += x;
        }
        if (std::fabs(t - 1.0) > 1e-9) throw InvalidInput("P(O) must sum to 1");
    }
    return p;
}

}  // namespace

SparseClassicalCq build_D_client_sparse(const BqcSetup& s, const ClientOptions& opt) {
    const auto outs = selected_outputs(s, opt);
    const auto po = output_prior(outs, opt);
    const int n = s.graph.n;
    const int a = s.angles.size();
    long na = 1;
    for (int i = 0; i < n; ++i) na *= a;
    SparseClassicalCq cq;
    cq.layout = bqc_layout(s);
    cq.structure = bqc_structure(s);
    std::vector<int> alpha(n);
    for (std::size_t oi = 0; oi < outs.size(); ++oi)
        for (long ai = 0; ai < na; ++ai) {
            long t = ai;
            for (int k = n - 1; k >= 0; --k) {
                alpha[s.order[k] - 1] = static_cast<int>(t % a);
                t /= a;
            }
            cq.prior.push_back(po[oi] / static_cast<double>(na));
            cq.blocks.push_back(sigma_alpha_o_sparse(s, alpha, outs[oi].sets));
            std::string name = "a=";
            for (int k = 0; k < n; ++k) name += (k ? "," : "") + std::to_string(alpha[s.order[k] - 1]);
            cq.x_names.push_back(name + ";O=" + set_string(outs[oi].outputs));
        }
    return cq;
}

ClassicalCqComb build_D_client(const BqcSetup& s, const ClientOptions& opt, long length_cap) {
    const auto sp = build_D_client_sparse(s, opt);
    const double total = static_cast<double>(sp.layout.total_dim()) * static_cast<double>(sp.blocks.size());
    if (total > static_cast<double>(length_cap))
        throw CapExceeded("dense client comb size " + std::to_string(static_cast<long>(total)) + " exceeds cap");
    ClassicalCqComb cq;
    cq.prior = sp.prior;
    cq.x_names = sp.x_names;
    for (const auto& b : sp.blocks) {
        ClassicalComb c;
        c.layout = sp.layout;
        c.structure = sp.structure;
        c.diag = Eigen::VectorXd::Zero(sp.layout.total_dim());
        for (const auto& [i, w] : b) c.diag[i] = w;
        cq.blocks.push_back(std::move(c));
    }
    return cq;
}

TheoremBounds theorem_bounds(const BqcSetup& s, const ClientOptions& opt) {
    const auto outs = selected_outputs(s, opt);
    const auto po = output_prior(outs, opt);
    TheoremBounds b;
    b.single_round = s.graph.n + std::log2(static_cast<double>(outs.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < outs.size(); ++i) sum += po[i] / std::pow(2.0, static_cast<double>(outs[i].outputs.size()));
    b.any_round = -std::log2(sum);
    return b;
}

bool check_preimage_uniqueness(const BqcSetup& s) {
    const int n = s.graph.n;
    const int a = s.angles.size();
    long na = 1;
    for (int i = 0; i < n; ++i) na *= a;
    std::vector<int> alpha(n), r(n), cp(n);
    for (const auto& o : output_sets(s))
        for (const auto& cs : o.sets)
            for (long ai = 0; ai < na; ++ai) {
                long t = ai;
                for (int v = 0; v < n; ++v, t /= a) alpha[v] = static_cast<int>(t % a);
                for (long cb = 0; cb < (1L << n); ++cb) {
                    for (int j = 0; j < n; ++j) cp[j] = static_cast<int>((cb >> j) & 1);
                    std::set<std::vector<int>> seen;
                    for (long rb = 0; rb < (1L << n); ++rb) {
                        for (int j = 0; j < n; ++j) r[j] = static_cast<int>((rb >> j) & 1);
                        std::vector<int> ap(n);
                        for (int v : s.order) ap[v - 1] = reported_angle(s, cs, v, alpha, r, cp);
                        if (!seen.insert(ap).second) return false;
                    }
                }
            }
    return true;
}

double check_output_symmetry(const BqcSetup& s) {
    const int n = s.graph.n;
    const int a = s.angles.size();
    long na = 1;
    for (int i = 0; i < n; ++i) na *= a;
    double worst = 0.0;
    std::vector<int> alpha(n);
    for (const auto& o : output_sets(s)) {
        const std::vector<int> outs(o.outputs.begin(), o.outputs.end());
        for (long ai = 0; ai < na; ++ai) {
            long t = ai;
            for (int v = 0; v < n; ++v, t /= a) alpha[v] = static_cast<int>(t % a);
            const auto base = sigma_alpha_o_sparse(s, alpha, o.sets);
            for (long b = 1; b < (1L << outs.size()); ++b) {
                auto tilde = alpha;
                for (std::size_t k = 0; k < outs.size(); ++k)
                    if (b & (1L << k)) tilde[outs[k] - 1] = s.angles.shift[tilde[outs[k] - 1]];
                const auto other = sigma_alpha_o_sparse(s, tilde, o.sets);
                std::map<long, double> diff;
                for (const auto& [i, w] : base) diff[i] += w;
                for (const auto& [i, w] : other) diff[i] -= w;
                for (const auto& [i, w] : diff) worst = std::max(worst, std::fabs(w));
            }
        }
    }
    return worst;
}

}  // namespace qcomb
