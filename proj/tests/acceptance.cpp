#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qcomb/bqc.hpp"
#include "qcomb/entropy.hpp"
#include "qcomb/error.hpp"
#include "qcomb/fixtures.hpp"
#include "qcomb/gflow.hpp"
#include "qcomb/mbqc.hpp"
#include "qcomb/observational.hpp"
#include "support.hpp"

using namespace qcomb;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

std::string fmt(double v, int prec = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

BqcSetup triangle(int angles) {
    const auto seeds = angles == 4 ? fixtures::four_angle_seeds() : fixtures::eight_angle_seeds();
    return {fixtures::bqc_triangle(), {1, 2, 3}, closed_angle_set(seeds, angles)};
}

std::vector<Gflow> xy_restricted() {
    const auto cat = fixtures::four_qubit_catalogue();
    std::vector<Gflow> out;
    for (int i : fixtures::xy_restricted_indices()) out.push_back(cat[i - 1]);
    return out;
}

// Expensive instances are built and solved once and shared between criteria.
struct Shared {
    OpenGraph graph = fixtures::four_qubit_graph();
    std::optional<ClassicalQuantumComb> gflow_cq, xy_cq, mp_cq;
    std::optional<MinEntropyResult> gflow, xy, mp;
    double gflow_seconds = 0.0;
    std::vector<MinEntropyResult> calibr;  // index N - 2
    double calibr_seconds = 0.0;

    const ClassicalQuantumComb& gflow_comb() {
        if (!gflow_cq) gflow_cq = build_D_gflow(graph, fixtures::four_qubit_catalogue(), std::vector<double>(15, 1.0 / 15));
        return *gflow_cq;
    }
    const ClassicalQuantumComb& xy_comb() {
        if (!xy_cq) xy_cq = build_D_gflow(graph, xy_restricted(), std::vector<double>(4, 0.25));
        return *xy_cq;
    }
    const ClassicalQuantumComb& mp_comb() {
        if (!mp_cq) mp_cq = build_D_mp(graph);
        return *mp_cq;
    }
    const MinEntropyResult& gflow_result() {
        if (!gflow) {
            const auto t0 = Clock::now();
            gflow = min_entropy(gflow_comb());
            gflow_seconds = seconds_since(t0);
        }
        return *gflow;
    }
    const MinEntropyResult& xy_result() {
        if (!xy) xy = min_entropy(xy_comb());
        return *xy;
    }
    const MinEntropyResult& mp_result() {
        if (!mp) mp = min_entropy(mp_comb());
        return *mp;
    }
    const std::vector<MinEntropyResult>& calibration() {
        if (calibr.empty()) {
            const auto t0 = Clock::now();
            for (int n = 2; n <= 32; ++n) calibr.push_back(min_entropy(build_D_calibr(n)));
            calibr_seconds = seconds_since(t0);
        }
        return calibr;
    }
};

void criterion1(Outcome& o, Shared&) {
    for (int a : {4, 8}) {
        const auto t0 = Clock::now();
        const auto d = build_D_client_sparse(triangle(a));
        const auto r = min_entropy_classical(d);
        const auto b = classical_bounds(d);
        const double secs = seconds_since(t0);
        o.detail << "|A|=" << a << ": exact " << fmt(r.p_guess, 9) << ", bounds [" << fmt(b.lower, 9) << ", " << fmt(b.upper, 9)
                 << "], " << fmt(secs, 2) << " s; ";
        o.require(std::abs(r.p_guess - 0.125) <= 1e-9, "exact value 0.125");
        o.require(std::abs(b.lower - 0.125) <= 1e-9 && std::abs(b.upper - 0.125) <= 1e-9, "bounds equal 0.125");
        if (a == 8) o.require(secs < 60.0, "runtime < 60 s");
    }
}

void criterion2(Outcome& o, Shared&) {
    const auto t0 = Clock::now();
    const auto b = classical_bounds(build_D_client_sparse(triangle(8)), 2);
    const double secs = seconds_since(t0);
    o.detail << "two rounds, 8 angles: [" << fmt(b.lower, 9) << ", " << fmt(b.upper, 9) << "], " << fmt(secs, 2) << " s";
    o.require(std::abs(b.lower - 0.140625) <= 1e-9, "lower bound 0.140625");
    o.require(std::abs(b.upper - 0.28125) <= 1e-9, "upper bound 0.28125");
    o.require(secs < 300.0, "runtime < 5 min");
}

void criterion3(Outcome& o, Shared&) {
    double worst_single = 1e9, worst_any = 1e9;
    for (int a : {4, 8}) {
        const auto s = triangle(a);
        const auto tb = theorem_bounds(s);
        const auto d = build_D_client_sparse(s);
        for (int m = 1; m <= 2; ++m) {
            double h = 0.0;
            try {
                h = min_entropy_classical(d, m).h_min;
            } catch (const CapExceeded&) {
                h = -std::log2(classical_bounds(d, m).upper);  // still a lower bound on H_min
            }
            if (m == 1) worst_single = std::min(worst_single, h - tb.single_round);
            worst_any = std::min(worst_any, h - tb.any_round);
        }
    }
    o.detail << "min H_min - single-round bound " << fmt(worst_single, 9) << ", min H_min - any-round bound " << fmt(worst_any, 9);
    o.require(worst_single >= -1e-9, "single-round bound respected");
    o.require(worst_any >= -1e-9, "any-round bound respected");
}

void criterion4(Outcome& o, Shared& sh) {
    const auto& cq = sh.gflow_comb();
    const auto& r = sh.gflow_result();
    o.detail << cq.blocks.size() << " blocks of dim " << cq.blocks.front().op.dim() << ", p_guess " << fmt(r.p_guess)
             << " (target 0.3732), gap " << sci(r.duality_gap) << ", " << fmt(sh.gflow_seconds, 1) << " s";
    o.require(std::abs(r.p_guess - 0.3732) <= 1e-3, "p_guess within 1e-3 of 0.3732");
    o.require(sh.gflow_seconds < 600.0, "runtime < 10 min");
}

void criterion5(Outcome& o, Shared& sh) {
    const auto t0 = Clock::now();
    const auto obs = observational_search(sh.gflow_comb());
    const double secs = seconds_since(t0);
    const auto obs_xy = observational_search(sh.xy_comb());
    const double opt = sh.gflow_result().p_guess, opt_xy = sh.xy_result().p_guess;
    o.detail << "observational " << fmt(obs.p_guess) << " (target 0.1991, " << obs.evaluations << " evaluations, "
             << fmt(secs, 1) << " s), optimal " << fmt(opt) << "; XY: observational " << fmt(obs_xy.p_guess) << " <= optimal "
             << fmt(opt_xy);
    o.require(std::abs(obs.p_guess - 0.1991) <= 2e-3, "observational within 2e-3 of 0.1991");
    o.require(obs.p_guess <= opt + 1e-6 && obs_xy.p_guess <= opt_xy + 1e-6, "observational <= optimal");
}

void criterion6(Outcome& o, Shared& sh) {
    const auto& r = sh.xy_result();
    const double dev = check_causal_equivalence(xy_restricted(), sh.graph);
    o.detail << "p_guess " << fmt(r.p_guess) << ", gap " << sci(r.duality_gap) << ", equivalence deviation " << sci(dev);
    o.require(std::abs(r.p_guess - 0.25) <= 1e-3, "p_guess within 1e-3 of 0.25");
    o.require(dev <= 1e-9, "equivalence deviation <= 1e-9");
}

void criterion7(Outcome& o, Shared& sh) {
    const auto& r = sh.mp_result();
    o.detail << "p_guess " << fmt(r.p_guess) << ", gap " << sci(r.duality_gap);
    o.require(std::abs(r.p_guess - 1.0) <= 1e-3, "p_guess within 1e-3 of 1");
}

void criterion8(Outcome& o, Shared& sh) {
    const auto& c = sh.calibration();
    o.detail << "|A|=2: " << fmt(c[0].p_guess) << ", |A|=3: " << fmt(c[1].p_guess) << ", |A|=16: " << fmt(c[14].p_guess)
             << ", |A|=32: " << fmt(c[30].p_guess) << ", sweep 2..32 in " << fmt(sh.calibr_seconds, 1) << " s";
    o.require(std::abs(c[0].p_guess - 1.0) <= 1e-3, "|A|=2 within 1e-3 of 1");
    o.require(std::abs(c[1].p_guess - 0.9925) <= 1e-3, "|A|=3 within 1e-3 of 0.9925");
    bool mono = true, above = true;
    for (int n = 2; n <= 16; ++n) {
        if (n > 2 && c[n - 2].p_guess > c[n - 3].p_guess + 1e-6) mono = false;
        if (c[n - 2].p_guess < 1.0 / n - 1e-9) above = false;
    }
    o.require(mono, "nonincreasing on 2..16");
    o.require(above, ">= 1/|A| on 2..16");
    o.require(c.size() == 31, "sweep reaches 32");
    o.require(sh.calibr_seconds < 1800.0, "sweep < 30 min");
}

void criterion9(Outcome& o, Shared& sh) {
    const auto cat = fixtures::four_qubit_catalogue();
    const auto& g = sh.graph;

    std::mt19937_64 rng(20240601);
    double det = 0.0;
    for (const auto& f : cat)
        for (int k = 0; k < 3; ++k) det = std::max(det, check_determinism(f, g, support::random_plane_angles(f, rng)));
    o.detail << "(a) determinism " << sci(det) << "; ";
    o.require(det <= 1e-9, "(a) determinism <= 1e-9");

    int qcm_ok = 0;
    for (const auto& f : cat) qcm_ok += check_qcm_structure(f, g).ok();
    o.detail << "(b) QCM " << qcm_ok << "/15; ";
    o.require(qcm_ok == 15, "(b) QCM structure for all 15");

    const auto tri = output_sets(triangle(4));
    const std::size_t n_tri = tri.empty() ? 0 : tri.front().gflows.size();
    const auto all = enumerate_gflows(g);
    std::map<Plane, int> per_plane;
    for (const auto& f : all) ++per_plane[f.planes.at(2)];
    o.detail << "(c) counts " << n_tri << ", " << all.size() << ", " << per_plane[Plane::XY] << "/" << per_plane[Plane::XZ] << "/"
             << per_plane[Plane::YZ] << "; ";
    o.require(tri.size() == 1 && n_tri == 2, "(c) triangle has 2 gflows");
    o.require(all.size() == 15, "(c) 15 gflows");
    o.require(per_plane[Plane::XY] == 5 && per_plane[Plane::XZ] == 5 && per_plane[Plane::YZ] == 5, "(c) 5/5/5 per plane");

    double worst = 0.0;
    long combs = 0;
    auto check = [&](const ValidationReport& r) {
        ++combs;
        worst = std::max(worst, r.valid ? r.max_residual() : 1.0);
    };
    for (const auto& f : cat) check(validate_comb(build_sigma_mbqc(f, g, default_measurement_order({f}, g))));
    for (const auto* cq : {&sh.gflow_comb(), &sh.xy_comb(), &sh.mp_comb()})
        for (const auto& b : cq->blocks) check(validate_comb(b));
    for (int n = 2; n <= 32; ++n)
        for (const auto& b : build_D_calibr(n).blocks) check(validate_comb(b));
    for (int a : {4, 8}) {
        const auto s = triangle(a);
        const auto sets = output_sets(s).front().sets;
        for (int i = 0; i < a; ++i)
            for (int j = 0; j < a; ++j)
                for (int k = 0; k < a; ++k) check(validate_classical_comb(build_sigma_alpha_O(s, {i, j, k}, sets)));
    }
    o.detail << "(d) " << combs << " combs, worst residual " << sci(worst) << "; ";
    o.require(worst <= 1e-9, "(d) validator residuals <= 1e-9");

    double lp_sdp = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto mi = support::random_micro_instance(seed);
        lp_sdp = std::max(lp_sdp, std::abs(min_entropy_classical(mi.cq).p_guess - min_entropy(support::as_quantum(mi.cq)).p_guess));
    }
    o.detail << "(e) max |LP - SDP| " << sci(lp_sdp) << "; ";
    o.require(lp_sdp <= 1e-6, "(e) LP = SDP");

    double gap = 0.0;
    std::vector<std::pair<const ClassicalQuantumComb*, const MinEntropyResult*>> solved = {
        {&sh.gflow_comb(), &sh.gflow_result()}, {&sh.xy_comb(), &sh.xy_result()}, {&sh.mp_comb(), &sh.mp_result()}};
    for (const auto& [cq, r] : solved) gap = std::max(gap, extract_strategy(*r, *cq).gap);
    for (int n : {2, 3, 8}) gap = std::max(gap, extract_strategy(sh.calibration()[n - 2], build_D_calibr(n)).gap);
    for (int a : {4, 8}) gap = std::max(gap, std::abs(min_entropy_classical(build_D_client_sparse(triangle(a))).duality_gap));
    o.detail << "(f) max strategy gap " << sci(gap) << "; ";
    o.require(gap <= 1e-5, "(f) strong duality <= 1e-5");

    const bool pre = check_preimage_uniqueness(triangle(4));
    o.detail << "(g) preimage uniqueness " << (pre ? "holds" : "violated");
    o.require(pre, "(g) preimage uniqueness");
}

void criterion10(Outcome& o, Shared&) {
    for (int a : {4, 8}) {
        const auto seq = monotonicity_check(build_D_client_sparse(triangle(a)), 2);
        o.require(seq.size() == 2, "two rounds computed");
        if (seq.size() < 2) return;
        o.detail << "|A|=" << a << ": round 1 " << fmt(seq[0].p_guess) << ", round 2 " << fmt(seq[1].p_guess) << " with lower bound "
                 << fmt(seq[1].bounds->lower) << "; ";
        o.require(seq[1].p_guess >= seq[0].p_guess - 1e-12, "nondecreasing in rounds");
        o.require(seq[1].bounds->lower > seq[0].p_guess + 1e-9, "round-2 lower bound above round-1 value");
    }
    bool micro = true;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto seq = monotonicity_check(to_sparse(support::random_micro_instance(seed, 2).cq), 3);
        for (std::size_t i = 1; i < seq.size(); ++i) micro = micro && seq[i].p_guess >= seq[i - 1].p_guess - 1e-12;
    }
    o.detail << "random classical instances up to 3 rounds " << (micro ? "nondecreasing" : "decreasing somewhere");
    o.require(micro, "random instances nondecreasing");
}

}  // namespace

int main() {
    Shared shared;
    const std::vector<std::function<void(Outcome&, Shared&)>> criteria = {
        criterion1, criterion2, criterion3, criterion4, criterion5, criterion6, criterion7, criterion8, criterion9, criterion10};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto t0 = Clock::now();
        try {
            criteria[i](o, shared);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "[exception: " << e.what() << "]";
        }
        failed += !o.pass;
        std::printf("criterion %zu: %s  %s (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.str().c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
