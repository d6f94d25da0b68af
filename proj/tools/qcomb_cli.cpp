#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "qcomb/bqc.hpp"
#include "qcomb/entropy.hpp"
#include "qcomb/error.hpp"
#include "qcomb/fixtures.hpp"
#include "qcomb/io.hpp"
#include "qcomb/mbqc.hpp"
#include "qcomb/observational.hpp"

namespace {

using qcomb::io::json;

constexpr const char* kVersion = "0.1.0";
constexpr const char* kConfigEnv = "QCOMB_CONFIG";

enum Exit { kOk = 0, kInvalid = 1, kSolver = 2, kCap = 3 };

struct Settings {
    std::string config_path;
    std::string out_path;
    std::string format = "json";
    double tol = 1e-8;
    long dim_cap = 4096;
    int jobs = 1;
    std::uint64_t seed = 1;
};

struct Report {
    std::string command;
    json scenario = json::object();
    json records = json::array();
    std::vector<std::string> notices;
};

// Command-line values win over the config file, which wins over defaults.
template <typename T>
T pick(const CLI::Option* opt, const T& cli_value, const json& cfg, const char* key, const T& fallback) {
    if (opt && opt->count() > 0) return cli_value;
    if (cfg.contains(key)) return cfg.at(key).get<T>();
    return fallback;
}

qcomb::MinEntropyOptions entropy_options(const Settings& s) {
    qcomb::MinEntropyOptions o;
    o.sdp.gap_tol = s.tol;
    o.dim_cap = s.dim_cap;
    return o;
}

json result_record(const std::string& name, const qcomb::MinEntropyResult& r) {
    json j = qcomb::io::to_json(r);
    j["instance"] = name;
    return j;
}

// ---- bqc ----

struct BqcArgs {
    std::string builtin = "minimal-3vertex";
    int angles = 4;
    int rounds = 1;
    std::string graph_path;
    std::vector<int> order;
    long work_cap = 2'000'000'000L;
};

qcomb::BqcSetup bqc_setup(const BqcArgs& a) {
    std::vector<double> seeds;
    if (a.angles == 4)
        seeds = qcomb::fixtures::four_angle_seeds();
    else if (a.angles == 8)
        seeds = qcomb::fixtures::eight_angle_seeds();
    else
        throw qcomb::InvalidInput("builtin angle sets have 4 or 8 angles");
    qcomb::BqcSetup s;
    s.angles = qcomb::closed_angle_set(seeds, a.angles);
    if (a.graph_path.empty()) {
        s.graph = qcomb::fixtures::bqc_triangle();
    } else {
        s.graph = qcomb::io::graph_from_json(qcomb::io::read_file(a.graph_path));
        s.graph.inputs.clear();
        s.graph.outputs.clear();
    }
    if (a.order.empty()) {
        for (int v = 1; v <= s.graph.n; ++v) s.order.push_back(v);
    } else {
        s.order = a.order;
    }
    return s;
}

void run_bqc(const BqcArgs& a, const Settings&, Report& rep) {
    const auto s = bqc_setup(a);
    const auto outs = qcomb::output_sets(s);
    if (outs.empty()) throw qcomb::InvalidInput("no output set admits a gflow compatible with the order");
    const auto d = qcomb::build_D_client_sparse(s);
    const auto tb = qcomb::theorem_bounds(s);
    json sets = json::array();
    for (const auto& o : outs) sets.push_back({{"outputs", o.outputs}, {"gflows", o.gflows.size()}});

    const auto r1 = qcomb::min_entropy_classical(d, 1, a.work_cap);
    const auto b1 = qcomb::classical_bounds(d, 1, a.work_cap);
    rep.records.push_back({{"rounds", 1},
                           {"angles", s.angles.size()},
                           {"output_sets", sets},
                           {"exact", r1.p_guess},
                           {"h_min", r1.h_min},
                           {"lower", b1.lower},
                           {"upper", b1.upper},
                           {"theorem_single_round_hmin", tb.single_round},
                           {"theorem_any_round_hmin", tb.any_round}});
    for (int m = 2; m <= a.rounds; ++m) {
        json rec = {{"rounds", m}, {"angles", s.angles.size()}, {"theorem_any_round_hmin", tb.any_round}};
        try {
            const auto b = qcomb::classical_bounds(d, m, a.work_cap);
            rec["lower"] = b.lower;
            rec["upper"] = b.upper;
        } catch (const qcomb::CapExceeded& e) {
            rep.notices.push_back("round " + std::to_string(m) + ": bounds skipped, " + e.what());
            rep.records.push_back(rec);
            break;
        }
        try {
            const auto r = qcomb::min_entropy_classical(d, m, a.work_cap);
            rec["exact"] = r.p_guess;
            rec["h_min"] = r.h_min;
        } catch (const qcomb::CapExceeded& e) {
            rep.notices.push_back("round " + std::to_string(m) + ": bounds only, " + e.what());
        }
        rep.records.push_back(rec);
    }
}

// ---- gflow / planes ----

struct GflowArgs {
    std::string builtin = "four-qubit-15";
    bool observational = true;
    int mesh = 400;
    int refine = 6;
    int determinism_samples = 3;
};

std::map<int, qcomb::PlaneMeasurement> random_angles(const qcomb::Gflow& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
    std::map<int, qcomb::PlaneMeasurement> out;
    for (const auto& [v, p] : g.planes) out[v] = {p, u(rng)};
    return out;
}

void run_gflow(const GflowArgs& a, const Settings& st, Report& rep) {
    const auto graph = qcomb::fixtures::four_qubit_graph();
    const auto cat = qcomb::fixtures::four_qubit_catalogue();
    const auto opt = entropy_options(st);

    if (a.builtin == "planes") {
        std::map<std::string, int> counts;
        for (const auto& g : qcomb::enumerate_gflows(graph)) {
            std::string key;
            for (const auto& [v, p] : g.planes) key += (key.empty() ? "" : ",") + std::to_string(v) + ":" + qcomb::to_string(p);
            ++counts[key];
        }
        const auto cq = qcomb::build_D_mp(graph);
        json rec = result_record("planes", qcomb::min_entropy(cq, opt));
        rec["optimal"] = rec["p_guess"];
        rec["gflows_per_plane_assignment"] = counts;
        rep.records.push_back(rec);
        return;
    }

    std::vector<qcomb::Gflow> gs;
    if (a.builtin == "four-qubit-15") {
        gs = cat;
    } else if (a.builtin == "xy-restricted") {
        for (int i : qcomb::fixtures::xy_restricted_indices()) gs.push_back(cat[i - 1]);
    } else {
        throw qcomb::InvalidInput("unknown gflow builtin '" + a.builtin + "'");
    }

    const auto enumerated = qcomb::enumerate_gflows(graph);
    std::mt19937_64 rng(st.seed);
    double det = 0.0;
    for (const auto& g : gs)
        for (int k = 0; k < a.determinism_samples; ++k)
            det = std::max(det, qcomb::check_determinism(g, graph, random_angles(g, rng)));

    const auto cq = qcomb::build_D_gflow(graph, gs, std::vector<double>(gs.size(), 1.0 / gs.size()));
    json rec = result_record(a.builtin, qcomb::min_entropy(cq, opt));
    rec["optimal"] = rec["p_guess"];
    rec["gflows"] = gs.size();
    rec["enumerated_gflows"] = enumerated.size();
    rec["prior_baseline"] = 1.0 / gs.size();
    rec["max_determinism_deviation"] = det;
    if (a.builtin == "xy-restricted") rec["equivalence_deviation"] = qcomb::check_causal_equivalence(gs, graph);
    if (a.observational) {
        qcomb::ObservationalOptions oo;
        oo.mesh = a.mesh;
        oo.refine_levels = a.refine;
        const auto obs = qcomb::observational_search(cq, oo);
        rec["observational"] = obs.p_guess;
        rec["observational_evaluations"] = obs.evaluations;
        json dirs = json::array();
        for (const auto& d : obs.directions) dirs.push_back({{"theta", d.theta}, {"phi", d.phi}});
        rec["observational_directions"] = dirs;
        if (obs.boundary_hit) rep.notices.push_back("observational optimum on the edge of the finest refinement grid");
    }
    rep.records.push_back(rec);
}

// ---- calibrate ----

struct CalibrateArgs {
    int from = 2;
    int to = 8;
};

void run_calibrate(const CalibrateArgs& a, const Settings& st, Report& rep) {
    if (a.from < 2 || a.to > 32 || a.from > a.to) throw qcomb::InvalidInput("angle counts must satisfy 2 <= from <= to <= 32");
    const int n = a.to - a.from + 1;
    std::vector<qcomb::MinEntropyResult> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<int> next{0};
    const auto opt = entropy_options(st);
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                results[i] = qcomb::min_entropy(qcomb::build_D_calibr(a.from + i), opt);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::max(1, std::min(st.jobs, n)); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (int i = 0; i < n; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        const int count = a.from + i;
        rep.records.push_back({{"angle_count", count},
                               {"p_guess", results[i].p_guess},
                               {"prior_baseline", 1.0 / count},
                               {"duality_gap", results[i].duality_gap}});
    }
}

// ---- min-entropy / validate ----

struct FileArgs {
    std::string path;
    int rounds = 1;
    std::string certificate;
};

void run_min_entropy(const FileArgs& a, const Settings& st, Report& rep) {
    const auto comb = qcomb::io::any_from_json(qcomb::io::read_file(a.path));
    if (const auto* cq = std::get_if<qcomb::ClassicalQuantumComb>(&comb)) {
        const auto src = a.rounds > 1 ? qcomb::multi_round(*cq, a.rounds, st.dim_cap) : *cq;
        const auto r = qcomb::min_entropy(src, entropy_options(st));
        rep.records.push_back(result_record(a.path, r));
        if (!a.certificate.empty()) {
            const auto s = qcomb::extract_strategy(r, src);
            qcomb::io::write_file(a.certificate, qcomb::io::to_json(qcomb::Comb{s.e, s.structure, true}));
        }
    } else if (const auto* ccq = std::get_if<qcomb::ClassicalCqComb>(&comb)) {
        const auto r = qcomb::min_entropy_classical(qcomb::to_sparse(*ccq), a.rounds);
        rep.records.push_back(result_record(a.path, r));
        if (!a.certificate.empty() && r.classical_gamma) qcomb::io::write_file(a.certificate, qcomb::io::to_json(*r.classical_gamma));
    } else {
        throw qcomb::InvalidInput("min-entropy needs a classical-quantum comb file");
    }
}

void run_validate(const FileArgs& a, const Settings& st, Report& rep) {
    const auto comb = qcomb::io::any_from_json(qcomb::io::read_file(a.path));
    qcomb::ValidationOptions vo;
    vo.tol = std::max(st.tol, 1e-12);
    auto add = [&](const std::string& name, const qcomb::ValidationReport& r) {
        json j = qcomb::io::to_json(r);
        j["instance"] = name;
        rep.records.push_back(j);
    };
    std::visit(
        [&](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, qcomb::Comb>) {
                add(a.path, qcomb::validate_comb(c, vo));
            } else if constexpr (std::is_same_v<T, qcomb::ClassicalComb>) {
                add(a.path, qcomb::validate_classical_comb(c, vo.tol, c.normalized));
            } else if constexpr (std::is_same_v<T, qcomb::ClassicalQuantumComb>) {
                qcomb::check_cq(c, vo);
                for (std::size_t x = 0; x < c.blocks.size(); ++x)
                    add(x < c.x_names.size() ? c.x_names[x] : std::to_string(x), qcomb::validate_comb(c.blocks[x], vo));
            } else {
                qcomb::check_cq(c, vo.tol);
                for (std::size_t x = 0; x < c.blocks.size(); ++x)
                    add(x < c.x_names.size() ? c.x_names[x] : std::to_string(x),
                        qcomb::validate_classical_comb(c.blocks[x], vo.tol, c.blocks[x].normalized));
            }
        },
        comb);
}

// ---- output ----

std::string csv_cell(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) {
        std::ostringstream os;
        os << std::setprecision(12) << v.get<double>();
        return os.str();
    }
    if (v.is_primitive()) return v.dump();
    std::string quoted = "\"";
    for (char ch : v.dump()) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return quoted + "\"";
}

std::string to_csv(const json& records) {
    std::vector<std::string> cols;
    for (const auto& r : records)
        for (const auto& [k, v] : r.items())
            if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
    std::ostringstream os;
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    for (const auto& r : records) {
        for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << (r.contains(cols[i]) ? csv_cell(r[cols[i]]) : "");
        os << "\n";
    }
    return os.str();
}

void emit(const Report& rep, const Settings& st, double wall_ms) {
    std::string text;
    if (st.format == "csv") {
        text = to_csv(rep.records);
    } else {
        json j = {{"command", rep.command},
                  {"scenario", rep.scenario},
                  {"results", rep.records},
                  {"notices", rep.notices},
                  {"environment", {{"version", kVersion}, {"seed", st.seed}, {"jobs", st.jobs}, {"wall_ms", wall_ms}}}};
        text = j.dump(2) + "\n";
    }
    for (const auto& n : rep.notices) std::cerr << "notice: " << n << "\n";
    if (st.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(st.out_path);
    if (!f) throw qcomb::InvalidInput("cannot write '" + st.out_path + "'");
    f << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Min-entropy of classical-quantum combs from MBQC and blind computation"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", kVersion);

    Settings cli;
    auto* o_config = app.add_option("--config", cli.config_path, "JSON scenario file (env " + std::string(kConfigEnv) + ")");
    auto* o_out = app.add_option("--out", cli.out_path, "Write the report here instead of stdout");
    auto* o_format = app.add_option("--format", cli.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    auto* o_tol = app.add_option("--tol", cli.tol, "Relative duality-gap target")->check(CLI::PositiveNumber);
    auto* o_cap = app.add_option("--dim-cap", cli.dim_cap, "Largest assembled operator dimension")->check(CLI::PositiveNumber);
    auto* o_jobs = app.add_option("--jobs", cli.jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    auto* o_seed = app.add_option("--seed", cli.seed, "Seed for randomized checks");
    o_config->envname(kConfigEnv);

    BqcArgs bqc;
    auto* sc_bqc = app.add_subcommand("bqc", "Blind computation client comb: exact value, bounds and analytic bounds");
    auto* o_bqc_builtin = sc_bqc->add_option("--builtin", bqc.builtin, "minimal-3vertex or minimal-3vertex-2rounds");
    auto* o_bqc_angles = sc_bqc->add_option("--angles", bqc.angles, "Angle-set size (4 or 8)");
    auto* o_bqc_rounds = sc_bqc->add_option("--rounds", bqc.rounds, "Rounds")->check(CLI::Range(1, 8));
    auto* o_bqc_graph = sc_bqc->add_option("--graph", bqc.graph_path, "Open-graph JSON replacing the builtin triangle");
    auto* o_bqc_order = sc_bqc->add_option("--order", bqc.order, "Agreed total order on the vertices");
    auto* o_bqc_cap = sc_bqc->add_option("--work-cap", bqc.work_cap, "Work cap for the classical recursion");

    GflowArgs gf;
    auto* sc_gflow = app.add_subcommand("gflow", "Causal discovery over gflows on the four-qubit graph");
    auto* o_gf_builtin = sc_gflow->add_option("--builtin", gf.builtin, "four-qubit-15, xy-restricted or planes");
    bool no_obs = false;
    auto* o_gf_noobs = sc_gflow->add_flag("--no-observational", no_obs, "Skip the observational search");
    auto* o_gf_mesh = sc_gflow->add_option("--mesh", gf.mesh, "Sphere points per measured wire")->check(CLI::PositiveNumber);
    auto* o_gf_refine = sc_gflow->add_option("--refine", gf.refine, "Local refinement levels")->check(CLI::NonNegativeNumber);

    auto* sc_planes = app.add_subcommand("planes", "Learning the measurement planes on the four-qubit graph");

    CalibrateArgs cal;
    auto* sc_cal = app.add_subcommand("calibrate", "Sweep of the calibration comb over angle counts");
    auto* o_cal_from = sc_cal->add_option("--from", cal.from, "Smallest angle count");
    auto* o_cal_to = sc_cal->add_option("--to", cal.to, "Largest angle count");

    FileArgs me;
    auto* sc_me = app.add_subcommand("min-entropy", "Min-entropy of a classical-quantum comb file");
    sc_me->add_option("file", me.path, "Comb JSON")->required()->check(CLI::ExistingFile);
    sc_me->add_option("--rounds", me.rounds, "Rounds")->check(CLI::Range(1, 8));
    sc_me->add_option("--certificate", me.certificate, "Write the optimal strategy comb here");

    FileArgs va;
    auto* sc_va = app.add_subcommand("validate", "Check comb conditions of a comb file");
    sc_va->add_option("file", va.path, "Comb JSON")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    const auto t0 = std::chrono::steady_clock::now();
    try {
        json cfg = json::object();
        if (!cli.config_path.empty()) cfg = qcomb::io::read_file(cli.config_path);
        if (!cfg.is_object()) throw qcomb::InvalidInput("config must be a JSON object");

        Settings st;
        st.out_path = pick(o_out, cli.out_path, cfg, "out", std::string());
        st.format = pick(o_format, cli.format, cfg, "format", std::string("json"));
        st.tol = pick(o_tol, cli.tol, cfg, "tol", 1e-8);
        st.dim_cap = pick(o_cap, cli.dim_cap, cfg, "dim_cap", 4096L);
        st.jobs = pick(o_jobs, cli.jobs, cfg, "jobs", 1);
        st.seed = pick(o_seed, cli.seed, cfg, "seed", std::uint64_t{1});
        if (st.format != "json" && st.format != "csv") throw qcomb::InvalidInput("format must be json or csv");
        if (st.tol <= 0 || st.dim_cap <= 0 || st.jobs <= 0) throw qcomb::InvalidInput("tol, dim_cap and jobs must be positive");

        Report rep;
        rep.command = app.get_subcommands().front()->get_name();
        if (sc_bqc->parsed()) {
            BqcArgs a;
            a.builtin = pick(o_bqc_builtin, bqc.builtin, cfg, "builtin", a.builtin);
            if (a.builtin == "minimal-3vertex-2rounds") {
                a.angles = 8;
                a.rounds = 2;
            } else if (a.builtin != "minimal-3vertex") {
                throw qcomb::InvalidInput("unknown bqc builtin '" + a.builtin + "'");
            }
            a.angles = pick(o_bqc_angles, bqc.angles, cfg, "angles", a.angles);
            a.rounds = pick(o_bqc_rounds, bqc.rounds, cfg, "rounds", a.rounds);
            a.graph_path = pick(o_bqc_graph, bqc.graph_path, cfg, "graph", a.graph_path);
            a.order = pick(o_bqc_order, bqc.order, cfg, "order", a.order);
            a.work_cap = pick(o_bqc_cap, bqc.work_cap, cfg, "work_cap", a.work_cap);
            if (a.rounds < 1) throw qcomb::InvalidInput("rounds must be at least 1");
            rep.scenario = {{"experiment", "bqc"}, {"builtin", a.builtin}, {"angles", a.angles}, {"rounds", a.rounds},
                            {"graph", a.graph_path}, {"order", a.order}};
            run_bqc(a, st, rep);
        } else if (sc_gflow->parsed() || sc_planes->parsed()) {
            GflowArgs a;
            a.builtin = sc_planes->parsed() ? "planes" : pick(o_gf_builtin, gf.builtin, cfg, "builtin", a.builtin);
            a.observational = o_gf_noobs->count() > 0 ? !no_obs : cfg.value("observational", true);
            a.mesh = pick(o_gf_mesh, gf.mesh, cfg, "mesh", a.mesh);
            a.refine = pick(o_gf_refine, gf.refine, cfg, "refine", a.refine);
            rep.scenario = {{"experiment", a.builtin == "planes" ? "planes" : "gflow-discovery"}, {"builtin", a.builtin},
                            {"observational", a.observational}, {"mesh", a.mesh}, {"refine", a.refine}};
            run_gflow(a, st, rep);
        } else if (sc_cal->parsed()) {
            CalibrateArgs a;
            a.from = pick(o_cal_from, cal.from, cfg, "from", a.from);
            a.to = pick(o_cal_to, cal.to, cfg, "to", a.to);
            rep.scenario = {{"experiment", "calibrate"}, {"from", a.from}, {"to", a.to}};
            run_calibrate(a, st, rep);
        } else if (sc_me->parsed()) {
            rep.scenario = {{"experiment", "custom-comb"}, {"file", me.path}, {"rounds", me.rounds}};
            run_min_entropy(me, st, rep);
        } else {
            rep.scenario = {{"experiment", "validate"}, {"file", va.path}};
            run_validate(va, st, rep);
        }
        rep.scenario["tol"] = st.tol;
        rep.scenario["dim_cap"] = st.dim_cap;
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        emit(rep, st, ms);
        return kOk;
    } catch (const qcomb::CapExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCap;
    } catch (const qcomb::SolverFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSolver;
    } catch (const qcomb::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const qcomb::io::json::exception& e) {
        std::cerr << "error: malformed config: " << e.what() << "\n";
        return kInvalid;
    }
}
