#include "evac/harness.hpp"

#include <chrono>
#include <random>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "evac/bbevac.hpp"
#include "evac/behavior.hpp"
#include "evac/ilp.hpp"
#include "evac/mps.hpp"
#include "evac/schedule.hpp"
#include "evac/solver.hpp"

namespace evac {

namespace {

using Clock = std::chrono::steady_clock;

BehaviorSpec bench_behavior(const std::string& name) {
    if (name == "nebm") return BehaviorSpec::nebm(Rat(7, 10));
    return BehaviorSpec::dbm({{2, Rat(2, 5)}, {5, Rat(3, 5)}});
}

long long max_exit_distance(const BuildingGraph& g) {
    NearestExitTable net = nearest_exit_table(g);
    long long worst = 0;
    for (const auto& row : net.rows)
        if (row.exit >= 0) worst = std::max(worst, row.prefix_time.back());
    return worst;
}

Rat parse_rat_arg(const std::string& s) { return rat_from_string(s); }

}  // namespace

Instance bench_instance(const BenchConfig& cfg, int size, int index, uint64_t* seed_out) {
    uint64_t seed = cfg.seed0 * 1000003ull + (uint64_t)size * 1009ull + (uint64_t)index;
    if (seed_out) *seed_out = seed;
    // per-cell deterministic draws for edge factor and population
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    double u = (double)(rng() >> 11) / 9007199254740992.0;
    double ef = cfg.ef_min + u * (cfg.ef_max - cfg.ef_min);
    long long span = cfg.pop_max - cfg.pop_min + 1;
    long long pop = cfg.pop_min + (long long)(rng() % (uint64_t)span);

    GenParams gp;
    gp.n_vertices = size;
    gp.edge_factor = ef;
    gp.n_exits = cfg.n_exits;
    gp.population = pop;
    gp.deadline = 1;  // provisional; set from the graph below
    gp.seed = seed;
    gp.d_min = cfg.d_min;
    gp.d_max = cfg.d_max;
    Instance inst = generate_instance(gp);
    long long dist = max_exit_distance(inst.graph);
    int deadline = (int)(dist + std::max<long long>(2, (long long)std::ceil(
                                                           cfg.deadline_slack * (double)pop)));
    inst.deadline = deadline;
    inst.t_max = (int)std::ceil(cfg.t_max_factor * deadline);
    inst.behavior = bench_behavior(cfg.behavior);
    inst.check();
    return inst;
}

std::vector<BenchRecord> run_bench(const BenchConfig& cfg, bool verbose) {
    std::vector<BenchRecord> out;
    for (int size : cfg.sizes) {
        for (int i = 0; i < cfg.per_size; ++i) {
            uint64_t seed = 0;
            Instance inst;
            BenchRecord base;
            try {
                inst = bench_instance(cfg, size, i, &seed);
            } catch (const std::exception& e) {
                base.instance_id = "n" + std::to_string(size) + "_i" + std::to_string(i);
                base.method = "gen";
                base.status = std::string("error:") + e.what();
                out.push_back(base);
                continue;
            }
            base.instance_id = "n" + std::to_string(size) + "_i" + std::to_string(i);
            base.seed = seed;
            base.nodes = inst.graph.n_vertices();
            base.edges = inst.graph.n_edges();
            base.exits = (int)inst.graph.exits().size();
            base.people = inst.n_people();
            base.deadline = inst.deadline;
            base.t_max = inst.t_max;
            base.behavior = cfg.behavior;

            if (verbose)
                std::cerr << "[bench] " << base.instance_id << " nodes=" << base.nodes
                          << " people=" << base.people << " D=" << base.deadline
                          << " T=" << base.t_max << "\n";

            BenchRecord ip = base;
            ip.method = "bbip";
            std::optional<Rat> proven;
            {
                auto t0 = Clock::now();
                try {
                    IlpModel model = build_ip(inst, inst.deadline, inst.t_max);
                    SolveLimits lim;
                    lim.time_limit_seconds = cfg.cutoff_seconds;
                    SolveStatus st = solve_mip(model, lim);
                    ip.wall_seconds =
                        std::chrono::duration<double>(Clock::now() - t0).count();
                    if (st.optimal()) {
                        ip.status = "optimal";
                        proven = st.objective;
                        ip.expected_value = rat_to_string(*st.objective);
                        Extraction ex = extract(model, st.assignment, inst);
                        ip.evacuated_at_d =
                            count_evacuated(ex.ses, inst.graph, inst.deadline);
                        if (!ex.strong.ok) ip.notes = "extract:" + ex.strong.message;
                    } else if (st.status == SolveStatus::Kind::Infeasible) {
                        ip.status = "infeasible";
                    } else {
                        // the advantage rule: count the cutoff as the run time
                        // and assume a full evacuation
                        ip.status = "cutoff_assumed_full";
                        ip.wall_seconds = cfg.cutoff_seconds;
                        ip.expected_value = rat_to_string(Rat(inst.n_people()));
                    }
                } catch (const std::exception& e) {
                    ip.wall_seconds =
                        std::chrono::duration<double>(Clock::now() - t0).count();
                    ip.status = std::string("error:") + e.what();
                }
            }
            out.push_back(ip);

            BenchRecord ev = base;
            ev.method = "bbevac";
            {
                auto t0 = Clock::now();
                try {
                    BbEvacOptions bo;
                    bo.gamma = rat_from_double(cfg.gamma);
                    bo.subproblem_time_limit = cfg.sub_limit_seconds;
                    bo.global_time_limit = cfg.cutoff_seconds;
                    BbEvacResult res = bb_evac(inst, inst.deadline, bo);
                    ev.wall_seconds =
                        std::chrono::duration<double>(Clock::now() - t0).count();
                    ev.status = "done";
                    NearestExitTable net = nearest_exit_table(inst.graph);
                    (void)net;
                    auto realized = realize(*inst.behavior, res.es, inst.graph, inst.s0);
                    Rat expected = expected_evacuated(realized, inst.graph, inst.deadline);
                    ev.expected_value = rat_to_string(expected);
                    ev.evacuated_at_d = count_evacuated(res.es, inst.graph, inst.deadline);
                    if (!res.strong.ok) ev.notes = "weak_only:" + res.strong.message;
                    if (proven && *proven > 0)
                        ev.quality_ratio = rat_to_string(expected / *proven);
                    else if (proven)
                        ev.quality_ratio = expected == 0 ? "1" : "";
                } catch (const std::exception& e) {
                    ev.wall_seconds =
                        std::chrono::duration<double>(Clock::now() - t0).count();
                    ev.status = std::string("error:") + e.what();
                }
            }
            out.push_back(ev);
        }
    }
    return out;
}

std::string bench_csv_header() {
    return "instance_id,seed,nodes,edges,exits,people,deadline,t_max,behavior,method,"
           "status,wall_seconds,expected_value,evacuated_at_d,quality_ratio,notes";
}

std::string bench_csv_row(const BenchRecord& r) {
    std::ostringstream s;
    auto quote = [](const std::string& v) {
        if (v.find_first_of(",\"\n") == std::string::npos) return v;
        std::string out = "\"";
        for (char c : v) {
            if (c == '"') out += '"';
            out += c;
        }
        return out + "\"";
    };
    s << r.instance_id << ',' << r.seed << ',' << r.nodes << ',' << r.edges << ','
      << r.exits << ',' << r.people << ',' << r.deadline << ',' << r.t_max << ','
      << r.behavior << ',' << r.method << ',' << quote(r.status) << ',' << r.wall_seconds
      << ',' << r.expected_value << ',' << r.evacuated_at_d << ',' << r.quality_ratio
      << ',' << quote(r.notes);
    return s.str();
}

namespace {

int cmd_validate(const std::string& inst_path, const std::string& sched_path, bool weak_only) {
    Instance inst = load_instance(inst_path);
    Schedule es = load_schedule(sched_path, inst.graph, inst.person_names);
    if (es.horizon != inst.t_max)
        throw GraphError("schedule horizon " + std::to_string(es.horizon) +
                         " does not match instance t_max " + std::to_string(inst.t_max));
    ValidationReport weak = validate_weak(es, inst.graph);
    std::cout << "weak: " << (weak.ok ? "pass" : "fail (" + weak.message + ")") << "\n";
    if (weak_only) return weak.ok ? 0 : 4;
    ValidationReport strong = validate_strong(es, inst.graph);
    std::cout << "strong: " << (strong.ok ? "pass" : "fail (" + strong.message + ")")
              << "\n";
    return strong.ok ? 0 : 4;
}

BehaviorSpec behavior_or_default(const Instance& inst) {
    if (inst.behavior) return *inst.behavior;
    // a point-mass delayed model: everyone follows the prescription
    return BehaviorSpec::dbm({{0, Rat(1)}});
}

int cmd_plan_ip(const std::string& inst_path, int deadline, int t_max_arg, bool soft,
                double time_limit, const std::string& out_path,
                const std::string& solution_in, const std::string& model_report) {
    Instance inst = load_instance(inst_path);
    inst.behavior = behavior_or_default(inst);
    int D = deadline >= 0 ? deadline : inst.deadline;
    int T = t_max_arg > 0 ? t_max_arg : inst.t_max;
    if (T != inst.t_max) inst.t_max = T;
    BuildOptions bo;
    bo.soft = soft;
    IlpModel model = build_ip(inst, D, T, bo);

    std::vector<Rat> assignment;
    Rat solver_obj;
    if (!solution_in.empty()) {
        std::ifstream in(solution_in);
        if (!in) throw GraphError("cannot open solution file '" + solution_in + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        assignment = import_solution(ss.str(), model);
        if (auto bad = check_assignment(model, assignment, true))
            throw GraphError("imported solution infeasible: " + *bad);
        solver_obj = 0;
        for (const LinTerm& t : model.objective) solver_obj += t.coef * assignment[t.var];
    } else {
        SolveLimits lim = default_limits();
        if (time_limit > 0) lim.time_limit_seconds = time_limit;
        SolveStatus st = solve_mip(model, lim);
        if (st.status == SolveStatus::Kind::Infeasible) {
            std::cout << "status: infeasible\n";
            return 5;
        }
        if (!st.has_incumbent) {
            std::cout << "status: time_limit_reached (no incumbent)\n";
            return 5;
        }
        std::cout << "status: "
                  << (st.optimal() ? "optimal" : "time_limit_reached (incumbent)") << "\n";
        std::cout << "nodes: " << st.nodes << "\n";
        assignment = st.assignment;
        solver_obj = *st.objective;
    }
    Extraction ex = extract(model, assignment, inst);
    if (ex.objective != solver_obj)
        throw std::logic_error("objective mismatch: solver " + rat_to_string(solver_obj) +
                               " vs recomputed " + rat_to_string(ex.objective));
    std::cout << "expected_evacuated_by_" << D << ": " << rat_to_string(ex.objective)
              << "\n";
    std::cout << "schedule_evacuated_by_" << D << ": "
              << count_evacuated(ex.ses, inst.graph, D) << "\n";
    std::cout << "strong: " << (ex.strong.ok ? "pass" : "fail (" + ex.strong.message + ")")
              << "\n";
    if (!out_path.empty())
        save_schedule(ex.ses, inst.graph, inst.person_names, out_path);
    if (!model_report.empty()) {
        std::ofstream rep(model_report);
        rep << "vars " << model.n_vars() << "\nrows " << model.rows.size() << "\n";
    }
    if (!ex.strong.ok && !soft) return 5;
    return 0;
}

int cmd_plan_evac(const std::string& inst_path, int deadline, const std::string& gamma_s,
                  double sub_limit, double time_limit, const std::string& out_path,
                  const std::string& report_path) {
    Instance inst = load_instance(inst_path);
    inst.behavior = behavior_or_default(inst);
    int D = deadline >= 0 ? deadline : inst.deadline;
    BbEvacOptions bo;
    bo.gamma = parse_rat_arg(gamma_s);
    bo.subproblem_time_limit = sub_limit;
    if (time_limit > 0) bo.global_time_limit = time_limit;
    BbEvacResult res = bb_evac(inst, D, bo);

    auto realized = realize(*inst.behavior, res.es, inst.graph, inst.s0);
    Rat expected = expected_evacuated(realized, inst.graph, D);
    std::cout << "expected_evacuated_by_" << D << ": " << rat_to_string(expected) << "\n";
    std::cout << "schedule_evacuated_by_" << D << ": "
              << count_evacuated(res.es, inst.graph, D) << "\n";
    std::cout << "strong: "
              << (res.strong.ok ? "pass" : "fail (" + res.strong.message + ")") << "\n";
    std::cout << "subproblems: " << res.subproblems.size() << "\n";
    std::ostringstream rep;
    rep << "exit,kappa,entries,time_used_before,sub_deadline,objective,epsilon,"
           "soft_retry,timed_out,deltas,stranded\n";
    for (const SubReport& s : res.subproblems) {
        rep << inst.graph.vertex_name(s.exit_vertex) << ',' << s.kappa << ',';
        for (size_t i = 0; i < s.entry_vertices.size(); ++i)
            rep << (i ? " " : "") << inst.graph.vertex_name(s.entry_vertices[i]);
        rep << ',' << s.time_used_before << ',' << s.sub_deadline << ','
            << rat_to_string(s.objective) << ',' << s.epsilon << ',' << s.soft_retry << ','
            << s.timed_out << ',';
        for (size_t i = 0; i < s.deltas.size(); ++i)
            rep << (i ? " " : "") << inst.person_names[s.deltas[i].first] << ':'
                << s.deltas[i].second;
        rep << ',';
        for (size_t i = 0; i < s.stranded.size(); ++i)
            rep << (i ? " " : "") << inst.person_names[s.stranded[i]];
        rep << "\n";
    }
    if (!report_path.empty()) {
        std::ofstream f(report_path);
        f << rep.str();
    } else {
        std::cout << rep.str();
    }
    if (!out_path.empty()) save_schedule(res.es, inst.graph, inst.person_names, out_path);
    return 0;
}

int cmd_realize(const std::string& inst_path, const std::string& sched_path, int deadline,
                const std::string& out_prefix) {
    Instance inst = load_instance(inst_path);
    inst.behavior = behavior_or_default(inst);
    Schedule ses = load_schedule(sched_path, inst.graph, inst.person_names);
    int D = deadline >= 0 ? deadline : inst.deadline;
    auto realized = realize(*inst.behavior, ses, inst.graph, inst.s0);
    Rat expected = expected_evacuated(realized, inst.graph, D);
    for (size_t i = 0; i < realized.size(); ++i) {
        std::cout << "realization " << i << ": prob " << rat_to_string(realized[i].second)
                  << ", evacuated_by_" << D << " "
                  << count_evacuated(realized[i].first, inst.graph, D) << "\n";
        if (!out_prefix.empty())
            save_schedule(realized[i].first, inst.graph, inst.person_names,
                          out_prefix + std::to_string(i) + ".json");
    }
    std::cout << "expected_evacuated_by_" << D << ": " << rat_to_string(expected) << "\n";
    return 0;
}

int cmd_gen(int nodes, double ef, int exits, long long people, int deadline, uint64_t seed,
            int d_min, int d_max, const std::string& out_path) {
    GenParams gp;
    gp.n_vertices = nodes;
    gp.edge_factor = ef;
    gp.n_exits = exits;
    gp.population = people;
    gp.deadline = deadline;
    gp.seed = seed;
    gp.d_min = d_min;
    gp.d_max = d_max;
    Instance inst = generate_instance(gp);
    if (out_path.empty())
        std::cout << instance_to_json(inst);
    else
        save_instance(inst, out_path);
    std::cerr << "generated " << inst.graph.n_vertices() << " vertices, "
              << inst.graph.n_edges() << " edges, " << inst.n_people() << " people\n";
    return 0;
}

int cmd_export_lp(const std::string& inst_path, int deadline, int t_max_arg, bool soft,
                  const std::string& out_path) {
    Instance inst = load_instance(inst_path);
    inst.behavior = behavior_or_default(inst);
    int D = deadline >= 0 ? deadline : inst.deadline;
    int T = t_max_arg > 0 ? t_max_arg : inst.t_max;
    BuildOptions bo;
    bo.soft = soft;
    IlpModel model = build_ip(inst, D, T, bo);
    std::string text = export_mps(model);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out_path);
        f << text;
    }
    return 0;
}

int cmd_bench(const BenchConfig& cfg, const std::string& out_path, bool verbose) {
    std::vector<BenchRecord> rows = run_bench(cfg, verbose);
    std::ostringstream csv;
    csv << bench_csv_header() << "\n";
    bool all_ok = true;
    for (const BenchRecord& r : rows) {
        csv << bench_csv_row(r) << "\n";
        if (r.status.rfind("error:", 0) == 0) all_ok = false;
    }
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream f(out_path);
        f << csv.str();
        std::cerr << "wrote " << rows.size() << " records to " << out_path << "\n";
    }
    return all_ok ? 0 : 5;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"behavior-based building evacuation planner"};
    app.require_subcommand(1);

    std::string inst_path, sched_path, out_path, report_path, solution_in, out_prefix;
    int deadline = -1, t_max = 0;
    bool soft = false, weak_only = false, verbose = false;
    double time_limit = 0, sub_limit = 0;
    std::string gamma = "0.25";

    auto* v = app.add_subcommand("validate", "check a schedule against an instance");
    v->add_option("instance", inst_path)->required();
    v->add_option("schedule", sched_path)->required();
    v->add_flag("--weak-only", weak_only, "stop after the movement-legality check");

    auto* pip = app.add_subcommand("plan-ip", "optimal schedule via the exact program");
    pip->add_option("instance", inst_path)->required();
    pip->add_option("--deadline,-D", deadline)->envname("EVAC_DEADLINE");
    pip->add_option("--t-max", t_max)->envname("EVAC_T_MAX");
    pip->add_flag("--soft", soft, "drop the everyone-out-by-horizon constraint");
    pip->add_option("--time-limit", time_limit)->envname("EVAC_TIME_LIMIT");
    pip->add_option("--out", out_path, "write the schedule here");
    pip->add_option("--solution-in", solution_in,
                    "ingest an external solver's 'name value' solution instead of solving");
    pip->add_option("--model-report", report_path);

    auto* pev = app.add_subcommand("plan-evac", "fast schedule via exit-graph peeling");
    pev->add_option("instance", inst_path)->required();
    pev->add_option("--deadline,-D", deadline)->envname("EVAC_DEADLINE");
    pev->add_option("--gamma", gamma)->envname("EVAC_GAMMA");
    pev->add_option("--sub-time-limit", sub_limit)->envname("EVAC_SUB_TIME_LIMIT");
    pev->add_option("--time-limit", time_limit)->envname("EVAC_TIME_LIMIT");
    pev->add_option("--out", out_path);
    pev->add_option("--report", report_path, "per-subgraph CSV report path");

    auto* rl = app.add_subcommand("realize", "expand the behavior model over a schedule");
    rl->add_option("instance", inst_path)->required();
    rl->add_option("schedule", sched_path)->required();
    rl->add_option("--deadline,-D", deadline);
    rl->add_option("--out-prefix", out_prefix);

    int g_nodes = 20, g_exits = 2, g_deadline = 10, g_dmin = 1, g_dmax = 5;
    double g_ef = 1.5;
    long long g_people = 20;
    uint64_t g_seed = 0;
    auto* gn = app.add_subcommand("gen", "generate a synthetic instance");
    gn->add_option("--nodes", g_nodes)->required()->envname("EVAC_GEN_NODES");
    gn->add_option("--edge-factor", g_ef)->envname("EVAC_GEN_EDGE_FACTOR");
    gn->add_option("--exits", g_exits)->envname("EVAC_GEN_EXITS");
    gn->add_option("--people", g_people)->envname("EVAC_GEN_PEOPLE");
    gn->add_option("--deadline", g_deadline)->envname("EVAC_GEN_DEADLINE");
    gn->add_option("--seed", g_seed)->envname("EVAC_GEN_SEED");
    gn->add_option("--d-min", g_dmin);
    gn->add_option("--d-max", g_dmax);
    gn->add_option("--out", out_path);

    auto* ex = app.add_subcommand("export-lp", "write the program in fixed MPS format");
    ex->add_option("instance", inst_path)->required();
    ex->add_option("--deadline,-D", deadline);
    ex->add_option("--t-max", t_max);
    ex->add_flag("--soft", soft);
    ex->add_option("--out", out_path);

    BenchConfig cfg;
    std::string bench_out;
    std::string sizes_arg;
    auto* bn = app.add_subcommand("bench", "experiment matrix: bbip vs bbevac");
    bn->add_option("--sizes", sizes_arg, "comma-separated node counts")
        ->envname("EVAC_BENCH_SIZES");
    bn->add_option("--per-size", cfg.per_size)->envname("EVAC_BENCH_PER_SIZE");
    bn->add_option("--pop-min", cfg.pop_min);
    bn->add_option("--pop-max", cfg.pop_max);
    bn->add_option("--exits", cfg.n_exits);
    bn->add_option("--d-max", cfg.d_max);
    bn->add_option("--cutoff", cfg.cutoff_seconds)->envname("EVAC_BENCH_CUTOFF");
    bn->add_option("--sub-limit", cfg.sub_limit_seconds);
    bn->add_option("--gamma", cfg.gamma);
    bn->add_option("--behavior", cfg.behavior);
    bn->add_option("--seed", cfg.seed0)->envname("EVAC_BENCH_SEED");
    bn->add_option("--deadline-slack", cfg.deadline_slack);
    bn->add_option("--t-max-factor", cfg.t_max_factor);
    bn->add_option("--out", bench_out)->envname("EVAC_BENCH_OUT");
    bn->add_flag("--verbose", verbose);

    std::vector<const char*> argv;
    argv.push_back("evac");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse((int)argv.size(), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(v)) return cmd_validate(inst_path, sched_path, weak_only);
        if (app.got_subcommand(pip))
            return cmd_plan_ip(inst_path, deadline, t_max, soft, time_limit, out_path,
                               solution_in, report_path);
        if (app.got_subcommand(pev))
            return cmd_plan_evac(inst_path, deadline, gamma, sub_limit, time_limit,
                                 out_path, report_path);
        if (app.got_subcommand(rl))
            return cmd_realize(inst_path, sched_path, deadline, out_prefix);
        if (app.got_subcommand(gn))
            return cmd_gen(g_nodes, g_ef, g_exits, g_people, g_deadline, g_seed, g_dmin,
                           g_dmax, out_path);
        if (app.got_subcommand(ex))
            return cmd_export_lp(inst_path, deadline, t_max, soft, out_path);
        if (app.got_subcommand(bn)) {
            if (!sizes_arg.empty()) {
                cfg.sizes.clear();
                std::stringstream ss(sizes_arg);
                std::string tok;
                while (std::getline(ss, tok, ',')) cfg.sizes.push_back(std::stoi(tok));
            }
            return cmd_bench(cfg, bench_out, verbose);
        }
    } catch (const GraphError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 6;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 6;
    }
    return 2;
}

}  // namespace evac
