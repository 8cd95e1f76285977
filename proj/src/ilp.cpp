#include "evac/ilp.hpp"

#include <algorithm>
#include <cstdio>

namespace evac {

std::string IlpModel::var_name(int v) const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "X%07d", v);
    return buf;
}

std::string IlpModel::row_name(int r) const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "R%07d", r);
    return buf;
}

std::optional<int> IlpModel::var_by_name(const std::string& name) const {
    if (name.size() != 8 || name[0] != 'X') return std::nullopt;
    int idx = 0;
    for (size_t i = 1; i < name.size(); ++i) {
        if (name[i] < '0' || name[i] > '9') return std::nullopt;
        idx = idx * 10 + (name[i] - '0');
    }
    if (idx < 0 || idx >= n_vars()) return std::nullopt;
    return idx;
}

namespace {

CopyLayout make_copy(IlpModel& model, const ExpandedGraph& xg, int T) {
    const BuildingGraph& g = *xg.base;
    CopyLayout L;
    L.base = model.n_vars();
    L.n_v = g.n_vertices();
    L.n_e = g.n_edges();
    L.T = T;
    // occupancies: nonnegative integers
    for (int i = 0; i < L.occ_count(); ++i)
        model.add_var({true, Rat(0), std::nullopt});
    // net flows: free integers
    for (int i = 0; i < 4 * L.n_e * T; ++i)
        model.add_var({true, std::nullopt, std::nullopt});
    // gross direction pairs: nonnegative integers
    for (int i = 0; i < 8 * L.n_e * T; ++i)
        model.add_var({true, Rat(0), std::nullopt});
    return L;
}

}  // namespace

void build_lpw(IlpModel& model, const CopyLayout& L, const ExpandedGraph& xg) {
    const BuildingGraph& g = *xg.base;
    int T = L.T;
    // (1) vertex conservation
    for (int v = 0; v < g.n_vertices(); ++v) {
        for (int t = 0; t < T; ++t) {
            LinRow row;
            row.tag = TagConserveV;
            row.terms.push_back({L.vert(v, t + 1), Rat(1)});
            row.terms.push_back({L.vert(v, t), Rat(-1)});
            for (auto [w, e] : g.adjacent(v)) {
                (void)w;
                if (g.edge(e).u == v) {
                    row.terms.push_back({L.f_ve(e, t), Rat(1)});
                    row.terms.push_back({L.f_vw(e, t), Rat(1)});
                } else {
                    row.terms.push_back({L.f_ew(e, t), Rat(-1)});
                    row.terms.push_back({L.f_vw(e, t), Rat(-1)});
                }
            }
            model.add_row(std::move(row));
        }
    }
    // (2) e' conservation
    for (int e = 0; e < g.n_edges(); ++e)
        for (int t = 0; t < T; ++t) {
            LinRow row;
            row.tag = TagConserveEp;
            row.terms.push_back({L.ep(e, t + 1), Rat(1)});
            row.terms.push_back({L.ep(e, t), Rat(-1)});
            row.terms.push_back({L.f_e(e, t), Rat(1)});
            row.terms.push_back({L.f_ve(e, t), Rat(-1)});
            model.add_row(std::move(row));
        }
    // (3) e'' conservation with the d(e)-2 lag
    for (int e = 0; e < g.n_edges(); ++e) {
        int d = g.edge(e).travel_time;
        for (int t = std::max(0, d - 2); t < T; ++t) {
            LinRow row;
            row.tag = TagConserveEpp;
            row.terms.push_back({L.epp(e, t + 1), Rat(1)});
            row.terms.push_back({L.epp(e, t), Rat(-1)});
            row.terms.push_back({L.f_ew(e, t), Rat(1)});
            int lag = t - d + 2;
            if (lag >= 0 && lag < T) row.terms.push_back({L.f_e(e, lag), Rat(-1)});
            model.add_row(std::move(row));
        }
    }
    // (4) no direct vertex hop on slow edges; (5) no virtual transit on fast ones
    for (int e = 0; e < g.n_edges(); ++e) {
        int d = g.edge(e).travel_time;
        for (int t = 0; t < T; ++t) {
            if (d > 1)
                model.add_row({{{L.f_vw(e, t), Rat(1)}}, Rel::Eq, Rat(0), TagPinVw});
            else
                model.add_row({{{L.f_e(e, t), Rat(1)}}, Rel::Eq, Rat(0), TagPinE});
        }
    }
    // (6) exits are absorbing (adjacent-tick chain)
    for (int v : g.exits())
        for (int t = 0; t < T; ++t)
            model.add_row({{{L.vert(v, t + 1), Rat(1)}, {L.vert(v, t), Rat(-1)}},
                           Rel::Ge,
                           Rat(0),
                           TagExitMono});

    // net flows split into their gross direction parts
    auto net_var = [&](int e, int kind, int t) {
        switch (kind) {
            case 0: return L.f_vw(e, t);
            case 1: return L.f_ve(e, t);
            case 2: return L.f_e(e, t);
            default: return L.f_ew(e, t);
        }
    };
    for (int e = 0; e < g.n_edges(); ++e)
        for (int kind = 0; kind < 4; ++kind)
            for (int t = 0; t < T; ++t)
                model.add_row({{{net_var(e, kind, t), Rat(1)},
                                {L.gross(e, kind, 0, t), Rat(-1)},
                                {L.gross(e, kind, 1, t), Rat(1)}},
                               Rel::Eq,
                               Rat(0),
                               TagFlowSplit});

    // gross departures need presence: at vertices strictly (people must be
    // counted where they stood when they left), at virtual nodes departures
    // may also consume units arriving the same instant (the legal compound
    // moves at exactly the travel-time bound)
    for (int v = 0; v < g.n_vertices(); ++v) {
        for (int t = 0; t < T; ++t) {
            LinRow row;
            row.tag = TagDwell;
            row.rel = Rel::Ge;
            row.rhs = Rat(0);
            row.terms.push_back({L.vert(v, t), Rat(1)});
            for (auto [w, e] : g.adjacent(v)) {
                (void)w;
                if (g.edge(e).u == v) {
                    row.terms.push_back({L.gross(e, 0, 0, t), Rat(-1)});  // hop out
                    row.terms.push_back({L.gross(e, 1, 0, t), Rat(-1)});  // onto e'
                } else {
                    row.terms.push_back({L.gross(e, 0, 1, t), Rat(-1)});
                    row.terms.push_back({L.gross(e, 3, 1, t), Rat(-1)});  // onto e''
                }
            }
            model.add_row(std::move(row));
        }
    }
    for (int e = 0; e < g.n_edges(); ++e) {
        int d = g.edge(e).travel_time;
        if (d == 1) continue;
        for (int t = 0; t < T; ++t) {
            // e' departures: onward commits and returns to the tail
            model.add_row({{{L.ep(e, t), Rat(1)},
                            {L.gross(e, 2, 1, t), Rat(1)},   // arriving back from e''
                            {L.gross(e, 2, 0, t), Rat(-1)},
                            {L.gross(e, 1, 1, t), Rat(-1)}},
                           Rel::Ge,
                           Rat(0),
                           TagDwell});
            // e'' departures: exits to the head and reverse commits; only
            // onward units landing this very instant may pass through
            LinRow row;
            row.tag = TagDwell;
            row.rel = Rel::Ge;
            row.rhs = Rat(0);
            row.terms.push_back({L.epp(e, t), Rat(1)});
            int lag = t - d + 2;
            if (lag >= 0 && lag < T)
                row.terms.push_back({L.gross(e, 2, 0, lag), Rat(1)});  // landing now
            row.terms.push_back({L.gross(e, 3, 0, t), Rat(-1)});
            row.terms.push_back({L.gross(e, 2, 1, t), Rat(-1)});
            model.add_row(std::move(row));
        }
    }

    // travel-time-1 edges keep their virtual legs empty; slow edges never
    // carry direct hops
    for (int e = 0; e < g.n_edges(); ++e) {
        int d = g.edge(e).travel_time;
        for (int t = 0; t <= T; ++t) {
            if (d != 1) continue;
            model.add_row({{{L.ep(e, t), Rat(1)}}, Rel::Eq, Rat(0), TagPinInert});
            model.add_row({{{L.epp(e, t), Rat(1)}}, Rel::Eq, Rat(0), TagPinInert});
        }
        for (int t = 0; t < T; ++t) {
            std::vector<int> dead;
            if (d == 1) {
                dead = {L.f_ve(e, t), L.f_ew(e, t), L.gross(e, 1, 0, t),
                        L.gross(e, 1, 1, t), L.gross(e, 2, 0, t), L.gross(e, 2, 1, t),
                        L.gross(e, 3, 0, t), L.gross(e, 3, 1, t)};
            } else {
                dead = {L.gross(e, 0, 0, t), L.gross(e, 0, 1, t)};
            }
            for (int var : dead)
                model.add_row({{{var, Rat(1)}}, Rel::Eq, Rat(0), TagPinInert});
        }
    }
    // exits are absorbing: no gross departures out of them (the leg not
    // already pinned inert for this travel time)
    for (int v : g.exits()) {
        for (auto [w, e] : g.adjacent(v)) {
            (void)w;
            int d = g.edge(e).travel_time;
            bool tail = g.edge(e).u == v;
            int kind = d == 1 ? 0 : (tail ? 1 : 3);
            int dir = tail ? 0 : 1;
            for (int t = 0; t < T; ++t)
                model.add_row(
                    {{{L.gross(e, kind, dir, t), Rat(1)}}, Rel::Eq, Rat(0), TagPinExit});
        }
    }
}

namespace {

void add_capacity_constraints(IlpModel& model, const CopyLayout& L, const ExpandedGraph& xg) {
    const BuildingGraph& g = *xg.base;
    // (9) vertex capacity as variable bounds
    for (int v = 0; v < g.n_vertices(); ++v)
        for (int t = 0; t <= L.T; ++t)
            model.vars[L.vert(v, t)].ub = Rat(g.vertex_capacity(v));
    // (10) edge capacity over the virtual pair
    for (int e = 0; e < g.n_edges(); ++e)
        for (int t = 0; t <= L.T; ++t)
            model.add_row({{{L.ep(e, t), Rat(1)}, {L.epp(e, t), Rat(1)}},
                           Rel::Le,
                           Rat(g.edge(e).capacity),
                           TagCapEdge});
    // net hop traffic of travel-time-1 edges stays within capacity (the
    // virtual pair of such edges is pinned empty, so (10) cannot see it)
    for (int e = 0; e < g.n_edges(); ++e) {
        if (g.edge(e).travel_time != 1) continue;
        for (int t = 0; t < L.T; ++t) {
            model.add_row({{{L.f_vw(e, t), Rat(1)}},
                           Rel::Le,
                           Rat(g.edge(e).capacity),
                           TagCapHop});
            model.add_row({{{L.f_vw(e, t), Rat(1)}},
                           Rel::Ge,
                           Rat(-g.edge(e).capacity),
                           TagCapHop});
        }
    }
    // everyone using the edge between two ticks counts against its capacity:
    // occupants at the earlier tick plus units stepping onto it, plus the
    // uncounted interior of long edges
    for (int e = 0; e < g.n_edges(); ++e) {
        int d = g.edge(e).travel_time;
        if (d == 1) continue;
        for (int t = 0; t < L.T; ++t) {
            LinRow row;
            row.tag = TagCapInterval;
            row.rel = Rel::Le;
            row.rhs = Rat(g.edge(e).capacity);
            row.terms.push_back({L.ep(e, t), Rat(1)});
            row.terms.push_back({L.epp(e, t), Rat(1)});
            row.terms.push_back({L.gross(e, 1, 0, t), Rat(1)});
            row.terms.push_back({L.gross(e, 3, 1, t), Rat(1)});
            for (int s = std::max(0, t - d + 3); s <= t - 1; ++s)
                row.terms.push_back({L.gross(e, 2, 0, s), Rat(1)});
            model.add_row(std::move(row));
        }
    }
}

void add_evacuation_row(IlpModel& model, const CopyLayout& L, const ExpandedGraph& xg,
                        long long population) {
    LinRow row;
    row.tag = TagEvacAll;
    row.rel = Rel::Ge;
    row.rhs = Rat(population);
    for (int v : xg.base->exits()) row.terms.push_back({L.vert(v, L.T), Rat(1)});
    model.add_row(std::move(row));
}

}  // namespace

void build_lps(IlpModel& model, const CopyLayout& L, const ExpandedGraph& xg,
               long long population) {
    add_capacity_constraints(model, L, xg);
    add_evacuation_row(model, L, xg, population);
}

namespace {

// Initial state with edge residents attributed to the endpoint nearer an exit.
State ip_initial_state(const Instance& inst, const NearestExitTable& table) {
    State s;
    s.at = inst.s0.at;
    for (Loc& l : s.at) {
        if (l.is_vertex()) continue;
        const EdgeRec& er = inst.graph.edge(l.id);
        auto dist = [&](int v) -> std::optional<long long> {
            if (table.rows[v].exit < 0) return std::nullopt;
            return table.rows[v].prefix_time.back();
        };
        auto du = dist(er.u), dv = dist(er.v);
        int target = er.u;
        if (!du && dv) target = er.v;
        else if (du && dv && (*dv < *du || (*dv == *du && er.v < er.u))) target = er.v;
        else if (!du && !dv) target = std::min(er.u, er.v);
        l = Loc::vertex(target);
    }
    return s;
}

}  // namespace

IlpModel build_ip(const Instance& inst, int deadline, int t_max, BuildOptions opts) {
    if (deadline > t_max) throw std::invalid_argument("deadline exceeds t_max");
    if (deadline < 0) throw std::invalid_argument("negative deadline");
    if (!inst.behavior) throw std::invalid_argument("behavior spec empty");
    const BuildingGraph& g = inst.graph;
    ExpandedGraph xg = expand(g);
    NearestExitTable net = nearest_exit_table(g);
    State s0 = ip_initial_state(inst, net);
    long long population = inst.n_people();

    IlpModel model;
    model.deadline = deadline;
    model.t_max = t_max;
    model.soft = opts.soft;

    model.x = make_copy(model, xg, t_max);
    build_lpw(model, model.x, xg);
    add_capacity_constraints(model, model.x, xg);
    if (!opts.soft) add_evacuation_row(model, model.x, xg, population);

    // pin the initial state
    std::vector<long long> at0(g.n_vertices(), 0);
    for (const Loc& l : s0.at) ++at0[l.id];
    for (int v = 0; v < g.n_vertices(); ++v)
        model.add_row({{{model.x.vert(v, 0), Rat(1)}}, Rel::Eq, Rat(at0[v]), TagPinInit});
    // virtual nodes start empty and stay empty until reachable
    for (int e = 0; e < g.n_edges(); ++e) {
        int d = g.edge(e).travel_time;
        if (d == 1) continue;  // already pinned inert by build_lpw for d=1
        model.add_row({{{model.x.ep(e, 0), Rat(1)}}, Rel::Eq, Rat(0), TagPinVirt0});
        for (int t = 0; t <= std::min(d - 2, t_max); ++t)
            model.add_row({{{model.x.epp(e, t), Rat(1)}}, Rel::Eq, Rat(0), TagPinVirt0});
    }

    // substitution plan for the solver: pinned X variables and the X net
    // flows behind their gross pairs
    {
        std::vector<bool> defined(model.n_vars(), false);
        for (const LinRow& row : model.rows) {
            bool pin = row.tag == TagPinVw || row.tag == TagPinE ||
                       row.tag == TagPinInert || row.tag == TagPinExit ||
                       row.tag == TagPinInit || row.tag == TagPinVirt0;
            if (!pin || row.terms.size() != 1) continue;
            int var = row.terms[0].var;
            if (defined[var]) continue;
            defined[var] = true;
            model.definitions.push_back({var, {}, row.rhs / row.terms[0].coef});
        }
        for (const LinRow& row : model.rows) {
            if (row.tag != TagFlowSplit) continue;
            int var = row.terms[0].var;
            if (defined[var]) continue;
            defined[var] = true;
            IlpModel::Definition def;
            def.var = var;
            def.terms.push_back({row.terms[1].var, Rat(1)});
            def.terms.push_back({row.terms[2].var, Rat(-1)});
            def.constant = 0;
            model.definitions.push_back(std::move(def));
        }
    }

    // behavior copies
    std::vector<ConstraintBlock> blocks = emit_constraints(*inst.behavior, xg, t_max);
    if (inst.behavior->kind == BehaviorSpec::Kind::Dbm) {
        for (const auto& d : inst.behavior->delays)
            model.y_flow_rules.push_back({d.tau, false, {}});
    } else {
        model.y_flow_rules.push_back({0, false, {}});
        Schedule rushed = nearest_exit_wes(s0, g, t_max);
        IlpModel::CopyFlowRule rule;
        rule.use_const = true;
        rule.const_flows = occupancy_of(rushed, xg);
        model.y_flow_rules.push_back(std::move(rule));
    }
    for (const ConstraintBlock& block : blocks) {
        int row_begin = (int)model.rows.size();
        CopyLayout L = make_copy(model, xg, t_max);
        model.y.push_back(L);
        build_lpw(model, L, xg);
        for (const auto& [node, expr] : block.defs) {
            LinRow row;
            row.tag = TagBehavior;
            row.rel = Rel::Eq;
            row.terms.push_back({L.node_var(node), Rat(1)});
            IlpModel::Definition def;
            def.var = L.node_var(node);
            for (const auto& [xnode, coef] : expr.terms) {
                row.terms.push_back({model.x.node_var(xnode), -coef});
                def.terms.push_back({model.x.node_var(xnode), coef});
            }
            row.rhs = expr.constant;
            def.constant = expr.constant;
            model.add_row(std::move(row));
            model.definitions.push_back(std::move(def));
        }
        model.y_row_ranges.push_back({row_begin, (int)model.rows.size()});
    }
    // z variables bound to the copy probabilities
    {
        LinRow sum;
        sum.tag = TagZSum;
        sum.rel = Rel::Eq;
        sum.rhs = Rat(1);
        for (const ConstraintBlock& block : blocks) {
            int z = model.add_var({false, Rat(0), std::nullopt});
            model.z_vars.push_back(z);
            model.add_row({{{z, Rat(1)}}, Rel::Eq, block.z, TagBehavior});
            model.definitions.push_back({z, {}, block.z});
            sum.terms.push_back({z, Rat(1)});
        }
        model.add_row(std::move(sum));
    }

    // objective: expected number at exits by the deadline
    for (int i = 0; i < (int)blocks.size(); ++i)
        for (int v : g.exits())
            model.objective.push_back({model.y[i].vert(v, deadline), blocks[i].z});
    if (opts.tie_break_early) {
        Rat eps = Rat(1, Int(population + 1) * Int(t_max + 1) * Int(g.exits().size() + 1));
        for (int v : g.exits())
            for (int t = 0; t <= t_max; ++t)
                model.objective.push_back({model.x.vert(v, t), eps});
    }
    model.y_copies_eliminable = true;
    return model;
}

void fill_x_assignment(const IlpModel& model, const FlowOccupancy& occ,
                       std::vector<Rat>& a) {
    const CopyLayout& L = model.x;
    for (int v = 0; v < L.n_v; ++v)
        for (int t = 0; t <= L.T; ++t) a[L.vert(v, t)] = Rat(occ.vert[v][t]);
    for (int e = 0; e < L.n_e; ++e)
        for (int t = 0; t <= L.T; ++t) {
            a[L.ep(e, t)] = Rat(occ.ep[e][t]);
            a[L.epp(e, t)] = Rat(occ.epp[e][t]);
        }
    for (int e = 0; e < L.n_e; ++e)
        for (int t = 0; t < L.T; ++t) {
            a[L.f_vw(e, t)] = Rat(occ.f_vw[e][t]);
            a[L.f_ve(e, t)] = Rat(occ.f_ve[e][t]);
            a[L.f_e(e, t)] = Rat(occ.f_e[e][t]);
            a[L.f_ew(e, t)] = Rat(occ.f_ew[e][t]);
            a[L.gross(e, 0, 0, t)] = Rat(occ.g_vw_f[e][t]);
            a[L.gross(e, 0, 1, t)] = Rat(occ.g_vw_b[e][t]);
            a[L.gross(e, 1, 0, t)] = Rat(occ.g_ve_f[e][t]);
            a[L.gross(e, 1, 1, t)] = Rat(occ.g_ve_b[e][t]);
            a[L.gross(e, 2, 0, t)] = Rat(occ.g_e_f[e][t]);
            a[L.gross(e, 2, 1, t)] = Rat(occ.g_e_b[e][t]);
            a[L.gross(e, 3, 0, t)] = Rat(occ.g_ew_f[e][t]);
            a[L.gross(e, 3, 1, t)] = Rat(occ.g_ew_b[e][t]);
        }
}

std::optional<std::string> check_assignment(const IlpModel& model,
                                            const std::vector<Rat>& a,
                                            bool check_integrality) {
    for (int v = 0; v < model.n_vars(); ++v) {
        const VarInfo& info = model.vars[v];
        if (info.lb && a[v] < *info.lb)
            return model.var_name(v) + " below lower bound";
        if (info.ub && a[v] > *info.ub)
            return model.var_name(v) + " above upper bound";
        if (check_integrality && info.integral && !is_integral(a[v]))
            return model.var_name(v) + " not integral";
    }
    for (int r = 0; r < (int)model.rows.size(); ++r) {
        const LinRow& row = model.rows[r];
        Rat lhs = 0;
        for (const LinTerm& term : row.terms) lhs += term.coef * a[term.var];
        bool ok = row.rel == Rel::Eq ? lhs == row.rhs
                  : row.rel == Rel::Le ? lhs <= row.rhs
                                       : lhs >= row.rhs;
        if (!ok)
            return model.row_name(r) + " violated (tag " + std::to_string(row.tag) + ")";
    }
    return std::nullopt;
}

Extraction extract(const IlpModel& model, const std::vector<Rat>& a, const Instance& inst) {
    if ((int)a.size() != model.n_vars())
        throw std::invalid_argument("assignment size does not match the model");
    const BuildingGraph& g = inst.graph;
    ExpandedGraph xg = expand(g);
    const CopyLayout& L = model.x;
    FlowOccupancy occ;
    occ.horizon = L.T;
    occ.vert.assign(L.n_v, std::vector<long long>(L.T + 1, 0));
    occ.ep.assign(L.n_e, std::vector<long long>(L.T + 1, 0));
    occ.epp.assign(L.n_e, std::vector<long long>(L.T + 1, 0));
    occ.f_vw.assign(L.n_e, std::vector<long long>(L.T, 0));
    occ.f_ve = occ.f_vw;
    occ.f_e = occ.f_vw;
    occ.f_ew = occ.f_vw;
    occ.g_vw_f = occ.f_vw;
    occ.g_vw_b = occ.f_vw;
    occ.g_ve_f = occ.f_vw;
    occ.g_ve_b = occ.f_vw;
    occ.g_e_f = occ.f_vw;
    occ.g_e_b = occ.f_vw;
    occ.g_ew_f = occ.f_vw;
    occ.g_ew_b = occ.f_vw;
    auto to_ll = [&](int var) {
        if (!is_integral(a[var]))
            throw std::invalid_argument("fractional value for " + model.var_name(var));
        return (long long)numerator(a[var]);
    };
    for (int v = 0; v < L.n_v; ++v)
        for (int t = 0; t <= L.T; ++t) occ.vert[v][t] = to_ll(L.vert(v, t));
    for (int e = 0; e < L.n_e; ++e)
        for (int t = 0; t <= L.T; ++t) {
            occ.ep[e][t] = to_ll(L.ep(e, t));
            occ.epp[e][t] = to_ll(L.epp(e, t));
        }
    for (int e = 0; e < L.n_e; ++e)
        for (int t = 0; t < L.T; ++t) {
            occ.f_vw[e][t] = to_ll(L.f_vw(e, t));
            occ.f_ve[e][t] = to_ll(L.f_ve(e, t));
            occ.f_e[e][t] = to_ll(L.f_e(e, t));
            occ.f_ew[e][t] = to_ll(L.f_ew(e, t));
            occ.g_vw_f[e][t] = to_ll(L.gross(e, 0, 0, t));
            occ.g_vw_b[e][t] = to_ll(L.gross(e, 0, 1, t));
            occ.g_ve_f[e][t] = to_ll(L.gross(e, 1, 0, t));
            occ.g_ve_b[e][t] = to_ll(L.gross(e, 1, 1, t));
            occ.g_e_f[e][t] = to_ll(L.gross(e, 2, 0, t));
            occ.g_e_b[e][t] = to_ll(L.gross(e, 2, 1, t));
            occ.g_ew_f[e][t] = to_ll(L.gross(e, 3, 0, t));
            occ.g_ew_b[e][t] = to_ll(L.gross(e, 3, 1, t));
        }

    NearestExitTable net = nearest_exit_table(g);
    State s0 = ip_initial_state(inst, net);
    Extraction out;
    out.ses = decompose_with_flows(occ, s0, xg);
    out.strong = validate_strong(out.ses, g);
    if (!inst.behavior) throw std::invalid_argument("behavior spec empty");
    out.realized = realize(*inst.behavior, out.ses, g, s0);
    // objective recomputed from the Y exit counts at the deadline
    out.objective = 0;
    for (int i = 0; i < (int)model.y.size(); ++i) {
        Rat exit_count = 0;
        for (int v : g.exits()) exit_count += a[model.y[i].vert(v, model.deadline)];
        out.objective += inst.behavior->copy_prob(i) * exit_count;
    }
    out.expected_value = expected_evacuated(out.realized, g, model.deadline);
    return out;
}

}  // namespace evac
