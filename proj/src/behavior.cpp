#include "evac/behavior.hpp"

#include <algorithm>
#include <map>

namespace evac {

namespace {

// Tick-by-tick positions of one unit walking Pi(v_b) from `start_tick`.
// Emits (loc, from, to) per tick; absorbed at the path's end if it is an exit.
void walk_path(const BuildingGraph& g, const NearestExitTable::Row& row, int start_tick,
               int horizon, std::vector<Loc>& out) {
    int t = start_tick;
    for (size_t j = 0; j + 1 < row.path.size() && t <= horizon; ++j) {
        int vj = row.path[j], vn = row.path[j + 1];
        if (t >= start_tick) out[t] = Loc::vertex(vj);
        int e = *g.find_edge(vj, vn);
        int d = g.edge(e).travel_time;
        for (int q = 1; q < d && t + q <= horizon; ++q) out[t + q] = Loc::edge(e);
        t += d;
    }
    for (int q = t; q <= horizon; ++q) out[q] = Loc::vertex(row.path.back());
}

}  // namespace

Schedule nearest_exit_wes(const State& s0, const BuildingGraph& g, int horizon) {
    NearestExitTable table = nearest_exit_table(g);
    Schedule es;
    es.horizon = horizon;
    es.at.assign(s0.at.size(), std::vector<Loc>(horizon + 1));
    for (int p = 0; p < (int)s0.at.size(); ++p) {
        const Loc& l = s0.at[p];
        auto& path = es.at[p];
        if (l.is_vertex()) {
            const auto& row = table.rows[l.id];
            if (row.exit < 0) {
                std::fill(path.begin(), path.end(), l);
            } else {
                walk_path(g, row, 0, horizon, path);
            }
        } else {
            const EdgeRec& er = g.edge(l.id);
            auto du = table.rows[er.u].exit < 0
                          ? std::optional<long long>()
                          : std::optional<long long>(table.rows[er.u].prefix_time.back());
            auto dv = table.rows[er.v].exit < 0
                          ? std::optional<long long>()
                          : std::optional<long long>(table.rows[er.v].prefix_time.back());
            if (!du && !dv) {
                std::fill(path.begin(), path.end(), l);
                continue;
            }
            int target = er.u;
            if (!du || (dv && (*dv < *du || (*dv == *du && er.v < er.u)))) target = er.v;
            path[0] = l;
            if (horizon >= 1) walk_path(g, table.rows[target], 1, horizon, path);
        }
    }
    return es;
}

std::vector<std::pair<Schedule, Rat>> realize(const BehaviorSpec& spec, const Schedule& ses,
                                              const BuildingGraph& g, const State& s0) {
    spec.check();
    std::vector<std::pair<Schedule, Rat>> out;
    if (spec.kind == BehaviorSpec::Kind::Dbm) {
        for (const auto& d : spec.delays)
            out.push_back({delay_schedule(ses, d.tau), d.alpha});
    } else {
        out.push_back({ses, spec.alpha});
        out.push_back({nearest_exit_wes(s0, g, ses.horizon), Rat(1) - spec.alpha});
    }
    return out;
}

std::vector<ConstraintBlock> emit_constraints(const BehaviorSpec& spec,
                                              const ExpandedGraph& xg, int t_max) {
    spec.check();
    const BuildingGraph& g = *xg.base;
    std::vector<ConstraintBlock> blocks;

    auto all_nodes = [&]() {
        std::vector<NodeRef> nodes;
        for (int v = 0; v < g.n_vertices(); ++v)
            for (int t = 0; t <= t_max; ++t) nodes.push_back({NodeRef::Vert, v, t});
        for (int e = 0; e < g.n_edges(); ++e)
            for (int t = 0; t <= t_max; ++t) {
                nodes.push_back({NodeRef::Ep, e, t});
                nodes.push_back({NodeRef::Epp, e, t});
            }
        std::sort(nodes.begin(), nodes.end());
        return nodes;
    };
    std::vector<NodeRef> nodes = all_nodes();

    if (spec.kind == BehaviorSpec::Kind::Dbm) {
        for (int i = 0; i < (int)spec.delays.size(); ++i) {
            ConstraintBlock b;
            b.copy = i;
            b.z = spec.delays[i].alpha;
            int tau = spec.delays[i].tau;
            for (const NodeRef& n : nodes) {
                AffineX expr;
                expr.terms.push_back({{n.kind, n.id, std::max(0, n.t - tau)}, Rat(1)});
                b.defs.push_back({n, std::move(expr)});
            }
            blocks.push_back(std::move(b));
        }
        return blocks;
    }

    // NEBM copy 1: identity linkage to the prescription.
    {
        ConstraintBlock b;
        b.copy = 0;
        b.z = spec.alpha;
        for (const NodeRef& n : nodes) {
            AffineX expr;
            expr.terms.push_back({n, Rat(1)});
            b.defs.push_back({n, std::move(expr)});
        }
        blocks.push_back(std::move(b));
    }

    // NEBM copy 2: cohorts from each vertex march along Pi; each (node, tick)
    // collects the x_{v_b,0} of the cohorts sitting there at that tick.
    {
        NearestExitTable table = nearest_exit_table(g);
        std::map<NodeRef, std::vector<int>> cohorts;  // node/tick -> origin vertices
        for (int vb = 0; vb < g.n_vertices(); ++vb) {
            const auto& row = table.rows[vb];
            if (row.exit < 0) {
                for (int t = 0; t <= t_max; ++t) cohorts[{NodeRef::Vert, vb, t}].push_back(vb);
                continue;
            }
            for (size_t j = 0; j < row.path.size(); ++j) {
                int vj = row.path[j];
                long long T = row.prefix_time[j];
                if (T > t_max) break;
                if (j + 1 == row.path.size()) {
                    // the exit accumulates
                    for (int t = (int)T; t <= t_max; ++t)
                        cohorts[{NodeRef::Vert, vj, t}].push_back(vb);
                    break;
                }
                cohorts[{NodeRef::Vert, vj, (int)T}].push_back(vb);
                int e = *g.find_edge(vj, row.path[j + 1]);
                const EdgeRec& er = g.edge(e);
                if (er.travel_time > 1 && T + 1 <= t_max) {
                    // one tick on the travel-first virtual node
                    NodeRef::Kind k = er.u == vj ? NodeRef::Ep : NodeRef::Epp;
                    cohorts[{k, e, (int)T + 1}].push_back(vb);
                }
            }
        }
        ConstraintBlock b;
        b.copy = 1;
        b.z = Rat(1) - spec.alpha;
        for (const NodeRef& n : nodes) {
            AffineX expr;
            auto it = cohorts.find(n);
            if (it != cohorts.end())
                for (int vb : it->second)
                    expr.terms.push_back({{NodeRef::Vert, vb, 0}, Rat(1)});
            b.defs.push_back({n, std::move(expr)});
        }
        blocks.push_back(std::move(b));
    }
    return blocks;
}

}  // namespace evac
