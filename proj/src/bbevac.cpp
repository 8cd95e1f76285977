#include "evac/bbevac.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "evac/ilp.hpp"

namespace evac {

std::vector<ConstraintBlock> project_behavior(const BehaviorSpec& spec, const ExitGraph& eg,
                                              int t_max) {
    ExpandedGraph sub_x = expand(eg.subgraph);
    return emit_constraints(spec, sub_x, t_max);
}

namespace {

using Clock = std::chrono::steady_clock;

// Capacity check of one candidate row against the other rows of `es`.
// Vertex counts per tick plus interval edge loads, as in validate_strong.
bool row_fits(const Schedule& es, int person, const std::vector<Loc>& row,
              const BuildingGraph& g) {
    int T = es.horizon;
    for (int t = 0; t <= T; ++t) {
        if (row[t].is_vertex()) {
            long long count = 1;
            for (int p = 0; p < es.n_people(); ++p)
                if (p != person && es.at[p][t] == row[t]) ++count;
            if (count > g.vertex_capacity(row[t].id)) return false;
        }
        if (t == T) break;
        // edges the candidate loads during (t, t+1)
        for (int e = 0; e < g.n_edges(); ++e) {
            const EdgeRec& er = g.edge(e);
            auto involves = [&](const Loc& cur, const Loc& nxt) {
                if (cur.is_edge() && cur.id == e) return true;
                if (nxt.is_edge() && nxt.id == e) return true;
                return cur.is_vertex() && nxt.is_vertex() && cur.id != nxt.id &&
                       ((cur.id == er.u && nxt.id == er.v) ||
                        (cur.id == er.v && nxt.id == er.u));
            };
            if (!involves(row[t], row[t + 1])) continue;
            long long count = 1;
            for (int p = 0; p < es.n_people(); ++p)
                if (p != person && involves(es.at[p][t], es.at[p][t + 1])) ++count;
            if (count > er.capacity) return false;
        }
    }
    return true;
}

}  // namespace

BbEvacResult bb_evac(const Instance& inst, int deadline, BbEvacOptions opts) {
    auto start = Clock::now();
    const BuildingGraph& g = inst.graph;
    if (!inst.behavior) throw std::invalid_argument("behavior spec empty");
    if (opts.gamma <= 0 || opts.gamma > 1)
        throw std::invalid_argument("gamma must lie in (0, 1]");
    int T = inst.t_max;
    int P = inst.n_people();
    double sub_limit = opts.subproblem_time_limit > 0
                           ? opts.subproblem_time_limit
                           : opts.global_time_limit / std::max<size_t>(1, g.exits().size());

    BbEvacResult out;
    out.es.horizon = T;
    out.es.at.assign(P, {});
    for (int p = 0; p < P; ++p) out.es.at[p].assign(T + 1, inst.s0.at[p]);

    std::vector<bool> alive(g.n_vertices(), true);
    std::vector<bool> marked(g.n_vertices(), false);
    std::vector<int> time_used(g.n_vertices(), 0);
    std::vector<bool> routed(P, false);
    // (timeU, vertex) min-queue realized as a sorted set
    std::set<std::pair<int, int>> queue;
    for (int v : g.exits()) {
        marked[v] = true;
        queue.insert({0, v});
    }
    std::map<int, int> next_ex;  // vertex -> inherited timeU (min on merge)

    auto is_isolated = [&](int v) {
        for (auto [w, e] : g.adjacent(v)) {
            (void)e;
            if (alive[w]) return false;
        }
        return true;
    };

    while (true) {
        while (!queue.empty()) {
            auto [tu, v] = *queue.begin();
            queue.erase(queue.begin());
            if (!alive[v] || is_isolated(v)) continue;

            // radius search: smallest kappa whose entry ring is occupied enough
            std::vector<bool> excluded(g.n_vertices(), false);
            for (int u = 0; u < g.n_vertices(); ++u)
                excluded[u] = !alive[u] || (marked[u] && u != v);
            std::vector<bool> allowed(g.n_vertices());
            for (int u = 0; u < g.n_vertices(); ++u) allowed[u] = !excluded[u];
            std::vector<int> dist = g.hop_distances(v, allowed);
            int ecc = 0;
            for (int u = 0; u < g.n_vertices(); ++u) ecc = std::max(ecc, dist[u]);
            std::vector<long long> people_at(g.n_vertices(), 0);
            for (int p = 0; p < P; ++p)
                if (inst.s0.at[p].is_vertex()) ++people_at[inst.s0.at[p].id];
            int kappa = ecc;
            for (int k = 1; k <= ecc; ++k) {
                long long ring = 0, occupied = 0;
                for (int u = 0; u < g.n_vertices(); ++u)
                    if (dist[u] == k) {
                        ++ring;
                        if (people_at[u] > 0) ++occupied;
                    }
                // at least ceil(gamma * |IN|) occupied entry vertices
                if (Rat(occupied) >= opts.gamma * Rat(ring)) {
                    kappa = k;
                    break;
                }
            }
            ExitGraph eg = exit_graph(g, v, kappa, &excluded);

            SubReport rep;
            rep.exit_vertex = v;
            rep.kappa = kappa;
            rep.entry_vertices = eg.entry_vertices;
            rep.time_used_before = tu;
            rep.sub_deadline = std::max(0, deadline - tu);

            // subproblem population: unrouted people inside (except on v), plus
            // people parked on v itself since t=0
            std::vector<int> sub_people;
            for (int p = 0; p < P; ++p) {
                if (routed[p]) {
                    bool parked = true;
                    for (int t = 0; t <= tu && parked; ++t)
                        parked = out.es.at[p][t] == Loc::vertex(v);
                    bool still_there = parked;
                    for (int t = tu; t <= T && still_there; ++t)
                        still_there = out.es.at[p][t] == Loc::vertex(v);
                    if (parked && still_there) sub_people.push_back(p);
                    continue;
                }
                const Loc& l = inst.s0.at[p];
                if (!l.is_vertex()) continue;
                int sv = eg.parent_to_sub[l.id];
                if (sv >= 0 && l.id != v) sub_people.push_back(p);
                else if (l.id == v) sub_people.push_back(p);  // residents of the exit
            }

            if (!sub_people.empty()) {
                Instance sub;
                sub.graph = eg.subgraph;
                sub.t_max = T;
                sub.deadline = rep.sub_deadline;
                sub.behavior = inst.behavior;
                for (int p : sub_people) {
                    sub.person_names.push_back(inst.person_names[p]);
                    int pv = inst.s0.at[p].is_vertex() ? inst.s0.at[p].id : v;
                    if (routed[p]) pv = v;  // folded back onto the temporary exit
                    sub.s0.at.push_back(Loc::vertex(eg.parent_to_sub[pv]));
                }

                SolveLimits lim;
                lim.time_limit_seconds = sub_limit;
                BuildOptions bopts;
                bopts.tie_break_early = true;
                IlpModel model = build_ip(sub, rep.sub_deadline, T, bopts);
                SolveStatus st = solve_mip(model, lim);
                if (st.status == SolveStatus::Kind::Infeasible) {
                    rep.soft_retry = true;
                    bopts.soft = true;
                    model = build_ip(sub, rep.sub_deadline, T, bopts);
                    st = solve_mip(model, lim);
                }
                if (!st.has_incumbent) {
                    rep.timed_out = st.status == SolveStatus::Kind::TimeLimit;
                } else {
                    Extraction ex = extract(model, st.assignment, sub);
                    rep.objective = ex.objective;
                    // stitch each person's sub-route into the running schedule
                    int sub_exit = eg.parent_to_sub[v];
                    std::vector<int> arrival(sub_people.size(), -1);
                    for (size_t sp = 0; sp < sub_people.size(); ++sp)
                        for (int t = 0; t <= T; ++t)
                            if (ex.ses.at[sp][t] == Loc::vertex(sub_exit)) {
                                arrival[sp] = t;
                                break;
                            }
                    int eps = 0;
                    for (size_t sp = 0; sp < sub_people.size(); ++sp)
                        if (arrival[sp] >= 0) eps = std::max(eps, arrival[sp]);
                    rep.epsilon = eps;

                    // continuation anchors: людей who started on v and reach an
                    // exit by the deadline under the schedule built so far
                    std::vector<int> anchors;
                    if (!g.is_exit(v)) {
                        for (int q = 0; q < P; ++q) {
                            if (inst.s0.at[q] != Loc::vertex(v)) continue;
                            const Loc& at_d = out.es.at[q][std::min(deadline, T)];
                            if (at_d.is_vertex() && g.is_exit(at_d.id)) anchors.push_back(q);
                        }
                        std::sort(anchors.begin(), anchors.end());
                    }
                    size_t rr = 0;

                    auto to_parent = [&](const Loc& l) {
                        if (l.is_vertex()) return Loc::vertex(eg.sub_to_parent[l.id]);
                        const EdgeRec& se = eg.subgraph.edge(l.id);
                        return Loc::edge(*g.find_edge(eg.sub_to_parent[se.u],
                                                      eg.sub_to_parent[se.v]));
                    };
                    for (size_t sp = 0; sp < sub_people.size(); ++sp) {
                        int p = sub_people[sp];
                        std::vector<Loc> traj(T + 1);
                        for (int t = 0; t <= T; ++t) traj[t] = to_parent(ex.ses.at[sp][t]);
                        if (arrival[sp] < 0 || g.is_exit(v)) {
                            out.es.at[p] = traj;
                            routed[p] = true;
                            if (arrival[sp] < 0) rep.stranded.push_back(p);
                            continue;
                        }
                        if (anchors.empty()) {
                            out.es.at[p] = traj;
                            routed[p] = true;
                            rep.stranded.push_back(p);
                            continue;
                        }
                        int anchor = anchors[rr++ % anchors.size()];
                        int a = arrival[sp];
                        bool placed = false;
                        for (int delta = 0; a + delta <= T && !placed; ++delta) {
                            std::vector<Loc> row(T + 1);
                            for (int t = 0; t <= T; ++t) {
                                if (t <= a) row[t] = traj[t];
                                else if (t <= a + delta) row[t] = Loc::vertex(v);
                                else row[t] = out.es.at[anchor][t - a - delta];
                            }
                            if (row_fits(out.es, p, row, g)) {
                                out.es.at[p] = row;
                                routed[p] = true;
                                rep.deltas.push_back({p, delta});
                                placed = true;
                            }
                        }
                        if (!placed) {
                            out.es.at[p] = traj;  // parked at the temporary exit
                            routed[p] = true;
                            rep.stranded.push_back(p);
                        }
                    }
                    time_used[v] = tu + eps;
                }
            }
            if (sub_people.empty()) time_used[v] = tu;

            // peel the subgraph
            for (int u : eg.sub_to_parent) alive[u] = false;
            std::vector<int> enqueued;
            if (deadline - time_used[v] > 0) {
                for (int u : eg.entry_vertices) {
                    auto it = next_ex.find(u);
                    if (it == next_ex.end() || time_used[v] < it->second)
                        next_ex[u] = time_used[v];
                    marked[u] = true;
                    enqueued.push_back(u);
                }
            }
            out.next_exits.push_back(enqueued);
            out.subproblems.push_back(std::move(rep));
            out.time_used[v] = time_used[v];

            if (std::chrono::duration<double>(Clock::now() - start).count() >
                opts.global_time_limit)
                break;
        }
        if (next_ex.empty()) break;
        for (const auto& [u, tu] : next_ex) {
            alive[u] = true;
            time_used[u] = tu;
            queue.insert({tu, u});
        }
        next_ex.clear();
        bool all_marked = true;
        for (int u = 0; u < g.n_vertices(); ++u)
            if (alive[u] && !marked[u]) all_marked = false;
        if (all_marked) break;
        if (std::chrono::duration<double>(Clock::now() - start).count() >
            opts.global_time_limit)
            break;
    }

    for (int p = 0; p < P; ++p)
        if (!routed[p]) out.never_routed.push_back(p);
    out.strong = validate_strong(out.es, g);
    out.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return out;
}

}  // namespace evac
