#include "oracle.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <vector>

using namespace evac;

namespace {

// State: head-counts per slot. Slots: one per vertex, one per slow edge
// (both virtual positions pooled — any pooled unit may leave to either
// endpoint on the next tick, entering units must dwell at least one tick,
// which pooling at tick granularity captures for travel time 2).
struct Space {
    const BuildingGraph* g;
    std::vector<int> edge_slot;  // edge -> slot or -1
    int n_slots = 0;

    explicit Space(const BuildingGraph& graph) : g(&graph) {
        n_slots = graph.n_vertices();
        edge_slot.assign(graph.n_edges(), -1);
        for (int e = 0; e < graph.n_edges(); ++e)
            if (graph.edge(e).travel_time >= 2) edge_slot[e] = n_slots++;
    }
};

using StateVec = std::vector<int>;

// All single-unit targets from a slot, including staying put.
std::vector<int> unit_moves(const Space& sp, int slot) {
    const BuildingGraph& g = *sp.g;
    std::vector<int> out{slot};
    if (slot < g.n_vertices()) {
        if (g.is_exit(slot)) return out;  // absorbing
        for (auto [w, e] : g.adjacent(slot)) {
            if (g.edge(e).travel_time == 1)
                out.push_back(w);
            else
                out.push_back(sp.edge_slot[e]);
        }
    } else {
        for (int e = 0; e < g.n_edges(); ++e)
            if (sp.edge_slot[e] == slot) {
                out.push_back(g.edge(e).u);
                out.push_back(g.edge(e).v);
            }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool capacities_ok(const Space& sp, const StateVec& s) {
    const BuildingGraph& g = *sp.g;
    for (int v = 0; v < g.n_vertices(); ++v)
        if (s[v] > g.vertex_capacity(v)) return false;
    for (int e = 0; e < g.n_edges(); ++e)
        if (sp.edge_slot[e] >= 0 && s[sp.edge_slot[e]] > g.edge(e).capacity)
            return false;
    return true;
}

// Enumerate successor states: every assignment of units to allowed targets,
// with net hop traffic on travel-time-1 edges capped by the edge capacity.
void successors(const Space& sp, const StateVec& s, std::set<StateVec>& out) {
    const BuildingGraph& g = *sp.g;
    // unroll units into (slot) list
    std::vector<int> units;
    for (int slot = 0; slot < sp.n_slots; ++slot)
        for (int k = 0; k < s[slot]; ++k) units.push_back(slot);
    std::vector<std::vector<int>> options;
    for (int u : units) options.push_back(unit_moves(sp, u));

    StateVec next(sp.n_slots, 0);
    std::map<std::pair<int, int>, int> hop;  // (min,max) vertex pair -> net u->v
    std::vector<int> choice(units.size(), 0);

    std::map<int, int> entrants;  // edge slot -> units stepping on
    auto evaluate = [&]() {
        std::fill(next.begin(), next.end(), 0);
        hop.clear();
        entrants.clear();
        for (size_t i = 0; i < units.size(); ++i) {
            int from = units[i], to = options[i][choice[i]];
            ++next[to];
            if (from < g.n_vertices() && to < g.n_vertices() && from != to) {
                auto key = std::minmax(from, to);
                hop[{key.first, key.second}] += from < to ? 1 : -1;
            }
            if (from < g.n_vertices() && to >= g.n_vertices()) ++entrants[to];
        }
        if (!capacities_ok(sp, next)) return;
        for (const auto& [key, net] : hop) {
            auto e = g.find_edge(key.first, key.second);
            if (std::abs(net) > g.edge(*e).capacity) return;
        }
        // interval load: occupants before the move plus entrants
        for (int e2 = 0; e2 < g.n_edges(); ++e2) {
            int slot = sp.edge_slot[e2];
            if (slot < 0) continue;
            long long load = s[slot];
            auto it = entrants.find(slot);
            if (it != entrants.end()) load += it->second;
            if (load > g.edge(e2).capacity) return;
        }
        out.insert(next);
    };

    while (true) {
        evaluate();
        size_t k = 0;
        while (k < units.size() && ++choice[k] == (int)options[k].size()) choice[k++] = 0;
        if (k == units.size()) break;
    }
}

}  // namespace

long long oracle_best_evacuated(const Instance& inst, int deadline) {
    const BuildingGraph& g = inst.graph;
    Space sp(g);
    StateVec s0(sp.n_slots, 0);
    for (const Loc& l : inst.s0.at) {
        if (l.is_vertex())
            ++s0[l.id];
        else if (sp.edge_slot[l.id] >= 0)
            ++s0[sp.edge_slot[l.id]];
        else
            ++s0[g.edge(l.id).u];
    }
    if (!capacities_ok(sp, s0)) return -1;

    int T = inst.t_max;
    std::vector<std::set<StateVec>> layer(T + 1);
    layer[0].insert(s0);
    for (int t = 0; t < T; ++t)
        for (const StateVec& s : layer[t]) successors(sp, s, layer[t + 1]);

    auto evacuated = [&](const StateVec& s) {
        long long n = 0;
        for (int v : g.exits()) n += s[v];
        return n;
    };
    long long all = inst.n_people();

    // backward pass: states that can still reach full evacuation by T
    std::vector<std::set<StateVec>> good(T + 1);
    for (const StateVec& s : layer[T])
        if (evacuated(s) == all) good[T].insert(s);
    for (int t = T - 1; t >= 0; --t)
        for (const StateVec& s : layer[t]) {
            std::set<StateVec> nxt;
            successors(sp, s, nxt);
            for (const StateVec& n : nxt)
                if (good[t + 1].count(n)) {
                    good[t].insert(s);
                    break;
                }
        }
    if (good[0].empty()) return -1;

    // forward over good states only, maximizing exits at the deadline
    std::set<StateVec> cur = good[0];
    for (int t = 0; t < deadline; ++t) {
        std::set<StateVec> nxt;
        for (const StateVec& s : cur) {
            std::set<StateVec> succ;
            successors(sp, s, succ);
            for (const StateVec& n : succ)
                if (good[t + 1].count(n)) nxt.insert(n);
        }
        cur = std::move(nxt);
    }
    long long best = -1;
    for (const StateVec& s : cur) best = std::max(best, evacuated(s));
    return best;
}
