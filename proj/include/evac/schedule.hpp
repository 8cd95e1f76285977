#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evac/graph.hpp"
#include "evac/instance.hpp"

namespace evac {

// Per-person trajectory over ticks 0..horizon.
struct Schedule {
    int horizon = 0;
    std::vector<std::vector<Loc>> at;  // [person][tick]

    const Loc& loc(int p, int t) const { return at[p][t]; }
    int n_people() const { return (int)at.size(); }
};

Schedule load_schedule(const std::string& path, const BuildingGraph& g,
                       const std::vector<std::string>& person_names);
std::string schedule_to_json(const Schedule& es, const BuildingGraph& g,
                             const std::vector<std::string>& person_names);
void save_schedule(const Schedule& es, const BuildingGraph& g,
                   const std::vector<std::string>& person_names,
                   const std::string& path);

struct ValidationReport {
    bool ok = true;
    // first violation, when !ok
    int person = -1;
    int tick = -1;
    int condition = 0;       // WES condition 1..4, or strong check 5..7
    std::string message;

    static ValidationReport pass() { return {}; }
    static ValidationReport fail(int person, int tick, int condition, std::string msg) {
        return {false, person, tick, condition, std::move(msg)};
    }
};

// Movement legality (WES conditions): stays/adjacent moves, edge endpoints,
// travel times, absorbing exits. Capacity violations are allowed here.
ValidationReport validate_weak(const Schedule& es, const BuildingGraph& g);

// Weak legality plus per-tick vertex capacities, per-interval edge loads
// (everyone on, entering, leaving or hopping across an edge counts against
// it), and full evacuation by the horizon.
ValidationReport validate_strong(const Schedule& es, const BuildingGraph& g);

// |{p : es_p(D) in EX}|; relies on exits being absorbing.
int count_evacuated(const Schedule& es, const BuildingGraph& g, int deadline);

// Sum of prob * N_schedule(D) over an explicit distribution; probabilities
// must sum to exactly 1.
Rat expected_evacuated(const std::vector<std::pair<Schedule, Rat>>& realized,
                       const BuildingGraph& g, int deadline);

// The Delta-delayed schedule: holds everyone at their t=0 location for Delta
// ticks, then replays; arrivals pushed past the horizon are simply dropped.
Schedule delay_schedule(const Schedule& es, int delta);

// Occupancy head-counts over vertices and virtual nodes, plus the net flow
// values that realize them (the ILP's variable view of a schedule).
struct FlowOccupancy {
    int horizon = 0;
    // [vertex][t] / [edge][t], t in 0..horizon
    std::vector<std::vector<long long>> vert, ep, epp;
    // net flows: [edge][t], t in 0..horizon-1
    std::vector<std::vector<long long>> f_vw, f_ve, f_e, f_ew;
    // gross per-direction parts behind each net (forward / backward)
    std::vector<std::vector<long long>> g_vw_f, g_vw_b, g_ve_f, g_ve_b, g_e_f, g_e_b,
        g_ew_f, g_ew_b;

    long long vertex_count(int v, int t) const { return vert[v][t]; }
    long long edge_count(int e, int t) const { return ep[e][t] + epp[e][t]; }
    // head-count over vertices + virtual nodes + committed in-transit units
    long long total_count(const BuildingGraph& g, int t) const;
};

// Canonical attribution of a weak schedule onto occupancies and flows.
// People on travel-time-1 edges are attributed to the endpoint they entered
// from. Throws std::invalid_argument if the schedule is not weak-valid.
FlowOccupancy occupancy_of(const Schedule& es, const ExpandedGraph& xg);

// One member of the schedule class realizing `occ`: flows are recovered per
// tick (graphs with travel times up to 2), then persons are routed with the
// lowest id taking the lexicographically smallest move. Throws
// std::invalid_argument when occ is not flow-consistent.
Schedule decompose(const FlowOccupancy& occ, const State& s0, const ExpandedGraph& xg);

// Decompose driven by the solver's own flow values (any travel times).
Schedule decompose_with_flows(const FlowOccupancy& occ, const State& s0,
                              const ExpandedGraph& xg);

}  // namespace evac
