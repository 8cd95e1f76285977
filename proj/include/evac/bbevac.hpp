#pragma once

#include <map>
#include <vector>

#include "evac/instance.hpp"
#include "evac/schedule.hpp"
#include "evac/solver.hpp"

namespace evac {

// Native re-emission of the behavior on an exit graph (the projection keeps
// exactly the equalities over the subgraph's own variables; for the shipped
// models that coincides with emitting on the subgraph directly).
std::vector<ConstraintBlock> project_behavior(const BehaviorSpec& spec, const ExitGraph& eg,
                                              int t_max);

struct BbEvacOptions {
    Rat gamma = Rat(1, 4);
    double subproblem_time_limit = 0;  // seconds; <= 0 derives budget/exits
    double global_time_limit = 1e18;
};

struct SubReport {
    int exit_vertex = -1;
    int kappa = 0;
    std::vector<int> entry_vertices;   // parent vertex ids
    int time_used_before = 0;          // timeU(v) when popped
    int sub_deadline = 0;
    Rat objective;                     // subproblem expected value
    int epsilon = 0;
    bool soft_retry = false;
    bool timed_out = false;
    std::vector<std::pair<int, int>> deltas;  // (person, waiting delay)
    std::vector<int> stranded;                // persons parked without p*
};

struct BbEvacResult {
    Schedule es;
    std::vector<SubReport> subproblems;
    std::map<int, int> time_used;              // vertex -> final timeU
    std::vector<std::vector<int>> next_exits;  // per subproblem, enqueued entries
    std::vector<int> never_routed;             // persons no subproblem covered
    ValidationReport strong;
    double wall_seconds = 0;
};

// The exit-graph peeling heuristic: pop temporary exits by used time, solve
// the behavior-aware program on a radius-kappa exit graph, stitch each
// person's sub-route onto the continuation of someone who started at the
// temporary exit, minimal waiting delay, then promote the entry vertices.
BbEvacResult bb_evac(const Instance& inst, int deadline, BbEvacOptions opts = {});

}  // namespace evac
