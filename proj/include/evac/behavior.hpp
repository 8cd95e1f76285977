#pragma once

#include <vector>

#include "evac/behavior_spec.hpp"
#include "evac/instance.hpp"
#include "evac/schedule.hpp"

namespace evac {

// Reference to an occupancy variable: a vertex or virtual-node head-count at
// a tick.
struct NodeRef {
    enum Kind : uint8_t { Vert = 0, Ep = 1, Epp = 2 };
    Kind kind = Vert;
    int id = 0;  // vertex id or edge id
    int t = 0;

    bool operator==(const NodeRef&) const = default;
    bool operator<(const NodeRef& o) const {
        if (kind != o.kind) return kind < o.kind;
        if (id != o.id) return id < o.id;
        return t < o.t;
    }
};

// Affine expression over X occupancy variables.
struct AffineX {
    std::vector<std::pair<NodeRef, Rat>> terms;
    Rat constant;
};

// Copy i of the behavior linkage: z_i's constant binding plus one defining
// equality per Y_i occupancy variable (a complete map; untouched nodes are
// pinned to zero by an empty expression).
struct ConstraintBlock {
    int copy = 0;
    Rat z;
    std::vector<std::pair<NodeRef, AffineX>> defs;  // sorted by NodeRef
};

// Expands the behavior into realized weak schedules with probabilities:
// delays of the prescription, or {prescription, nearest-exit rush}.
std::vector<std::pair<Schedule, Rat>> realize(const BehaviorSpec& spec, const Schedule& ses,
                                              const BuildingGraph& g, const State& s0);

// Everyone heads along the shortest path to their nearest exit; capacity
// violations allowed. Edge residents first complete the edge toward the
// endpoint with the smaller exit distance.
Schedule nearest_exit_wes(const State& s0, const BuildingGraph& g, int horizon);

// The constraint view of the behavior: per copy, equalities tying Y_i
// occupancies to X occupancies (DBM: shifted identities; NEBM copy 2:
// arrival sums driven by the t=0 counts, accumulating at exits).
std::vector<ConstraintBlock> emit_constraints(const BehaviorSpec& spec,
                                              const ExpandedGraph& xg, int t_max);

}  // namespace evac
