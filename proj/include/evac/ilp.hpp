#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evac/behavior.hpp"
#include "evac/instance.hpp"
#include "evac/schedule.hpp"

namespace evac {

struct VarInfo {
    bool integral = true;
    std::optional<Rat> lb, ub;  // nullopt = unbounded on that side
};

struct LinTerm {
    int var;
    Rat coef;
};

enum class Rel : uint8_t { Eq, Le, Ge };

// Row families, used by the structural audit and for reporting.
enum RowTag : int {
    TagConserveV = 1,   // vertex conservation
    TagConserveEp = 2,  // e' conservation
    TagConserveEpp = 3, // e'' conservation (lagged)
    TagPinVw = 4,       // vertex-to-vertex flow pinned on slow edges
    TagPinE = 5,        // virtual transit pinned on travel-time-1 edges
    TagExitMono = 6,    // exit occupancy never decreases
    TagCapEdge = 10,    // edge capacity over the virtual pair
    TagEvacAll = 11,    // everyone at an exit by the horizon
    TagDwell = 12,      // no instant pass-through at virtual nodes
    TagPinInert = 13,   // unused legs of travel-time-1 edges
    TagPinInit = 14,    // x_{v,0} pinned to the initial state
    TagPinVirt0 = 15,   // virtual nodes empty until reachable
    TagBehavior = 16,   // Y_i = f_i(X) and z_i = alpha_i
    TagZSum = 17,       // sum z_i = 1
    TagCapHop = 18,     // net hop flow on travel-time-1 edges within capacity
    TagFlowSplit = 19,  // net flow = forward gross - backward gross
    TagPinExit = 20,    // no gross departures out of an exit
    TagCapInterval = 21,  // edge load across a tick interval within capacity
};

struct LinRow {
    std::vector<LinTerm> terms;
    Rel rel = Rel::Eq;
    Rat rhs;
    int tag = 0;
};

// Variable layout of one occupancy/flow copy over the expanded graph:
// occupancies (vertices, then e', then e'', each time-major within id), then
// net flows (v->w, v->e', e'->e'', e''->w), then the gross direction pairs
// behind each net.
struct CopyLayout {
    int base = 0;
    int n_v = 0, n_e = 0, T = 0;

    int vert(int v, int t) const { return base + v * (T + 1) + t; }
    int ep(int e, int t) const { return base + (n_v + 2 * e) * (T + 1) + t; }
    int epp(int e, int t) const { return base + (n_v + 2 * e + 1) * (T + 1) + t; }
    int occ_count() const { return (n_v + 2 * n_e) * (T + 1); }
    int f_vw(int e, int t) const { return base + occ_count() + (4 * e + 0) * T + t; }
    int f_ve(int e, int t) const { return base + occ_count() + (4 * e + 1) * T + t; }
    int f_e(int e, int t) const { return base + occ_count() + (4 * e + 2) * T + t; }
    int f_ew(int e, int t) const { return base + occ_count() + (4 * e + 3) * T + t; }
    // gross pairs: kind 0..3 as above, dir 0 forward / 1 backward
    int gross(int e, int kind, int dir, int t) const {
        return base + occ_count() + 4 * n_e * T + ((8 * e + 2 * kind + dir) * T) + t;
    }
    int size() const { return occ_count() + 12 * n_e * T; }
    int node_var(const NodeRef& n) const {
        switch (n.kind) {
            case NodeRef::Vert: return vert(n.id, n.t);
            case NodeRef::Ep: return ep(n.id, n.t);
            default: return epp(n.id, n.t);
        }
    }
};

struct IlpModel {
    std::vector<VarInfo> vars;
    std::vector<LinRow> rows;
    std::vector<LinTerm> objective;
    Rat objective_const;
    bool maximize = true;

    // layout metadata (x copy first, then one copy per behavior realization,
    // then the z variables)
    CopyLayout x;
    std::vector<CopyLayout> y;
    std::vector<int> z_vars;
    int deadline = 0;
    int t_max = 0;
    bool soft = false;

    // Defining equalities var = affine(earlier vars); set for every Y
    // occupancy and z variable, enabling copy elimination in the solver.
    struct Definition {
        int var;
        std::vector<LinTerm> terms;
        Rat constant;
    };
    std::vector<Definition> definitions;
    bool y_copies_eliminable = false;
    // row index ranges belonging to each Y copy (LPW rows + linkage rows)
    std::vector<std::pair<int, int>> y_row_ranges;
    // how to rebuild a copy's flow variables from the X copy: a tick shift
    // (delays / identity), or fixed values (the nearest-exit realization)
    struct CopyFlowRule {
        int shift = -1;
        bool use_const = false;
        FlowOccupancy const_flows;
    };
    std::vector<CopyFlowRule> y_flow_rules;

    int n_vars() const { return (int)vars.size(); }
    int add_var(VarInfo info) {
        vars.push_back(std::move(info));
        return n_vars() - 1;
    }
    void add_row(LinRow row) { rows.push_back(std::move(row)); }

    std::string var_name(int v) const;   // canonical 8-char MPS name
    std::string row_name(int r) const;
    std::optional<int> var_by_name(const std::string& name) const;
};

// Constraint families over one copy's variables (the weak-schedule polytope).
void build_lpw(IlpModel& model, const CopyLayout& L, const ExpandedGraph& xg);

// Capacity bounds, edge-pair capacity rows, and the full-evacuation row.
void build_lps(IlpModel& model, const CopyLayout& L, const ExpandedGraph& xg,
               long long population);

struct BuildOptions {
    bool soft = false;              // drop the full-evacuation row
    bool tie_break_early = false;   // add a tiny earliest-arrival objective term
};

// The full behavior-aware program: LPS* on X with the initial state pinned,
// one LPW copy per realization linked by the behavior block, and the
// expected-evacuees-at-D objective.
IlpModel build_ip(const Instance& inst, int deadline, int t_max, BuildOptions opts = {});

// Converts a schedule's canonical occupancy/flows into an assignment of the
// model's X copy (other variables untouched -> caller decides).
void fill_x_assignment(const IlpModel& model, const FlowOccupancy& occ,
                       std::vector<Rat>& assignment);

// Checks one assignment against every row and bound; returns a description
// of the first violation, or nullopt. Independent of the solver.
std::optional<std::string> check_assignment(const IlpModel& model,
                                            const std::vector<Rat>& assignment,
                                            bool check_integrality);

struct Extraction {
    Schedule ses;
    std::vector<std::pair<Schedule, Rat>> realized;
    Rat objective;        // recomputed expected evacuees at the deadline
    Rat expected_value;   // expected_evacuated of the extracted schedule
    ValidationReport strong;
};

// Turns a solved assignment back into schedules: X -> occupancy -> decompose,
// realized copies re-derived from the behavior spec, objective recomputed
// from the Y exit counts at the deadline.
Extraction extract(const IlpModel& model, const std::vector<Rat>& assignment,
                   const Instance& inst);

}  // namespace evac
