#pragma once

#include <optional>
#include <string>
#include <vector>

#include "evac/ilp.hpp"
#include "evac/simplex.hpp"

namespace evac {

struct SolveStatus {
    enum class Kind { Optimal, Infeasible, Unbounded, TimeLimit } status = Kind::TimeLimit;
    std::optional<Rat> objective;            // incumbent objective when present
    std::vector<Rat> assignment;             // full model assignment when present
    bool has_incumbent = false;
    Rat best_bound;                          // valid upper bound (maximization)
    long nodes = 0;
    long lp_iterations = 0;
    double wall_seconds = 0;

    bool optimal() const { return status == Kind::Optimal; }
};

struct SolveLimits {
    double time_limit_seconds = 1e18;  // EVAC_TIME_LIMIT overrides when set
    long node_limit = 10'000'000;
};

struct SolveOptions {
    bool allow_reduction = true;   // substitute defined copies out of the solve
    bool float_warm_start = true;  // double pass proposes the starting basis
};

// Default wall-clock limit, honoring the EVAC_TIME_LIMIT environment variable.
SolveLimits default_limits();

// Exact rational optimum of the LP relaxation (integrality ignored).
SolveStatus solve_lp(const IlpModel& model, SolveLimits limits = default_limits());

// Branch and bound over the exact relaxation: best-bound node selection,
// most-fractional branching (ties by lowest index), floor branch first.
SolveStatus solve_mip(const IlpModel& model, SolveLimits limits = default_limits(),
                      SolveOptions opts = {});

}  // namespace evac
