#pragma once

#include <string>
#include <vector>

#include "evac/instance.hpp"
#include "evac/rational.hpp"

namespace evac {

struct BenchConfig {
    std::vector<int> sizes = {20, 30, 40, 50, 60};
    int per_size = 1;
    long long pop_min = 20, pop_max = 100;
    int n_exits = 2;
    int d_min = 1, d_max = 2;
    double ef_min = 1.35, ef_max = 1.75;
    double cutoff_seconds = 60;       // applies to the exact method
    double sub_limit_seconds = 10;    // per-subproblem budget for the heuristic
    double gamma = 0.25;
    double deadline_slack = 0.25;     // D = maxdist + ceil(slack * people)
    double t_max_factor = 1.5;        // horizon = ceil(factor * D)
    uint64_t seed0 = 1;
    std::string behavior = "dbm";     // "dbm" (delays 2/5 @ 0.4/0.6) or "nebm" (0.7)
};

struct BenchRecord {
    std::string instance_id;
    uint64_t seed = 0;
    int nodes = 0, edges = 0, exits = 0;
    long long people = 0;
    int deadline = 0, t_max = 0;
    std::string behavior;
    std::string method;      // bbip | bbevac
    std::string status;      // optimal | cutoff_assumed_full | infeasible | error:...
    double wall_seconds = 0;
    std::string expected_value;    // exact rational, decimal when possible
    long long evacuated_at_d = -1;
    std::string quality_ratio;     // empty unless the exact optimum is proven
    std::string notes;
};

// Instance generation for one bench cell (deterministic in config+index).
Instance bench_instance(const BenchConfig& cfg, int size, int index, uint64_t* seed_out);

// Runs bbip then bbevac on every cell; cutoff counted as the run time and
// counted as a full evacuation for the exact method, per the protocol.
std::vector<BenchRecord> run_bench(const BenchConfig& cfg, bool verbose);

std::string bench_csv_header();
std::string bench_csv_row(const BenchRecord& r);

// Command-line entry (exposed for in-process testing).
int cli_main(const std::vector<std::string>& args);

}  // namespace evac
