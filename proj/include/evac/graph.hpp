#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evac/rational.hpp"

namespace evac {

// A location is either a vertex or an (undirected) edge of the building graph.
struct Loc {
    enum Kind : uint8_t { Vertex = 0, Edge = 1 };
    Kind kind = Vertex;
    int id = -1;

    bool operator==(const Loc&) const = default;
    bool operator<(const Loc& o) const {
        return kind != o.kind ? kind < o.kind : id < o.id;
    }
    static Loc vertex(int v) { return {Vertex, v}; }
    static Loc edge(int e) { return {Edge, e}; }
    bool is_vertex() const { return kind == Vertex; }
    bool is_edge() const { return kind == Edge; }
};

struct EdgeRec {
    int u = -1, v = -1;          // canonical orientation as loaded/built
    long long capacity = 0;      // persons
    int travel_time = 1;         // ticks, >= 1
};

class BuildingGraph {
public:
    int add_vertex(const std::string& name, long long capacity, bool exit);
    int add_edge(int u, int v, long long capacity, int travel_time);

    int n_vertices() const { return (int)vertex_names_.size(); }
    int n_edges() const { return (int)edges_.size(); }
    const std::string& vertex_name(int v) const { return vertex_names_[v]; }
    long long vertex_capacity(int v) const { return vertex_capacity_[v]; }
    bool is_exit(int v) const { return is_exit_[v]; }
    const std::vector<int>& exits() const { return exits_; }
    const EdgeRec& edge(int e) const { return edges_[e]; }
    const std::vector<EdgeRec>& edges() const { return edges_; }
    // (neighbor vertex, edge id) pairs, sorted by neighbor id
    const std::vector<std::pair<int, int>>& adjacent(int v) const { return adj_[v]; }

    std::optional<int> find_vertex(const std::string& name) const;
    std::optional<int> find_edge(int u, int v) const;

    std::string loc_name(const Loc& l) const;
    // Accepts "v3" or "u-v" edge names.
    std::optional<Loc> parse_loc(const std::string& text) const;

    int other_end(int e, int v) const;

    // Hop-count shortest distances from `src`, restricted to vertices where
    // allowed[v] is true (src must be allowed). Unreachable = -1.
    std::vector<int> hop_distances(int src, const std::vector<bool>& allowed) const;

    // Travel-time shortest distances (sum of d(e)); unreachable = -1.
    std::vector<long long> travel_distances(int src) const;

    // Structural invariants: ids, travel times >= 1, no self loops/dups,
    // nonnegative capacities. Throws GraphError on violation.
    void check_structure() const;

    // Full-instance invariants on top: exits nonempty, exit capacity >= population.
    void check_planning_instance(long long population) const;

private:
    std::vector<std::string> vertex_names_;
    std::map<std::string, int> vertex_index_;
    std::vector<long long> vertex_capacity_;
    std::vector<bool> is_exit_;
    std::vector<int> exits_;
    std::vector<EdgeRec> edges_;
    std::map<std::pair<int, int>, int> edge_index_;  // key normalized (min,max)
    std::vector<std::vector<std::pair<int, int>>> adj_;
};

struct GraphError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Virtual-node expansion view. Edges with d(e) > 1 get the (e', e'') pair;
// internal_time(e) = d(e) - 2 is the tick gap between them.
struct ExpandedGraph {
    const BuildingGraph* base = nullptr;
    std::vector<int> virtual_edges;   // edge ids with travel_time > 1
    std::vector<int> internal_time;   // per edge id; -1 when no virtual pair

    bool has_virtual(int e) const { return internal_time[e] >= 0; }
};

ExpandedGraph expand(const BuildingGraph& g);
// Drops virtual nodes again; identity on the base graph (used by tests).
BuildingGraph contract(const ExpandedGraph& xg);

struct ExitGraph {
    const BuildingGraph* parent = nullptr;
    int exit = -1;          // parent vertex id
    int radius = 0;         // hop-count radius
    BuildingGraph subgraph; // exits() == {exit}, capacities/travel restricted
    std::vector<int> entry_vertices;      // parent ids at hop distance == radius
    std::vector<int> sub_to_parent;       // subgraph vertex -> parent vertex
    std::vector<int> parent_to_sub;       // parent vertex -> subgraph vertex or -1
};

// Radius-k exit graph around `v`, excluding `excluded_exits` (other exits /
// temporary exits) from the vertex set and from distance paths.
ExitGraph exit_graph(const BuildingGraph& g, int v, int radius,
                     const std::vector<bool>* excluded_exits = nullptr);

struct NearestExitTable {
    // Per vertex: nearest exit (-1 if unreachable), the vertex path to it,
    // and prefix travel times T(v, path[j]).
    struct Row {
        int exit = -1;
        std::vector<int> path;            // vertex ids, path[0] == v
        std::vector<long long> prefix_time;
    };
    std::vector<Row> rows;
    std::vector<int> unreachable;  // vertices with no exit-reaching path

    // T(v1, vj): +inf (nullopt) when vj not on Pi(v1).
    std::optional<long long> prefix_time(int v, int vj) const;
};

// Deterministic shortest paths by travel time; ties broken by smallest exit
// id, then smallest next-vertex id along the path.
NearestExitTable nearest_exit_table(const BuildingGraph& g);

struct GenParams {
    int n_vertices = 0;
    double edge_factor = 1.5;  // edges = ceil(n * factor)
    int n_exits = 1;
    long long population = 1;
    int deadline = 10;
    uint64_t seed = 0;
    // travel-time / capacity ranges (inclusive)
    int d_min = 1, d_max = 5;
    long long edge_cap_min = 2, edge_cap_max = 10;
    long long vertex_cap_min = 5, vertex_cap_max = 50;
};

struct Instance;  // defined in instance.hpp

Instance generate_instance(const GenParams& params);

}  // namespace evac
