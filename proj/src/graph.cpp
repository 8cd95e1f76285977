#include "evac/graph.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <random>
#include <set>

#include "evac/instance.hpp"

namespace evac {

int BuildingGraph::add_vertex(const std::string& name, long long capacity, bool exit) {
    if (vertex_index_.count(name))
        throw GraphError("duplicate vertex id '" + name + "'");
    int id = (int)vertex_names_.size();
    vertex_names_.push_back(name);
    vertex_index_[name] = id;
    vertex_capacity_.push_back(capacity);
    is_exit_.push_back(exit);
    if (exit) exits_.push_back(id);
    adj_.emplace_back();
    return id;
}

int BuildingGraph::add_edge(int u, int v, long long capacity, int travel_time) {
    if (u < 0 || u >= n_vertices() || v < 0 || v >= n_vertices())
        throw GraphError("edge endpoint out of range");
    if (u == v)
        throw GraphError("self-loop on vertex '" + vertex_names_[u] + "'");
    auto key = std::minmax(u, v);
    if (edge_index_.count({key.first, key.second}))
        throw GraphError("duplicate edge " + vertex_names_[u] + "-" + vertex_names_[v]);
    if (travel_time < 1)
        throw GraphError("travel time must be >= 1 on edge " + vertex_names_[u] + "-" +
                         vertex_names_[v]);
    int id = (int)edges_.size();
    edges_.push_back({u, v, capacity, travel_time});
    edge_index_[{key.first, key.second}] = id;
    adj_[u].push_back({v, id});
    adj_[v].push_back({u, id});
    std::sort(adj_[u].begin(), adj_[u].end());
    std::sort(adj_[v].begin(), adj_[v].end());
    return id;
}

std::optional<int> BuildingGraph::find_vertex(const std::string& name) const {
    auto it = vertex_index_.find(name);
    if (it == vertex_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<int> BuildingGraph::find_edge(int u, int v) const {
    auto key = std::minmax(u, v);
    auto it = edge_index_.find({key.first, key.second});
    if (it == edge_index_.end()) return std::nullopt;
    return it->second;
}

std::string BuildingGraph::loc_name(const Loc& l) const {
    if (l.is_vertex()) return vertex_names_[l.id];
    const EdgeRec& e = edges_[l.id];
    return vertex_names_[e.u] + "-" + vertex_names_[e.v];
}

std::optional<Loc> BuildingGraph::parse_loc(const std::string& text) const {
    if (auto v = find_vertex(text)) return Loc::vertex(*v);
    auto dash = text.find('-');
    if (dash == std::string::npos) return std::nullopt;
    auto u = find_vertex(text.substr(0, dash));
    auto v = find_vertex(text.substr(dash + 1));
    if (!u || !v) return std::nullopt;
    auto e = find_edge(*u, *v);
    if (!e) return std::nullopt;
    return Loc::edge(*e);
}

int BuildingGraph::other_end(int e, int v) const {
    const EdgeRec& ed = edges_[e];
    return ed.u == v ? ed.v : ed.u;
}

std::vector<int> BuildingGraph::hop_distances(int src, const std::vector<bool>& allowed) const {
    std::vector<int> dist(n_vertices(), -1);
    if (!allowed[src]) return dist;
    std::deque<int> q{src};
    dist[src] = 0;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (auto [w, e] : adj_[v]) {
            if (!allowed[w] || dist[w] >= 0) continue;
            dist[w] = dist[v] + 1;
            q.push_back(w);
        }
    }
    return dist;
}

std::vector<long long> BuildingGraph::travel_distances(int src) const {
    std::vector<long long> dist(n_vertices(), -1);
    using Item = std::pair<long long, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[src] = 0;
    pq.push({0, src});
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d != dist[v]) continue;
        for (auto [w, e] : adj_[v]) {
            long long nd = d + edges_[e].travel_time;
            if (dist[w] < 0 || nd < dist[w]) {
                dist[w] = nd;
                pq.push({nd, w});
            }
        }
    }
    return dist;
}

void BuildingGraph::check_structure() const {
    if (n_vertices() == 0) throw GraphError("no vertices");
    for (int v = 0; v < n_vertices(); ++v)
        if (vertex_capacity_[v] < 0)
            throw GraphError("negative capacity on vertex '" + vertex_names_[v] + "'");
    for (const EdgeRec& e : edges_) {
        if (e.capacity < 0)
            throw GraphError("negative capacity on edge " + vertex_names_[e.u] + "-" +
                             vertex_names_[e.v]);
        if (e.travel_time < 1)
            throw GraphError("travel time must be >= 1 on edge " + vertex_names_[e.u] + "-" +
                             vertex_names_[e.v]);
    }
}

void BuildingGraph::check_planning_instance(long long population) const {
    check_structure();
    if (exits_.empty()) throw GraphError("no exits");
    for (int v : exits_)
        if (vertex_capacity_[v] < population)
            throw GraphError("exit '" + vertex_names_[v] + "' capacity " +
                             std::to_string(vertex_capacity_[v]) +
                             " below population " + std::to_string(population));
}

ExpandedGraph expand(const BuildingGraph& g) {
    ExpandedGraph xg;
    xg.base = &g;
    xg.internal_time.assign(g.n_edges(), -1);
    for (int e = 0; e < g.n_edges(); ++e) {
        if (g.edge(e).travel_time > 1) {
            xg.virtual_edges.push_back(e);
            xg.internal_time[e] = g.edge(e).travel_time - 2;
        }
    }
    return xg;
}

BuildingGraph contract(const ExpandedGraph& xg) {
    const BuildingGraph& g = *xg.base;
    BuildingGraph out;
    for (int v = 0; v < g.n_vertices(); ++v)
        out.add_vertex(g.vertex_name(v), g.vertex_capacity(v), g.is_exit(v));
    for (const EdgeRec& e : g.edges()) out.add_edge(e.u, e.v, e.capacity, e.travel_time);
    return out;
}

ExitGraph exit_graph(const BuildingGraph& g, int v, int radius,
                     const std::vector<bool>* excluded_exits) {
    if (v < 0 || v >= g.n_vertices())
        throw GraphError("exit-graph center is not a vertex of the graph");
    std::vector<bool> allowed(g.n_vertices(), true);
    for (int u = 0; u < g.n_vertices(); ++u) {
        bool excl = excluded_exits ? (*excluded_exits)[u] : g.is_exit(u);
        if (excl && u != v) allowed[u] = false;
    }
    allowed[v] = true;
    std::vector<int> dist = g.hop_distances(v, allowed);

    ExitGraph eg;
    eg.parent = &g;
    eg.exit = v;
    eg.radius = radius;
    eg.parent_to_sub.assign(g.n_vertices(), -1);
    for (int u = 0; u < g.n_vertices(); ++u) {
        if (dist[u] < 0 || dist[u] > radius) continue;
        int sid = eg.subgraph.add_vertex(g.vertex_name(u), g.vertex_capacity(u), u == v);
        eg.parent_to_sub[u] = sid;
        eg.sub_to_parent.push_back(u);
        if (dist[u] == radius && u != v) eg.entry_vertices.push_back(u);
    }
    for (const EdgeRec& e : g.edges()) {
        int su = eg.parent_to_sub[e.u], sv = eg.parent_to_sub[e.v];
        if (su >= 0 && sv >= 0)
            eg.subgraph.add_edge(su, sv, e.capacity, e.travel_time);
    }
    std::sort(eg.entry_vertices.begin(), eg.entry_vertices.end());
    return eg;
}

NearestExitTable nearest_exit_table(const BuildingGraph& g) {
    int n = g.n_vertices();
    // Pass 1: travel-time distance to the closest exit (multi-source Dijkstra).
    std::vector<long long> dist(n, -1);
    using Item = std::pair<long long, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (int ex : g.exits()) {
        dist[ex] = 0;
        pq.push({0, ex});
    }
    while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d != dist[v]) continue;
        for (auto [w, e] : g.adjacent(v)) {
            long long nd = d + g.edge(e).travel_time;
            if (dist[w] < 0 || nd < dist[w]) {
                dist[w] = nd;
                pq.push({nd, w});
            }
        }
    }

    // Pass 2: in increasing distance order, pick ex(v) = smallest exit id over
    // tight predecessors, then succ(v) = smallest tight neighbor keeping ex(v).
    std::vector<int> order;
    for (int v = 0; v < n; ++v)
        if (dist[v] >= 0) order.push_back(v);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return dist[a] != dist[b] ? dist[a] < dist[b] : a < b; });
    std::vector<int> ex_of(n, -1), succ(n, -1);
    for (int v : order) {
        if (g.is_exit(v) && dist[v] == 0) {
            ex_of[v] = v;
            continue;
        }
        for (auto [w, e] : g.adjacent(v)) {
            if (dist[w] < 0 || dist[w] + g.edge(e).travel_time != dist[v]) continue;
            if (ex_of[v] < 0 || ex_of[w] < ex_of[v]) ex_of[v] = ex_of[w];
        }
        for (auto [w, e] : g.adjacent(v)) {
            if (dist[w] < 0 || dist[w] + g.edge(e).travel_time != dist[v]) continue;
            if (ex_of[w] != ex_of[v]) continue;
            if (succ[v] < 0 || w < succ[v]) succ[v] = w;
        }
    }

    NearestExitTable table;
    table.rows.resize(n);
    for (int v = 0; v < n; ++v) {
        auto& row = table.rows[v];
        if (dist[v] < 0) {
            table.unreachable.push_back(v);
            continue;
        }
        row.exit = ex_of[v];
        row.path.push_back(v);
        row.prefix_time.push_back(0);
        int cur = v;
        while (succ[cur] >= 0) {
            int nxt = succ[cur];
            auto e = g.find_edge(cur, nxt);
            row.prefix_time.push_back(row.prefix_time.back() + g.edge(*e).travel_time);
            row.path.push_back(nxt);
            cur = nxt;
        }
    }
    return table;
}

std::optional<long long> NearestExitTable::prefix_time(int v, int vj) const {
    const Row& row = rows[v];
    for (size_t j = 0; j < row.path.size(); ++j)
        if (row.path[j] == vj) return row.prefix_time[j];
    return std::nullopt;
}

Instance generate_instance(const GenParams& p) {
    if (p.n_vertices < 2) throw GraphError("generator needs at least 2 vertices");
    if (p.edge_factor < 1.0 || p.edge_factor > 3.0)
        throw GraphError("edge_factor must lie in [1.0, 3.0]");
    if (p.n_exits < 1 || p.n_exits >= p.n_vertices)
        throw GraphError("n_exits must lie in [1, n_vertices)");
    if (p.population < 1) throw GraphError("population must be >= 1");

    std::mt19937_64 rng(p.seed);
    // Rejection-sampled bounded draws; keeps instances byte-identical across
    // standard libraries (std distributions are implementation-defined).
    auto draw = [&rng](long long lo, long long hi) -> long long {
        uint64_t span = (uint64_t)(hi - lo + 1);
        uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        uint64_t r;
        do {
            r = rng();
        } while (r >= limit);
        return lo + (long long)(r % span);
    };

    long long m = (long long)std::ceil((double)p.n_vertices * p.edge_factor);
    long long max_edges = (long long)p.n_vertices * (p.n_vertices - 1) / 2;
    if (m > max_edges) m = max_edges;

    const int retries = 32;
    for (int attempt = 0; attempt < retries; ++attempt) {
        Instance inst;
        BuildingGraph& g = inst.graph;

        // exits drawn first so the draw order is stable
        std::vector<int> ids(p.n_vertices);
        for (int i = 0; i < p.n_vertices; ++i) ids[i] = i;
        std::vector<int> exit_ids;
        for (int k = 0; k < p.n_exits; ++k) {
            int j = (int)draw(0, (long long)ids.size() - 1);
            exit_ids.push_back(ids[j]);
            ids.erase(ids.begin() + j);
        }
        std::set<int> exit_set(exit_ids.begin(), exit_ids.end());

        for (int v = 0; v < p.n_vertices; ++v) {
            bool ex = exit_set.count(v) > 0;
            long long cap = ex ? std::max<long long>(p.population, 1)
                               : draw(p.vertex_cap_min, p.vertex_cap_max);
            g.add_vertex("v" + std::to_string(v + 1), cap, ex);
        }

        // random spanning tree, then extra edges up to m
        std::vector<int> order(p.n_vertices);
        for (int i = 0; i < p.n_vertices; ++i) order[i] = i;
        for (int i = p.n_vertices - 1; i > 0; --i)
            std::swap(order[i], order[draw(0, i)]);
        for (int i = 1; i < p.n_vertices; ++i) {
            int j = (int)draw(0, i - 1);
            g.add_edge(order[j], order[i], draw(p.edge_cap_min, p.edge_cap_max),
                       (int)draw(p.d_min, p.d_max));
        }
        long long guard = 0;
        while (g.n_edges() < m && guard < 100 * m) {
            ++guard;
            int u = (int)draw(0, p.n_vertices - 1), v = (int)draw(0, p.n_vertices - 1);
            if (u == v || g.find_edge(u, v)) continue;
            g.add_edge(u, v, draw(p.edge_cap_min, p.edge_cap_max),
                       (int)draw(p.d_min, p.d_max));
        }
        if (g.n_edges() != m) continue;  // dense corner; retry

        // people uniformly on non-exit vertices subject to vertex capacity
        long long total_cap = 0;
        for (int v = 0; v < p.n_vertices; ++v)
            if (!g.is_exit(v)) total_cap += g.vertex_capacity(v);
        if (total_cap < p.population)
            throw GraphError("population " + std::to_string(p.population) +
                             " exceeds total non-exit vertex capacity " +
                             std::to_string(total_cap));
        std::vector<long long> room(p.n_vertices);
        for (int v = 0; v < p.n_vertices; ++v)
            room[v] = g.is_exit(v) ? 0 : g.vertex_capacity(v);
        for (long long i = 0; i < p.population; ++i) {
            int v;
            do {
                v = (int)draw(0, p.n_vertices - 1);
            } while (room[v] == 0);
            --room[v];
            inst.person_names.push_back("p" + std::to_string(i + 1));
            inst.s0.at.push_back(Loc::vertex(v));
        }

        inst.deadline = p.deadline;
        inst.t_max = 2 * p.deadline;
        inst.check();
        return inst;
    }
    throw GraphError("could not generate a connected instance within retry budget");
}

}  // namespace evac
