#include <doctest.h>

#include <map>

#include "evac/behavior.hpp"
#include "evac/ilp.hpp"
#include "evac/solver.hpp"
#include "test_util.hpp"

using namespace evac;

namespace {

std::map<int, long long> tag_counts(const IlpModel& model) {
    std::map<int, long long> out;
    for (const LinRow& row : model.rows) ++out[row.tag];
    return out;
}

Instance two_vertex_line() {
    Instance inst;
    int a = inst.graph.add_vertex("a", 3, false);
    int b = inst.graph.add_vertex("b", 9, true);
    inst.graph.add_edge(a, b, 2, 1);
    inst.person_names = {"p1"};
    inst.s0.at = {Loc::vertex(a)};
    inst.t_max = 2;
    inst.deadline = 2;
    inst.behavior = BehaviorSpec::dbm({{0, Rat(1)}});
    return inst;
}

}  // namespace

TEST_CASE("constraint family counts on a hand-enumerable line graph") {
    Instance inst = two_vertex_line();
    ExpandedGraph xg = expand(inst.graph);
    IlpModel model;
    CopyLayout L;
    L.base = 0;
    L.n_v = 2;
    L.n_e = 1;
    L.T = 2;
    for (int i = 0; i < L.size(); ++i) model.add_var({true, Rat(0), std::nullopt});
    build_lpw(model, L, xg);
    auto tags = tag_counts(model);
    // |V| * t_max vertex-conservation rows: 2 * 2 = 4
    CHECK(tags[TagConserveV] == 4);
    CHECK(tags[TagConserveEp] == 2);   // |E| * t_max
    CHECK(tags[TagConserveEpp] == 2);  // d=1: range [0, t_max-1]
    CHECK(tags[TagPinVw] == 0);        // no slow edges
    CHECK(tags[TagPinE] == 2);         // the fast edge, every tick
    CHECK(tags[TagExitMono] == 2);     // one exit, chain of length t_max
    CHECK(tags[TagDwell] == 4);        // vertex departure rows only (no slow edges)
    CHECK(tags[TagFlowSplit] == 8);    // 4 nets x t_max
    build_lps(model, L, xg, 1);
    tags = tag_counts(model);
    CHECK(tags[TagCapEdge] == 3);  // |E| * (t_max + 1)
    CHECK(tags[TagEvacAll] == 1);
    // (9) lands on the vertex occupancy bounds
    for (int v = 0; v < 2; ++v)
        for (int t = 0; t <= 2; ++t)
            CHECK(*model.vars[L.vert(v, t)].ub ==
                  Rat(inst.graph.vertex_capacity(v)));
}

TEST_CASE("slow edges pin the vertex hop and open the lagged row range") {
    BuildingGraph g;
    int a = g.add_vertex("a", 3, false);
    int b = g.add_vertex("b", 9, true);
    g.add_edge(a, b, 2, 3);  // d = 3
    ExpandedGraph xg = expand(g);
    IlpModel model;
    CopyLayout L;
    L.base = 0;
    L.n_v = 2;
    L.n_e = 1;
    L.T = 4;
    for (int i = 0; i < L.size(); ++i) model.add_var({true, Rat(0), std::nullopt});
    build_lpw(model, L, xg);
    auto tags = tag_counts(model);
    CHECK(tags[TagConserveEpp] == 3);  // t in [d-2, t_max-1] = [1,3]
    CHECK(tags[TagPinVw] == 4);
    CHECK(tags[TagPinE] == 0);
    CHECK(tags[TagDwell] == 16);  // vertex rows plus both virtual-node rows

    // d = 2 starts the lagged range at t = 0
    BuildingGraph g2;
    int c = g2.add_vertex("c", 3, false);
    int d = g2.add_vertex("d", 9, true);
    g2.add_edge(c, d, 2, 2);
    ExpandedGraph xg2 = expand(g2);
    IlpModel m2;
    for (int i = 0; i < L.size(); ++i) m2.add_var({true, Rat(0), std::nullopt});
    build_lpw(m2, L, xg2);
    CHECK(tag_counts(m2)[TagConserveEpp] == 4);
}

TEST_CASE("the assembled program pins the initial state and builds the objective") {
    Instance inst = load_fig1();
    IlpModel model = build_ip(inst, 5, 10);
    auto vid = [&](const std::string& n) { return *inst.graph.find_vertex(n); };
    // x_{v,0} pins match the running example's placement
    std::map<int, Rat> pins;
    for (const LinRow& row : model.rows)
        if (row.tag == TagPinInit) {
            REQUIRE(row.terms.size() == 1);
            pins[row.terms[0].var] = row.rhs;
        }
    CHECK(pins[model.x.vert(vid("v1"), 0)] == Rat(1));
    CHECK(pins[model.x.vert(vid("v10"), 0)] == Rat(1));
    CHECK(pins[model.x.vert(vid("v4"), 0)] == Rat(0));
    CHECK(pins[model.x.vert(vid("v5"), 0)] == Rat(0));
    // objective: 0.4 * exit counts of copy 1 + 0.6 * copy 2 at the deadline
    REQUIRE(model.y.size() == 2);
    std::map<int, Rat> obj;
    for (const LinTerm& t : model.objective) obj[t.var] += t.coef;
    CHECK(obj[model.y[0].vert(vid("v4"), 5)] == Rat(2, 5));
    CHECK(obj[model.y[0].vert(vid("v7"), 5)] == Rat(2, 5));
    CHECK(obj[model.y[1].vert(vid("v7"), 5)] == Rat(3, 5));
    CHECK((int)obj.size() == 4);
    CHECK(model.deadline == 5);
    CHECK_THROWS_AS(build_ip(inst, 11, 10), std::invalid_argument);
    Instance empty = inst;
    empty.behavior.reset();
    CHECK_THROWS_AS(build_ip(empty, 5, 10), std::invalid_argument);
}

TEST_CASE("the soft flag drops exactly the full-evacuation row") {
    Instance inst = load_fig1();
    IlpModel hard = build_ip(inst, 5, 10);
    BuildOptions opts;
    opts.soft = true;
    IlpModel soft = build_ip(inst, 5, 10, opts);
    CHECK(tag_counts(hard)[TagEvacAll] == 1);
    CHECK(tag_counts(soft)[TagEvacAll] == 0);
    CHECK(hard.rows.size() == soft.rows.size() + 1);
}

TEST_CASE("single exit vertex with one resident is already evacuated") {
    Instance inst;
    inst.graph.add_vertex("only", 5, true);
    inst.person_names = {"p1"};
    inst.s0.at = {Loc::vertex(0)};
    inst.t_max = 3;
    inst.deadline = 1;
    inst.behavior = BehaviorSpec::dbm({{0, Rat(1)}});
    for (int d = 0; d <= 3; ++d) {
        IlpModel model = build_ip(inst, d, 3);
        SolveStatus st = solve_mip(model);
        REQUIRE(st.optimal());
        CHECK(*st.objective == Rat(1));
    }
}

TEST_CASE("strong schedules satisfy the assembled constraint system") {
    Instance inst = load_fig1();
    ExpandedGraph xg = expand(inst.graph);
    IlpModel model = build_ip(inst, 5, 10);
    Schedule es = load_fig1_schedule(inst, "es_table4.json");
    REQUIRE(validate_strong(es, inst.graph).ok);
    FlowOccupancy occ = occupancy_of(es, xg);
    std::vector<Rat> a(model.n_vars(), Rat(0));
    fill_x_assignment(model, occ, a);
    // complete the assignment: realized copies and probability bindings
    auto realized = realize(*inst.behavior, es, inst.graph, inst.s0);
    for (size_t i = 0; i < realized.size(); ++i) {
        FlowOccupancy ro = occupancy_of(realized[i].first, xg);
        std::vector<Rat> tmp(model.n_vars(), Rat(0));
        fill_x_assignment(model, ro, tmp);
        for (int k = 0; k < model.y[i].size(); ++k)
            a[model.y[i].base + k] = tmp[model.x.base + k];
        a[model.z_vars[i]] = realized[i].second;
    }
    auto bad = check_assignment(model, a, true);
    if (bad) FAIL(*bad);
}
