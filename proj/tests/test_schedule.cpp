#include <doctest.h>

#include <random>

#include "evac/behavior.hpp"
#include "evac/ilp.hpp"
#include "evac/schedule.hpp"
#include "test_util.hpp"

using namespace evac;

TEST_CASE("running-example schedules validate as in the worked examples") {
    Instance inst = load_fig1();
    Schedule wes1 = load_fig1_schedule(inst, "wes1_table1.json");
    Schedule wes2 = load_fig1_schedule(inst, "wes2_table2.json");
    Schedule es = load_fig1_schedule(inst, "es_table4.json");

    CHECK(validate_weak(wes1, inst.graph).ok);
    CHECK(validate_weak(wes2, inst.graph).ok);
    CHECK(validate_weak(es, inst.graph).ok);

    // capacity violations do not break weakness, but they break strength
    ValidationReport s1 = validate_strong(wes1, inst.graph);
    CHECK(!s1.ok);
    CHECK(s1.message == "3 persons on edge v10-v7 between t=1 and t=2, capacity 2");

    ValidationReport s2 = validate_strong(wes2, inst.graph);
    CHECK(!s2.ok);
    CHECK(s2.condition == 7);  // p1 ends at v9, not an exit

    CHECK(validate_strong(es, inst.graph).ok);

    // the all-stationary schedule is a weak schedule
    Schedule stay;
    stay.horizon = inst.t_max;
    stay.at.assign(inst.n_people(), {});
    for (int p = 0; p < inst.n_people(); ++p)
        stay.at[p].assign(inst.t_max + 1, inst.s0.at[p]);
    CHECK(validate_weak(stay, inst.graph).ok);
}

TEST_CASE("movement violations are reported with the broken condition") {
    Instance inst = load_fig1();
    Schedule es = load_fig1_schedule(inst, "es_table4.json");
    // jump two rooms in one tick
    Schedule bad = es;
    int v1 = *inst.graph.find_vertex("v1");
    int v3 = *inst.graph.find_vertex("v3");
    bad.at[0][1] = Loc::vertex(v3);
    (void)v1;
    ValidationReport r = validate_weak(bad, inst.graph);
    CHECK(!r.ok);
    CHECK(r.condition == 1);
    CHECK(r.person == 0);

    // crossing a travel-time-2 edge in one tick breaks the timing condition
    Schedule fast = es;
    int v5 = *inst.graph.find_vertex("v5");
    fast.at[0][1] = Loc::vertex(v5);
    fast.at[0][2] = Loc::vertex(v5);
    ValidationReport r2 = validate_weak(fast, inst.graph);
    CHECK(!r2.ok);
    CHECK(r2.condition == 3);

    // leaving an exit
    Schedule leave = es;
    int v7 = *inst.graph.find_vertex("v7");
    int v10 = *inst.graph.find_vertex("v10");
    (void)v7;
    leave.at[6][2] = Loc::vertex(v10);
    ValidationReport r3 = validate_weak(leave, inst.graph);
    CHECK(!r3.ok);
    CHECK(r3.condition == 4);
}

TEST_CASE("evacuation counts match the paper's running numbers") {
    Instance inst = load_fig1();
    Schedule wes1 = load_fig1_schedule(inst, "wes1_table1.json");
    Schedule wes2 = load_fig1_schedule(inst, "wes2_table2.json");
    Schedule es = load_fig1_schedule(inst, "es_table4.json");

    CHECK(count_evacuated(wes1, inst.graph, 3) == 4);
    CHECK(count_evacuated(wes2, inst.graph, 3) == 5);
    CHECK(count_evacuated(es, inst.graph, 3) == 5);
    CHECK(count_evacuated(wes1, inst.graph, 4) == 7);
    CHECK(count_evacuated(wes2, inst.graph, 4) == 6);
    CHECK(count_evacuated(es, inst.graph, 4) == 7);
    CHECK(count_evacuated(es, inst.graph, 0) == 0);
    CHECK_THROWS_AS(count_evacuated(es, inst.graph, 11), std::invalid_argument);

    // non-decreasing in the deadline (absorbing exits)
    for (const Schedule* s : {&wes1, &wes2, &es})
        for (int d = 0; d < inst.t_max; ++d)
            CHECK(count_evacuated(*s, inst.graph, d) <=
                  count_evacuated(*s, inst.graph, d + 1));
}

TEST_CASE("expected evacuees under the two-schedule pdf, bit exact") {
    Instance inst = load_fig1();
    Schedule wes1 = load_fig1_schedule(inst, "wes1_table1.json");
    Schedule wes2 = load_fig1_schedule(inst, "wes2_table2.json");
    Schedule es = load_fig1_schedule(inst, "es_table4.json");

    std::vector<std::pair<Schedule, Rat>> omega = {{wes1, Rat(1, 5)}, {wes2, Rat(4, 5)}};
    CHECK(expected_evacuated(omega, inst.graph, 3) == Rat(24, 5));  // 4.8
    CHECK(expected_evacuated(omega, inst.graph, 4) == Rat(31, 5));  // 6.2

    // degenerate point mass equals the plain count
    std::vector<std::pair<Schedule, Rat>> point = {{es, Rat(1)}};
    for (int d = 0; d <= inst.t_max; ++d)
        CHECK(expected_evacuated(point, inst.graph, d) ==
              Rat(count_evacuated(es, inst.graph, d)));

    std::vector<std::pair<Schedule, Rat>> badmass = {{wes1, Rat(1, 5)}, {wes2, Rat(1, 5)}};
    CHECK_THROWS_AS(expected_evacuated(badmass, inst.graph, 3), std::invalid_argument);
}

TEST_CASE("delays hold everyone then replay") {
    Instance inst = load_fig1();
    Schedule es = load_fig1_schedule(inst, "es_table4.json");

    Schedule same = delay_schedule(es, 0);
    for (int p = 0; p < es.n_people(); ++p) CHECK(same.at[p] == es.at[p]);

    Schedule d2 = delay_schedule(es, 2);
    for (int p = 0; p < es.n_people(); ++p) {
        CHECK(d2.at[p][1] == es.at[p][0]);
        CHECK(d2.at[p][6] == es.at[p][4]);
    }
    CHECK(validate_weak(d2, inst.graph).ok);

    // composition within the horizon
    Schedule d5a = delay_schedule(delay_schedule(es, 2), 3);
    Schedule d5b = delay_schedule(es, 5);
    for (int p = 0; p < es.n_people(); ++p) CHECK(d5a.at[p] == d5b.at[p]);
}

TEST_CASE("occupancy attribution on the running example") {
    Instance inst = load_fig1();
    ExpandedGraph xg = expand(inst.graph);
    Schedule wes1 = load_fig1_schedule(inst, "wes1_table1.json");
    Schedule es = load_fig1_schedule(inst, "es_table4.json");

    FlowOccupancy o1 = occupancy_of(wes1, xg);
    int e15 = *inst.graph.find_edge(*inst.graph.find_vertex("v1"),
                                    *inst.graph.find_vertex("v5"));
    CHECK(o1.ep[e15][1] == 1);  // p1 in transit sits on the first virtual node
    CHECK(o1.epp[e15][1] == 0);

    FlowOccupancy oe = occupancy_of(es, xg);
    int v7 = *inst.graph.find_vertex("v7");
    int v4 = *inst.graph.find_vertex("v4");
    CHECK(oe.vert[v7][4] == 5);
    CHECK(oe.vert[v4][4] == 2);

    // conservation at every tick
    for (int t = 0; t <= inst.t_max; ++t) {
        CHECK(o1.total_count(inst.graph, t) == 7);
        CHECK(oe.total_count(inst.graph, t) == 7);
    }

    // empty population
    Schedule none;
    none.horizon = 3;
    State s0;
    FlowOccupancy on = occupancy_of(none, xg);
    (void)s0;
    for (int v = 0; v < inst.graph.n_vertices(); ++v)
        for (int t = 0; t <= 3; ++t) CHECK(on.vert[v][t] == 0);
}

TEST_CASE("occupancies satisfy the weak constraint rows") {
    Instance inst = load_fig1();
    ExpandedGraph xg = expand(inst.graph);
    IlpModel model = build_ip(inst, inst.deadline, inst.t_max);
    for (const char* file : {"wes1_table1.json", "wes2_table2.json", "es_table4.json"}) {
        Schedule es = load_fig1_schedule(inst, file);
        FlowOccupancy occ = occupancy_of(es, xg);
        std::vector<Rat> a(model.n_vars(), Rat(0));
        fill_x_assignment(model, occ, a);
        // check only the weak rows over the X copy
        for (const LinRow& row : model.rows) {
            bool xrow = true;
            for (const LinTerm& t : row.terms)
                if (t.var >= model.x.size()) xrow = false;
            if (!xrow) continue;
            if (row.tag != TagConserveV && row.tag != TagConserveEp &&
                row.tag != TagConserveEpp && row.tag != TagPinVw && row.tag != TagPinE &&
                row.tag != TagExitMono && row.tag != TagDwell && row.tag != TagPinInert)
                continue;
            Rat lhs = 0;
            for (const LinTerm& t : row.terms) lhs += t.coef * a[t.var];
            bool ok = row.rel == Rel::Eq ? lhs == row.rhs
                      : row.rel == Rel::Le ? lhs <= row.rhs
                                           : lhs >= row.rhs;
            CHECK(ok);
        }
    }
}

TEST_CASE("decompose round-trips occupancies") {
    Instance inst = load_fig1();
    ExpandedGraph xg = expand(inst.graph);
    Schedule es = load_fig1_schedule(inst, "es_table4.json");
    FlowOccupancy occ = occupancy_of(es, xg);
    Schedule back = decompose(occ, inst.s0, xg);
    CHECK(validate_weak(back, inst.graph).ok);
    FlowOccupancy occ2 = occupancy_of(back, xg);
    CHECK(occ.vert == occ2.vert);
    CHECK(occ.ep == occ2.ep);
    CHECK(occ.epp == occ2.epp);

    // corrupting one count must be rejected
    FlowOccupancy bad = occ;
    bad.vert[0][2] += 1;
    CHECK_THROWS_AS(decompose(bad, inst.s0, xg), std::invalid_argument);
}

TEST_CASE("single straight-line occupancy decomposes uniquely") {
    BuildingGraph g;
    int a = g.add_vertex("a", 5, false);
    int b = g.add_vertex("b", 5, true);
    g.add_edge(a, b, 3, 2);
    ExpandedGraph xg = expand(g);
    Schedule es;
    es.horizon = 3;
    es.at = {{Loc::vertex(a), Loc::edge(0), Loc::vertex(b), Loc::vertex(b)}};
    State s0;
    s0.at = {Loc::vertex(a)};
    FlowOccupancy occ = occupancy_of(es, xg);
    Schedule back = decompose(occ, s0, xg);
    CHECK(back.at[0] == es.at[0]);
}

TEST_CASE("random weak walks round-trip through occupancy and decompose") {
    GenParams gp;
    gp.n_vertices = 7;
    gp.edge_factor = 1.6;
    gp.n_exits = 1;
    gp.population = 4;
    gp.deadline = 5;
    gp.d_max = 2;
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        gp.seed = 1000 + trial;
        Instance inst = generate_instance(gp);
        ExpandedGraph xg = expand(inst.graph);
        // random legal walk; people never linger on travel-time-1 edges
        Schedule es;
        es.horizon = inst.t_max;
        es.at.assign(inst.n_people(), {});
        for (int p = 0; p < inst.n_people(); ++p) {
            std::vector<Loc> path{inst.s0.at[p]};
            for (int t = 0; t < inst.t_max; ++t) {
                const Loc& cur = path.back();
                std::vector<Loc> options{cur};
                if (cur.is_vertex() && !inst.graph.is_exit(cur.id)) {
                    for (auto [w, e] : inst.graph.adjacent(cur.id)) {
                        if (inst.graph.edge(e).travel_time == 1)
                            options.push_back(Loc::vertex(w));
                        else
                            options.push_back(Loc::edge(e));
                    }
                } else if (cur.is_edge()) {
                    // on a slow edge: may exit only respecting the travel time
                    int a = (int)path.size() - 1;
                    while (a > 0 && path[a - 1] == cur) --a;
                    int entered = a;
                    int elapsed = t + 1 - (entered - 1);
                    const EdgeRec& er = inst.graph.edge(cur.id);
                    if (entered == 0 || elapsed >= er.travel_time) {
                        options.push_back(Loc::vertex(er.u));
                        options.push_back(Loc::vertex(er.v));
                    } else if (entered > 0) {
                        options.push_back(path[entered - 1]);  // retreat
                    }
                }
                path.push_back(options[rng() % options.size()]);
            }
            es.at[p] = std::move(path);
        }
        REQUIRE(validate_weak(es, inst.graph).ok);
        FlowOccupancy occ = occupancy_of(es, xg);
        Schedule back = decompose(occ, inst.s0, xg);
        CHECK(validate_weak(back, inst.graph).ok);
        FlowOccupancy occ2 = occupancy_of(back, xg);
        CHECK(occ.vert == occ2.vert);
        CHECK(occ.ep == occ2.ep);
        CHECK(occ.epp == occ2.epp);
    }
}
