#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "evac/harness.hpp"
#include "test_util.hpp"

using namespace evac;

TEST_CASE("empty bench config yields only the header") {
    BenchConfig cfg;
    cfg.sizes = {};
    auto rows = run_bench(cfg, false);
    CHECK(rows.empty());
    CHECK(bench_csv_header().substr(0, 11) == "instance_id");
}

TEST_CASE("bench rows are reproducible apart from wall times") {
    BenchConfig cfg;
    cfg.sizes = {8};
    cfg.per_size = 2;
    cfg.pop_min = 4;
    cfg.pop_max = 8;
    cfg.cutoff_seconds = 30;
    cfg.sub_limit_seconds = 10;
    auto a = run_bench(cfg, false);
    auto b = run_bench(cfg, false);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].instance_id == b[i].instance_id);
        CHECK(a[i].method == b[i].method);
        CHECK(a[i].status == b[i].status);
        CHECK(a[i].expected_value == b[i].expected_value);
        CHECK(a[i].evacuated_at_d == b[i].evacuated_at_d);
        CHECK(a[i].quality_ratio == b[i].quality_ratio);
    }
    // the heuristic never reports more than the proven optimum
    for (size_t i = 0; i + 1 < a.size(); i += 2) {
        if (a[i].status != "optimal" || a[i + 1].status != "done") continue;
        Rat ip = rat_from_string(a[i].expected_value);
        Rat ev = rat_from_string(a[i + 1].expected_value);
        CHECK(ev <= ip);
        if (!a[i + 1].quality_ratio.empty())
            CHECK(rat_from_string(a[i + 1].quality_ratio) == (ip == 0 ? Rat(1) : ev / ip));
    }
}

TEST_CASE("cli validates the fixture schedules") {
    CHECK(cli_main({"validate", fixture_path("fig1.json"), fixture_path("es_table4.json")}) ==
          0);
    CHECK(cli_main({"validate", fixture_path("fig1.json"),
                    fixture_path("wes1_table1.json")}) == 4);
    CHECK(cli_main({"validate", fixture_path("fig1.json"),
                    fixture_path("wes1_table1.json"), "--weak-only"}) == 0);
    CHECK(cli_main({"validate", "/nonexistent.json", fixture_path("es_table4.json")}) == 3);
    CHECK(cli_main({"nonsense"}) == 2);
}

TEST_CASE("cli gen is deterministic and plan-evac solves it") {
    std::string inst1 = "/tmp/evac_test_gen1.json";
    std::string inst2 = "/tmp/evac_test_gen2.json";
    CHECK(cli_main({"gen", "--nodes", "10", "--people", "6", "--deadline", "8", "--seed",
                    "7", "--d-max", "2", "--out", inst1}) == 0);
    CHECK(cli_main({"gen", "--nodes", "10", "--people", "6", "--deadline", "8", "--seed",
                    "7", "--d-max", "2", "--out", inst2}) == 0);
    std::ifstream f1(inst1), f2(inst2);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
    CHECK(cli_main({"plan-evac", inst1, "--gamma", "1.0", "--out",
                    "/tmp/evac_test_sched.json"}) == 0);
    CHECK(cli_main({"validate", inst1, "/tmp/evac_test_sched.json", "--weak-only"}) == 0);
    std::remove(inst1.c_str());
    std::remove(inst2.c_str());
    std::remove("/tmp/evac_test_sched.json");
}
