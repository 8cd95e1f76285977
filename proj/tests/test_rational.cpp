#include <doctest.h>

#include "evac/rational.hpp"

using namespace evac;

TEST_CASE("decimal strings parse exactly") {
    CHECK(rat_from_string("0.4") == Rat(2, 5));
    CHECK(rat_from_string("-0.25") == Rat(-1, 4));
    CHECK(rat_from_string("3") == Rat(3));
    CHECK(rat_from_string("2/5") == Rat(2, 5));
    CHECK(rat_from_string("1e-2") == Rat(1, 100));
    CHECK(rat_from_string("1.5e2") == Rat(150));
    CHECK_THROWS_AS(rat_from_string("abc"), std::invalid_argument);
    CHECK_THROWS_AS(rat_from_string(""), std::invalid_argument);
    CHECK_THROWS_AS(rat_from_string("1/0"), std::invalid_argument);
}

TEST_CASE("doubles resolve to their shortest decimal") {
    CHECK(rat_from_double(0.4) == Rat(2, 5));
    CHECK(rat_from_double(0.7) == Rat(7, 10));
    CHECK(rat_from_double(0.1) == Rat(1, 10));
    CHECK(rat_from_double(2.0) == Rat(2));
    CHECK(rat_from_double(0.5) == Rat(1, 2));
}

TEST_CASE("rational formatting round-trips") {
    CHECK(rat_to_string(Rat(24, 5)) == "4.8");
    CHECK(rat_to_string(Rat(31, 5)) == "6.2");
    CHECK(rat_to_string(Rat(-3, 4)) == "-0.75");
    CHECK(rat_to_string(Rat(7)) == "7");
    CHECK(rat_to_string(Rat(1, 3)) == "1/3");
    CHECK(rat_from_string(rat_to_string(Rat(1, 3))) == Rat(1, 3));
}

TEST_CASE("floor and ceil") {
    CHECK(rat_floor(Rat(7, 2)) == 3);
    CHECK(rat_floor(Rat(-7, 2)) == -4);
    CHECK(rat_ceil(Rat(7, 2)) == 4);
    CHECK(rat_ceil(Rat(-7, 2)) == -3);
    CHECK(rat_floor(Rat(4)) == 4);
}
