#include "doctest.h"
#include "netmom/csv.hpp"
#include "netmom/dates.hpp"
#include "netmom/errors.hpp"

using namespace netmom;

TEST_SUITE_BEGIN("dates");

TEST_CASE("iso round trip and ordering") {
    Date d = parse_date("2024-02-29");
    CHECK(d.iso() == "2024-02-29");
    CHECK(parse_date("2024-03-01") > d);
    CHECK(Date::from_serial(d.serial()) == d);
}

TEST_CASE("weekday and trading day stepping") {
    // 2024-06-14 is a Friday.
    Date fri = parse_date("2024-06-14");
    CHECK(fri.weekday() == 4);
    CHECK(fri.next_trading_day() == parse_date("2024-06-17"));
}

TEST_CASE("malformed dates are rejected") {
    CHECK_THROWS_AS(parse_date("2024/01/01"), DataError);
    CHECK_THROWS_AS(parse_date("2024-13-01"), DataError);
    CHECK_THROWS_AS(parse_date("2023-02-29"), DataError);
    CHECK_THROWS_AS(parse_date("not-a-date"), DataError);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("csv");

TEST_CASE("parse with header, blanks and comments") {
    auto t = csv::parse("a,b\n\n# note\n1, 2\n3,4\n", "mem");
    REQUIRE(t.header.size() == 2);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1] == "2");
    CHECK(t.line_numbers[0] == 4);
    CHECK(t.require_column("b") == 1);
    CHECK(t.column("missing") == -1);
    CHECK_THROWS_AS(t.require_column("missing"), DataError);
}

TEST_CASE("field count mismatch carries the line number") {
    CHECK_THROWS_WITH_AS(csv::parse("a,b\n1\n", "mem"),
                         doctest::Contains("mem:2"), DataError);
}

TEST_CASE("locale independent numeric parsing") {
    CHECK(csv::parse_double("1.5", "ctx") == 1.5);
    CHECK(csv::parse_double("-2e3", "ctx") == -2000.0);
    CHECK_THROWS_AS(csv::parse_double("1,5", "ctx"), DataError);
    CHECK_THROWS_AS(csv::parse_double("abc", "ctx"), DataError);
    CHECK_THROWS_AS(csv::parse_double("nan", "ctx"), DataError);
}

TEST_CASE("format round trips doubles") {
    for (double v : {0.1, 1.0 / 3.0, 1e-17, 123456.789, -0.0}) {
        CHECK(csv::parse_double(csv::format_double(v), "ctx") == v);
    }
}

TEST_SUITE_END();
