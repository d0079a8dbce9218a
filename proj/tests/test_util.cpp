#include "fdkit/error.hpp"
#include "fdkit/util.hpp"

#include <doctest.h>

#include <atomic>
#include <set>
#include <sstream>

using namespace fdk;

TEST_SUITE("util") {

TEST_CASE("rng streams are reproducible and below stays in range") {
    Rng a(7), b(7);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng r(1);
    std::set<std::size_t> seen;
    for (int i = 0; i < 2000; ++i) {
        std::size_t v = r.below(5);
        CHECK(v < 5);
        seen.insert(v);
    }
    CHECK(seen.size() == 5);
    for (int i = 0; i < 1000; ++i) {
        double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("normal draws have roughly unit variance") {
    Rng r(3);
    double s = 0, s2 = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        double x = r.normal();
        s += x;
        s2 += x * x;
    }
    CHECK(std::abs(s / n) < 0.05);
    CHECK(std::abs(s2 / n - 1.0) < 0.05);
}

TEST_CASE("shuffle is a permutation") {
    Rng r(11);
    std::vector<int> v(50);
    for (int i = 0; i < 50; ++i) v[i] = i;
    r.shuffle(v);
    std::set<int> s(v.begin(), v.end());
    CHECK(s.size() == 50);
}

TEST_CASE("csv reader handles quotes, crlf and comment lines") {
    std::istringstream in("# a comment\r\nname,value\r\n\"x,y\",1\r\n\"say \"\"hi\"\"\",2\r\n\"multi\nline\",3\n");
    CsvTable t = read_csv(in);
    REQUIRE(t.header == std::vector<std::string>{"name", "value"});
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0][0] == "x,y");
    CHECK(t.rows[1][0] == "say \"hi\"");
    CHECK(t.rows[2][0] == "multi\nline");
    CHECK(t.column("value") == 1);
    CHECK(t.column("nope") == -1);
    CHECK_THROWS_AS(t.require("nope"), ValidationError);
}

TEST_CASE("csv reader rejects ragged rows") {
    std::istringstream in("a,b\n1,2\n3\n");
    CHECK_THROWS_AS(read_csv(in), ParseError);
}

TEST_CASE("csv_field quotes only when needed and round-trips") {
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("a,b") == "\"a,b\"");
    CHECK(csv_field("q\"") == "\"q\"\"\"");
    std::istringstream in("h\n" + csv_field("x\"y,z") + "\n");
    CHECK(read_csv(in).rows.at(0).at(0) == "x\"y,z");
}

TEST_CASE("number formatting and parsing") {
    CHECK(format_fixed(0.08141, 4) == "0.0814");
    CHECK(format_sig(2.0 / 3.0, 6) == "0.666667");
    CHECK(parse_double(" .1452 ") == doctest::Approx(0.1452));
    CHECK_THROWS_AS(parse_double("1.2x"), ParseError);
    CHECK_THROWS_AS(parse_double(""), ParseError);
    CHECK(parse_int("42") == 42);
    CHECK_THROWS_AS(parse_int("4.2"), ParseError);
    CHECK(split("a,,b", ',') == std::vector<std::string>{"a", "", "b"});
    CHECK(trim("  x \t") == "x");
}

TEST_CASE("parallel_for covers every index once and rethrows") {
    for (unsigned jobs : {1u, 3u}) {
        std::vector<std::atomic<int>> hits(100);
        parallel_for(100, jobs, [&](std::size_t i) { hits[i]++; });
        for (auto& h : hits) CHECK(h.load() == 1);
    }
    CHECK_THROWS_AS(parallel_for(10, 2,
                                 [](std::size_t i) {
                                     if (i == 4) throw ValidationError("boom");
                                 }),
                    ValidationError);
}

TEST_CASE("fnv1a matches the published test vector") {
    CHECK(fnv1a("") == 14695981039346656037ull);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
    CHECK(hex64(0xabcull) == "0000000000000abc");
}

}
