#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "covers/csv.hpp"
#include "covers/relation.hpp"
#include "fixtures.hpp"

using namespace covers;
using fixtures::rel;

TEST_CASE("project drops duplicates and keeps requested order") {
    Relation q = fixtures::fig1_result();
    Relation p = project(q, {"A", "B"});
    REQUIRE(p.size() == 4);
    REQUIRE(p.same_rows(rel({"A", "B"}, {{"a1", "b1"}, {"a1", "b2"}, {"a2", "b1"}, {"a2", "b2"}})));

    // identity projection over the full schema
    REQUIRE(project(q, q.schema().attrs()).same_rows(q));

    Relation r2 = fixtures::fig1_db().at("R2");
    REQUIRE(project(r2, {"B"}).same_rows(rel({"B"}, {{"b1"}, {"b2"}, {"b3"}, {"b4"}})));

    REQUIRE_THROWS_AS(project(q, {"Z"}), UnknownAttributeError);
}

TEST_CASE("projection composes: pi_a2 of pi_a1 equals pi_a2 when a2 in a1") {
    Relation q = fixtures::fig1_result();
    Relation once = project(q, {"B", "C"});
    Relation twice = project(project(q, {"B", "C", "D"}), {"B", "C"});
    REQUIRE(once.same_rows(twice));
}

TEST_CASE("brute-force join reproduces the Figure 1 result") {
    auto db = fixtures::fig1_db();
    Relation j = natural_join_bruteforce({db.at("R1"), db.at("R2"), db.at("R3")});
    REQUIRE(j.size() == 8);
    REQUIRE(j.same_rows(fixtures::fig1_result()));
}

TEST_CASE("join of a relation with itself is the relation") {
    Relation r = fixtures::fig1_db().at("R1");
    REQUIRE(natural_join_bruteforce({r, r}).same_rows(r));
}

TEST_CASE("product join of [2] x [3] has 6 rows") {
    Relation r1 = fixtures::unary("A", "x", 2);
    Relation r2 = fixtures::unary("B", "y", 3);
    REQUIRE(natural_join_bruteforce({r1, r2}).size() == 6);
}

TEST_CASE("brute-force join is commutative and associative on random instances") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> dom(1, 4);
    auto random_rel = [&](std::vector<std::string> attrs) {
        std::vector<Row> rows;
        int n = 1 + static_cast<int>(rng() % 12);
        for (int i = 0; i < n; ++i) {
            Row r;
            for (size_t c = 0; c < attrs.size(); ++c) r.push_back("v" + std::to_string(dom(rng)));
            rows.push_back(std::move(r));
        }
        return rel(attrs, rows);
    };
    for (int trial = 0; trial < 30; ++trial) {
        Relation a = random_rel({"A", "B"});
        Relation b = random_rel({"B", "C"});
        Relation c = random_rel({"C", "D"});
        Relation abc = natural_join_bruteforce({a, b, c});
        REQUIRE(abc.same_rows(natural_join_bruteforce({c, a, b})));
        REQUIRE(abc.same_rows(natural_join_bruteforce(
            {natural_join_bruteforce({b, c}), a})));
    }
}

TEST_CASE("semi-join reduction matches the Figure 1 calibration") {
    auto db = fixtures::fig1_db();
    Relation r2c = semi_join_reduce(semi_join_reduce(db.at("R2"), db.at("R1")), db.at("R3"));
    Relation r1c = semi_join_reduce(db.at("R1"), r2c);
    REQUIRE(r1c.size() == 4);
    REQUIRE_FALSE(r1c.contains({"a1", "b3"}));

    SECTION("disjoint schemas leave the left side untouched") {
        Relation s = fixtures::unary("Z", "z", 2);
        REQUIRE(semi_join_reduce(db.at("R1"), s).same_rows(db.at("R1")));
    }
    SECTION("empty right side with shared attributes empties the left") {
        Relation empty = rel({"B", "C"}, {});
        REQUIRE(semi_join_reduce(db.at("R1"), empty).empty());
    }
    SECTION("reduction is idempotent and shrinking") {
        Relation once = semi_join_reduce(db.at("R1"), db.at("R2"));
        REQUIRE(once.subset_of(db.at("R1")));
        REQUIRE(semi_join_reduce(once, db.at("R2")).same_rows(once));
    }
}

TEST_CASE("consistency checks") {
    auto db = fixtures::fig1_db();
    REQUIRE_FALSE(is_consistent(db.at("R1"), db.at("R2")));
    REQUIRE(is_consistent(db.at("R1"), db.at("R1")));

    Relation r1c = rel({"A", "B"}, {{"a1", "b1"}, {"a1", "b2"}, {"a2", "b1"}, {"a2", "b2"}});
    Relation r2c = rel({"B", "C"}, {{"b1", "c1"}, {"b2", "c2"}});
    REQUIRE(is_consistent(r1c, r2c));
}

TEST_CASE("csv round trip preserves row sets bit-exactly") {
    Relation r = rel({"A", "B"}, {{"comma,value", "plain"},
                                  {"quote\"value", "x"},
                                  {"", "empty-left"}});
    std::string text = write_relation_csv(r);
    CsvTable t = parse_csv(text);
    Relation back(Schema{t.header}, t.rows);
    REQUIRE(back.same_rows(r));
    REQUIRE(write_relation_csv(back) == text);
}

TEST_CASE("csv loader rejects malformed input") {
    REQUIRE_THROWS_AS(parse_csv("A,B\n1,2,3\n"), ParseError);
    REQUIRE_THROWS_AS(parse_csv("A,B\n\"unterminated\n"), ParseError);
}

TEST_CASE("trailing newline is optional") {
    CsvTable with = parse_csv("A,B\nx,y\n");
    CsvTable without = parse_csv("A,B\nx,y");
    REQUIRE(with.rows == without.rows);
    REQUIRE(parse_csv("A,B").rows.empty());
}

TEST_CASE("duplicate rows are silently deduplicated at load") {
    CsvTable t = parse_csv("A,B\nx,y\nx,y\nz,w\n");
    Relation r(Schema{t.header}, t.rows);
    REQUIRE(r.size() == 2);
}

TEST_CASE("resorting records the key and keeps the row set") {
    Relation r = fixtures::fig1_db().at("R1");
    Relation by_b = r.sorted_by({"B"});
    REQUIRE(by_b.sort_key().front() == r.schema().index_of("B"));
    REQUIRE(by_b.same_rows(r));
    REQUIRE(by_b.rows().front() == Row{"a1", "b1"});
    Row prev;
    for (const auto& row : by_b.rows()) {
        if (!prev.empty()) REQUIRE(prev[1] <= row[1]);
        prev = row;
    }
}
