#pragma once

// Shared in-memory instances used across the test suites. fig1/fig4 are the
// running path-query databases; builders for products and small random
// instances live here too.

#include <random>
#include <string>
#include <vector>

#include "covers/decomposition.hpp"
#include "covers/materialize.hpp"
#include "covers/relation.hpp"

namespace fixtures {

using covers::Database;
using covers::JoinQuery;
using covers::Relation;
using covers::Row;
using covers::Schema;

inline Relation rel(std::vector<std::string> attrs, std::vector<Row> rows) {
    return Relation(Schema{std::move(attrs)}, std::move(rows));
}

// Path query R1(A,B) |><| R2(B,C) |><| R3(C,D) with dangling tuples.
inline JoinQuery fig1_query() {
    JoinQuery q;
    q.atoms.push_back({"R1", Schema{{"A", "B"}}});
    q.atoms.push_back({"R2", Schema{{"B", "C"}}});
    q.atoms.push_back({"R3", Schema{{"C", "D"}}});
    return q;
}

inline Database fig1_db() {
    Database db;
    db.emplace("R1", rel({"A", "B"}, {{"a1", "b1"},
                                      {"a1", "b2"},
                                      {"a2", "b1"},
                                      {"a2", "b2"},
                                      {"a1", "b3"}}));
    db.emplace("R2", rel({"B", "C"}, {{"b1", "c1"}, {"b2", "c2"}, {"b3", "c3"}, {"b4", "c4"}}));
    db.emplace("R3", rel({"C", "D"}, {{"c1", "d1"},
                                      {"c1", "d2"},
                                      {"c2", "d1"},
                                      {"c2", "d2"},
                                      {"c4", "d1"}}));
    return db;
}

inline Relation fig1_result() {
    return rel({"A", "B", "C", "D"}, {{"a1", "b1", "c1", "d1"},
                                      {"a1", "b1", "c1", "d2"},
                                      {"a2", "b1", "c1", "d1"},
                                      {"a2", "b1", "c1", "d2"},
                                      {"a1", "b2", "c2", "d2"},
                                      {"a1", "b2", "c2", "d1"},
                                      {"a2", "b2", "c2", "d2"},
                                      {"a2", "b2", "c2", "d1"}});
}

inline Relation fig1_rel_m() {
    return rel({"A", "B", "C", "D"}, {{"a1", "b1", "c1", "d1"},
                                      {"a2", "b1", "c1", "d2"},
                                      {"a1", "b2", "c2", "d1"},
                                      {"a2", "b2", "c2", "d2"}});
}

inline covers::Decomposition fig1_decomposition() {
    covers::Decomposition t;
    t.bag_ids = {"R1", "R2", "R3"};
    t.bags = {{"A", "B"}, {"B", "C"}, {"C", "D"}};
    t.tree_edges = {{0, 1}, {1, 2}};
    t.root = 0;
    return covers::analyze_decomposition(fig1_query(), t);
}

// Product query R1(A) |><| R2(B) with |R1| = m, |R2| = n.
inline JoinQuery product_query_2() {
    JoinQuery q;
    q.atoms.push_back({"R1", Schema{{"A"}}});
    q.atoms.push_back({"R2", Schema{{"B"}}});
    return q;
}

inline Relation unary(const std::string& attr, const std::string& prefix, int n) {
    std::vector<Row> rows;
    for (int i = 1; i <= n; ++i) rows.push_back({prefix + std::to_string(i)});
    return rel({attr}, rows);
}

// Fig 4 (d-representation appendix): path query data whose result factorizes.
inline Database fig4_db() {
    Database db;
    db.emplace("R1", rel({"A", "B"}, {{"a1", "b1"}, {"a2", "b1"}, {"a3", "b2"}, {"a4", "b2"}}));
    db.emplace("R2", rel({"B", "C"}, {{"b1", "c1"}, {"b2", "c1"}}));
    db.emplace("R3", rel({"C", "D"}, {{"c1", "d1"}, {"c1", "d2"}}));
    return db;
}

inline covers::Decomposition fig4_decomposition() {
    covers::Decomposition t;
    t.bag_ids = {"t1", "t2", "t3", "t4"};
    t.bags = {{"B"}, {"A", "B"}, {"B", "C"}, {"C", "D"}};
    t.tree_edges = {{0, 1}, {0, 2}, {2, 3}};
    t.root = 0;
    return covers::analyze_decomposition(fig1_query(), t);
}

inline Relation fig4_cover() {
    return rel({"A", "B", "C", "D"}, {{"a1", "b1", "c1", "d1"},
                                      {"a2", "b1", "c1", "d1"},
                                      {"a3", "b2", "c1", "d2"},
                                      {"a4", "b2", "c1", "d2"}});
}

// Random consistent pair of binary relations sharing one attribute.
struct RandomPair {
    Relation r1, r2;
};

inline RandomPair random_consistent_pair(std::mt19937_64& rng, int max_rows = 50) {
    std::uniform_int_distribution<int> rowc(1, max_rows);
    std::uniform_int_distribution<int> dom(1, 8);
    auto make = [&](const std::string& a1, const std::string& a2, const std::string& p1,
                    const std::string& p2) {
        std::vector<Row> rows;
        int n = rowc(rng);
        for (int i = 0; i < n; ++i)
            rows.push_back({p1 + std::to_string(dom(rng)), p2 + std::to_string(dom(rng))});
        return rel({a1, a2}, rows);
    };
    Relation r1 = make("A", "B", "a", "b");
    Relation r2 = make("B", "C", "b", "c");
    // calibrate to consistency
    for (int pass = 0; pass < 3; ++pass) {
        r1 = covers::semi_join_reduce(r1, r2);
        r2 = covers::semi_join_reduce(r2, r1);
    }
    return {r1, r2};
}

inline std::string fixture_path(const std::string& name) {
    return std::string(FIXTURE_DIR) + "/" + name;
}

} // namespace fixtures
