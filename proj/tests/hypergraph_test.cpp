#include <catch2/catch_amalgamated.hpp>

#include "covers/hypergraph.hpp"
#include "fixtures.hpp"

using namespace covers;
using fixtures::rel;

namespace {

Hypergraph triangle() {
    JoinQuery q;
    q.atoms.push_back({"R1", Schema{{"A", "B"}}});
    q.atoms.push_back({"R2", Schema{{"B", "C"}}});
    q.atoms.push_back({"R3", Schema{{"A", "C"}}});
    return query_hypergraph(q);
}

Hypergraph complete_bipartite(int m, int n) {
    Hypergraph h;
    for (int i = 0; i < m; ++i) h.add_node("l" + std::to_string(i));
    for (int j = 0; j < n; ++j) h.add_node("r" + std::to_string(j));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) h.add_edge("e", {i, m + j});
    return h;
}

} // namespace

TEST_CASE("query hypergraph shapes") {
    Hypergraph path = query_hypergraph(fixtures::fig1_query());
    REQUIRE(path.nodes.size() == 4);
    REQUIRE(path.edges.size() == 3);

    JoinQuery single;
    single.atoms.push_back({"R", Schema{{"A"}}});
    Hypergraph h = query_hypergraph(single);
    REQUIRE(h.nodes.size() == 1);
    REQUIRE(h.edges.size() == 1);

    Hypergraph tri = triangle();
    REQUIRE(tri.nodes.size() == 3);
    REQUIRE(tri.edges.size() == 3);
}

TEST_CASE("result hypergraph of the Figure 1 result") {
    ResultHypergraph rh = result_hypergraph(
        fixtures::fig1_result(), {{"A", "B"}, {"B", "C"}, {"C", "D"}});
    // distinct projections: 4 on {A,B}, 2 on {B,C}, 4 on {C,D}
    REQUIRE(rh.base.nodes.size() == 10);
    REQUIRE(rh.base.edges.size() == 8);

    SECTION("single row relation gives one edge over all nodes") {
        ResultHypergraph one = result_hypergraph(rel({"A", "B"}, {{"x", "y"}}), {{"A"}, {"B"}});
        REQUIRE(one.base.edges.size() == 1);
        REQUIRE(one.base.edges[0].node_ids.size() == 2);
    }
    SECTION("2x2 product result over singletons is K22") {
        Relation prod = natural_join_bruteforce(
            {fixtures::unary("A", "a", 2), fixtures::unary("B", "b", 2)});
        ResultHypergraph k22 = result_hypergraph(prod, {{"A"}, {"B"}});
        REQUIRE(k22.base.nodes.size() == 4);
        REQUIRE(k22.base.edges.size() == 4);
    }
    SECTION("attribute sets must cover the schema") {
        REQUIRE_THROWS_AS(result_hypergraph(fixtures::fig1_result(), {{"A", "B"}}),
                          SchemaNotCoveredError);
    }
}

TEST_CASE("fractional edge cover numbers") {
    REQUIRE(fractional_edge_cover_number(triangle()) == Rational(3, 2));
    REQUIRE(fractional_edge_cover_number(query_hypergraph(fixtures::fig1_query())) == Rational(2));

    Hypergraph one;
    one.add_node("A");
    one.add_node("B");
    one.add_edge("R", {0, 1});
    REQUIRE(fractional_edge_cover_number(one) == Rational(1));

    Hypergraph lonely;
    lonely.add_node("A");
    REQUIRE_THROWS_AS(fractional_edge_cover_number(lonely), UncoverableNodeError);
}

TEST_CASE("optimal cover weights are a feasible cover of the stated weight") {
    Hypergraph tri = triangle();
    EdgeCoverSolution sol = fractional_edge_cover_solution(tri);
    REQUIRE(sol.cover.total_weight() == sol.rho_star);
    std::vector<Rational> incident(tri.nodes.size(), Rational(0));
    for (const auto& [e, w] : sol.cover.weights) {
        REQUIRE(w >= Rational(0));
        for (int v : tri.edges[e].node_ids) incident[v] += w;
    }
    for (const auto& i : incident) REQUIRE(i >= Rational(1));
}

TEST_CASE("minimal edge cover checks on the Figure 1 result hypergraph") {
    ResultHypergraph rh = result_hypergraph(
        fixtures::fig1_result(), {{"A", "B"}, {"B", "C"}, {"C", "D"}});
    // edge ids of the rel(M) rows
    std::vector<int> m;
    for (size_t e = 0; e < rh.edge_tuples.size(); ++e)
        if (fixtures::fig1_rel_m().contains(rh.edge_tuples[e])) m.push_back(static_cast<int>(e));
    REQUIRE(m.size() == 4);
    REQUIRE(is_minimal_edge_cover(rh.base, m));

    std::vector<int> all;
    for (size_t e = 0; e < 8; ++e) all.push_back(static_cast<int>(e));
    REQUIRE_FALSE(is_minimal_edge_cover(rh.base, all));
    REQUIRE_FALSE(is_minimal_edge_cover(rh.base, {}));
}

TEST_CASE("K2n has 2^n - 2 minimal edge covers, all of size n") {
    for (int n = 2; n <= 6; ++n) {
        Hypergraph h = complete_bipartite(2, n);
        auto covers = all_minimal_edge_covers(h);
        REQUIRE(covers.size() == static_cast<size_t>((1 << n) - 2));
        for (const auto& m : covers) {
            REQUIRE(m.size() == static_cast<size_t>(n));
            REQUIRE(is_minimal_edge_cover(h, m));
        }
    }
}

TEST_CASE("K45 minimal covers span sizes 5..7") {
    Hypergraph h = complete_bipartite(4, 5);
    auto covers = all_minimal_edge_covers(h);
    size_t lo = 99, hi = 0;
    for (const auto& m : covers) {
        REQUIRE(is_minimal_edge_cover(h, m));
        lo = std::min(lo, m.size());
        hi = std::max(hi, m.size());
    }
    REQUIRE(lo == 5);
    REQUIRE(hi == 7);
}

TEST_CASE("single edge hypergraph has exactly one minimal cover") {
    Hypergraph h;
    h.add_node("A");
    h.add_node("B");
    h.add_edge("R", {0, 1});
    auto covers = all_minimal_edge_covers(h);
    REQUIRE(covers.size() == 1);
    REQUIRE(covers[0] == std::vector<int>{0});
}

TEST_CASE("enumeration bound is enforced") {
    Hypergraph h = complete_bipartite(5, 5);
    REQUIRE_THROWS_AS(all_minimal_edge_covers(h), TooLargeError);
}

TEST_CASE("simplex results carry an exact duality certificate") {
    // A feasible fractional matching y and a feasible fractional cover gamma
    // of equal weight certify optimality of both, independently of how the
    // simplex got there.
    std::mt19937_64 rng(8088);
    for (int trial = 0; trial < 60; ++trial) {
        int nodes = 2 + static_cast<int>(rng() % 5);
        int edges = 1 + static_cast<int>(rng() % 6);
        Hypergraph h;
        for (int v = 0; v < nodes; ++v) h.add_node("v" + std::to_string(v));
        for (int e = 0; e < edges; ++e) {
            std::vector<int> ids;
            for (int v = 0; v < nodes; ++v)
                if (rng() % 2) ids.push_back(v);
            if (ids.empty()) ids.push_back(static_cast<int>(rng() % nodes));
            h.add_edge("e" + std::to_string(e), std::move(ids));
        }
        // ensure coverage so the instance is feasible
        {
            std::vector<bool> covered(nodes, false);
            for (const auto& e : h.edges)
                for (int v : e.node_ids) covered[v] = true;
            std::vector<int> missing;
            for (int v = 0; v < nodes; ++v)
                if (!covered[v]) missing.push_back(v);
            if (!missing.empty()) h.add_edge("fix", std::move(missing));
        }

        size_t m = h.edges.size(), n = h.nodes.size();
        std::vector<std::vector<Rational>> a(m, std::vector<Rational>(n, Rational(0)));
        for (size_t e = 0; e < m; ++e)
            for (int v : h.edges[e].node_ids) a[e][v] = Rational(1);
        SimplexResult lp = simplex_maximize(a, std::vector<Rational>(m, Rational(1)),
                                            std::vector<Rational>(n, Rational(1)));
        // y feasible for the matching LP
        Rational y_total(0);
        for (size_t v = 0; v < n; ++v) {
            REQUIRE(lp.primal[v] >= Rational(0));
            y_total += lp.primal[v];
        }
        for (size_t e = 0; e < m; ++e) {
            Rational load(0);
            for (int v : h.edges[e].node_ids) load += lp.primal[v];
            REQUIRE(load <= Rational(1));
        }
        // gamma feasible for the covering LP
        EdgeCoverSolution sol = fractional_edge_cover_solution(h);
        std::vector<Rational> incident(n, Rational(0));
        for (const auto& [e, w] : sol.cover.weights) {
            REQUIRE(w >= Rational(0));
            for (int v : h.edges[e].node_ids) incident[v] += w;
        }
        for (size_t v = 0; v < n; ++v) REQUIRE(incident[v] >= Rational(1));
        // equal weights: both optimal
        REQUIRE(y_total == lp.value);
        REQUIRE(sol.cover.total_weight() == sol.rho_star);
        REQUIRE(sol.rho_star == lp.value);
    }
}

TEST_CASE("rho* lower-bounds every integral minimal cover") {
    for (auto [m, n] : {std::pair{2, 3}, {3, 3}, {2, 5}}) {
        Hypergraph h = complete_bipartite(m, n);
        Rational rho = fractional_edge_cover_number(h);
        for (const auto& cover : all_minimal_edge_covers(h))
            REQUIRE(rho <= Rational(static_cast<long long>(cover.size())));
    }
}
