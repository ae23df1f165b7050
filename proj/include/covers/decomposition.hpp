#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "covers/error.hpp"
#include "covers/hypergraph.hpp"
#include "covers/relation.hpp"

namespace covers {

// Rooted tree of attribute bags. Bags and tree edges are user-supplied (or
// derived from a join tree); the per-bag fractional edge covers gamma_t are
// computed against a concrete query by analyze_decomposition.
struct Decomposition {
    std::vector<std::string> bag_ids;
    std::vector<std::vector<std::string>> bags; // chi(t), declared attribute order
    std::vector<std::pair<int, int>> tree_edges;
    int root = 0;

    // Filled by analyze_decomposition: minimal-weight fractional edge cover of
    // the query hypergraph restricted to each bag (keyed by query edge id).
    std::vector<FractionalEdgeCover> per_bag_cover;
    std::vector<Rational> per_bag_weight;

    size_t bag_count() const { return bags.size(); }

    int bag_index(const std::string& id) const {
        auto it = std::find(bag_ids.begin(), bag_ids.end(), id);
        if (it == bag_ids.end()) throw ValidationError("unknown bag: " + id);
        return static_cast<int>(it - bag_ids.begin());
    }

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(bags.size());
        for (auto [a, b] : tree_edges) {
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
        return adj;
    }

    // parent[root] = -1; children in tree-edge declaration order.
    std::vector<int> parents() const {
        std::vector<int> parent(bags.size(), -2);
        auto adj = adjacency();
        std::vector<int> stack{root};
        parent[root] = -1;
        while (!stack.empty()) {
            int t = stack.back();
            stack.pop_back();
            for (int c : adj[t]) {
                if (parent[c] == -2) {
                    parent[c] = t;
                    stack.push_back(c);
                }
            }
        }
        return parent;
    }

    // Depth-first pre-order from the root, children in declaration order.
    std::vector<int> preorder() const {
        auto adj = adjacency();
        std::vector<int> order;
        std::vector<bool> seen(bags.size(), false);
        std::vector<int> stack{root};
        while (!stack.empty()) {
            int t = stack.back();
            stack.pop_back();
            if (seen[t]) continue;
            seen[t] = true;
            order.push_back(t);
            for (auto it = adj[t].rbegin(); it != adj[t].rend(); ++it)
                if (!seen[*it]) stack.push_back(*it);
        }
        return order;
    }

    // Decomposition attributes in depth-first first-occurrence order.
    std::vector<std::string> attribute_order() const {
        std::vector<std::string> out;
        for (int t : preorder())
            for (const auto& a : bags[t])
                if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
        return out;
    }
};

struct ValidityReport {
    struct Violation {
        std::string kind; // structure | coverage | connectivity | bag-cover
        std::string detail;
    };
    std::vector<Violation> violations;

    bool valid() const { return violations.empty(); }

    std::string to_string() const {
        if (valid()) return "valid";
        std::string out;
        for (const auto& v : violations) {
            if (!out.empty()) out += "; ";
            out += v.kind + ": " + v.detail;
        }
        return out;
    }
};

namespace detail {

inline std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) {
        if (!out.empty()) out += ",";
        out += n;
    }
    return "{" + out + "}";
}

} // namespace detail

// Coverage, connectivity, tree shape, and (when present) per-bag cover
// feasibility and weight minimality. Violations are data, not exceptions.
inline ValidityReport validate_decomposition(const JoinQuery& q, const Decomposition& t) {
    ValidityReport report;
    auto bad = [&](const std::string& kind, const std::string& detail) {
        report.violations.push_back({kind, detail});
    };

    if (t.bags.empty()) {
        bad("structure", "decomposition has no bags");
        return report;
    }
    if (t.bag_ids.size() != t.bags.size()) bad("structure", "bag id/bag count mismatch");
    {
        std::set<std::string> ids(t.bag_ids.begin(), t.bag_ids.end());
        if (ids.size() != t.bag_ids.size()) bad("structure", "duplicate bag ids");
    }
    if (t.root < 0 || t.root >= static_cast<int>(t.bags.size()))
        bad("structure", "root out of range");
    if (t.tree_edges.size() + 1 != t.bags.size()) {
        bad("structure", "tree must have exactly bags-1 edges");
    } else {
        std::vector<bool> seen(t.bags.size(), false);
        auto adj = t.adjacency();
        std::vector<int> stack{0};
        seen[0] = true;
        size_t reached = 1;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            for (int y : adj[x])
                if (!seen[y]) {
                    seen[y] = true;
                    ++reached;
                    stack.push_back(y);
                }
        }
        if (reached != t.bags.size()) bad("structure", "tree is not connected");
    }
    if (!report.valid()) return report;

    std::vector<std::string> attrs = q.attributes();
    std::set<std::string> attr_set(attrs.begin(), attrs.end());
    for (size_t b = 0; b < t.bags.size(); ++b)
        for (const auto& a : t.bags[b])
            if (!attr_set.count(a))
                bad("structure", "bag " + t.bag_ids[b] + " uses unknown attribute " + a);
    if (!report.valid()) return report;

    // Coverage: every query edge fits in some bag.
    for (const auto& atom : q.atoms) {
        bool covered = false;
        for (const auto& bag : t.bags) {
            bool fits = true;
            for (const auto& a : atom.schema.attrs())
                fits = fits && std::find(bag.begin(), bag.end(), a) != bag.end();
            if (fits) {
                covered = true;
                break;
            }
        }
        if (!covered)
            bad("coverage", "edge " + atom.name + " " + detail::join_names(atom.schema.attrs()) +
                                " is not contained in any bag");
    }

    // Connectivity: for each attribute, the bags holding it form a nonempty
    // connected subtree.
    auto adj = t.adjacency();
    for (const auto& a : attrs) {
        std::vector<int> holders;
        for (size_t b = 0; b < t.bags.size(); ++b)
            if (std::find(t.bags[b].begin(), t.bags[b].end(), a) != t.bags[b].end())
                holders.push_back(static_cast<int>(b));
        if (holders.empty()) {
            bad("connectivity", "attribute " + a + " appears in no bag");
            continue;
        }
        std::set<int> holder_set(holders.begin(), holders.end());
        std::set<int> seen{holders[0]};
        std::vector<int> stack{holders[0]};
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            for (int y : adj[x])
                if (holder_set.count(y) && !seen.count(y)) {
                    seen.insert(y);
                    stack.push_back(y);
                }
        }
        if (seen.size() != holder_set.size())
            bad("connectivity", "bags containing attribute " + a + " are disconnected");
    }
    if (!report.valid()) return report;

    // Per-bag covers, when the decomposition carries them.
    if (!t.per_bag_cover.empty()) {
        Hypergraph h = query_hypergraph(q);
        for (size_t b = 0; b < t.bags.size(); ++b) {
            RestrictedHypergraph rh = restrict_hypergraph(h, t.bags[b]);
            std::map<int, int> restricted_of;
            for (size_t i = 0; i < rh.orig_edge_ids.size(); ++i)
                restricted_of[rh.orig_edge_ids[i]] = static_cast<int>(i);
            std::vector<Rational> incident(rh.graph.nodes.size(), Rational(0));
            bool weights_ok = true;
            for (const auto& [eid, w] : t.per_bag_cover[b].weights) {
                if (w < Rational(0)) {
                    bad("bag-cover", "negative weight in bag " + t.bag_ids[b]);
                    weights_ok = false;
                    continue;
                }
                auto it = restricted_of.find(eid);
                if (it == restricted_of.end()) {
                    if (!w.is_zero()) {
                        bad("bag-cover",
                            "bag " + t.bag_ids[b] + " weights an edge disjoint from the bag");
                        weights_ok = false;
                    }
                    continue;
                }
                for (int v : rh.graph.edges[it->second].node_ids) incident[v] += w;
            }
            if (!weights_ok) continue;
            for (size_t v = 0; v < rh.graph.nodes.size(); ++v)
                if (incident[v] < Rational(1))
                    bad("bag-cover", "bag " + t.bag_ids[b] + " leaves attribute " +
                                         rh.graph.nodes[v] + " under-covered");
            try {
                Rational best = fractional_edge_cover_number(rh.graph);
                if (t.per_bag_cover[b].total_weight() != best)
                    bad("bag-cover", "bag " + t.bag_ids[b] + " cover weight " +
                                         t.per_bag_cover[b].total_weight().str() +
                                         " is not minimal (" + best.str() + ")");
            } catch (const UncoverableNodeError& e) {
                bad("bag-cover", std::string(e.what()));
            }
        }
    }
    return report;
}

// Validates the skeleton and fills in minimal-weight per-bag covers.
// Throws InvalidDecompositionError when the skeleton is not a decomposition
// of q.
inline Decomposition analyze_decomposition(const JoinQuery& q, Decomposition t) {
    t.per_bag_cover.clear();
    t.per_bag_weight.clear();
    ValidityReport structural = validate_decomposition(q, t);
    if (!structural.valid())
        throw InvalidDecompositionError("invalid decomposition: " + structural.to_string());
    Hypergraph h = query_hypergraph(q);
    for (size_t b = 0; b < t.bags.size(); ++b) {
        RestrictedHypergraph rh = restrict_hypergraph(h, t.bags[b]);
        EdgeCoverSolution sol;
        try {
            sol = fractional_edge_cover_solution(rh.graph);
        } catch (const UncoverableNodeError& e) {
            throw InvalidDecompositionError("bag " + t.bag_ids[b] + ": " + e.what());
        }
        FractionalEdgeCover gamma;
        for (const auto& [restricted_id, w] : sol.cover.weights)
            gamma.weights[rh.orig_edge_ids[restricted_id]] = w;
        t.per_bag_cover.push_back(std::move(gamma));
        t.per_bag_weight.push_back(sol.rho_star);
    }
    return t;
}

// fhtw(T): the maximum per-bag cover weight.
inline Rational width(const Decomposition& t) {
    if (t.per_bag_weight.empty())
        throw InvalidDecompositionError("width requires an analyzed decomposition");
    Rational w(0);
    for (const auto& x : t.per_bag_weight) w = std::max(w, x);
    return w;
}

// Labelled tree over relation symbols; edge labels are schema intersections.
struct JoinTree {
    std::vector<std::string> symbols;
    std::vector<Schema> schemas;
    std::vector<std::pair<int, int>> edges;
    int root = 0;

    int index_of(const std::string& symbol) const {
        auto it = std::find(symbols.begin(), symbols.end(), symbol);
        if (it == symbols.end()) throw ValidationError("unknown join tree node: " + symbol);
        return static_cast<int>(it - symbols.begin());
    }

    std::vector<std::string> label(size_t edge) const {
        return shared_attributes(schemas[edges[edge].first], schemas[edges[edge].second]);
    }

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(symbols.size());
        for (auto [a, b] : edges) {
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
        return adj;
    }
};

// Join tree condition (ii): every attribute shared by two nodes appears along
// the whole path between them. Checked per attribute via connectivity of the
// nodes holding it.
inline bool is_valid_join_tree(const JoinTree& j) {
    if (j.symbols.empty() || j.edges.size() + 1 != j.symbols.size()) return false;
    auto adj = j.adjacency();
    std::set<std::string> attrs;
    for (const auto& s : j.schemas)
        for (const auto& a : s.attrs()) attrs.insert(a);
    std::vector<bool> seen(j.symbols.size());
    for (const auto& a : attrs) {
        std::fill(seen.begin(), seen.end(), false);
        int start = -1, count = 0;
        for (size_t i = 0; i < j.schemas.size(); ++i)
            if (j.schemas[i].contains(a)) {
                if (start == -1) start = static_cast<int>(i);
                ++count;
            }
        if (count == 0) continue;
        std::vector<int> stack{start};
        seen[start] = true;
        int reached = 1;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            for (int y : adj[x])
                if (!seen[y] && j.schemas[y].contains(a)) {
                    seen[y] = true;
                    ++reached;
                    stack.push_back(y);
                }
        }
        if (reached != count) return false;
    }
    // connectedness of the tree itself
    std::fill(seen.begin(), seen.end(), false);
    std::vector<int> stack{0};
    seen[0] = true;
    size_t reached = 1;
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (int y : adj[x])
            if (!seen[y]) {
                seen[y] = true;
                ++reached;
                stack.push_back(y);
            }
    }
    return reached == j.symbols.size();
}

// GYO ear removal. An ear is an atom whose attributes shared with the other
// remaining atoms all fit inside one witness atom; removing ears until one
// atom remains yields a join tree exactly for acyclic queries. Ties break on
// the smallest relation-symbol name, the witness likewise. The tree is rooted
// at the first atom of the query.
inline std::optional<JoinTree> gyo_join_tree(const JoinQuery& q) {
    if (q.atoms.empty()) return std::nullopt;
    JoinTree tree;
    for (const auto& a : q.atoms) {
        tree.symbols.push_back(a.name);
        tree.schemas.push_back(a.schema);
    }
    std::vector<bool> alive(q.atoms.size(), true);
    size_t remaining = q.atoms.size();

    while (remaining > 1) {
        int ear = -1, witness = -1;
        std::vector<int> order(q.atoms.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return q.atoms[a].name < q.atoms[b].name; });
        for (int e : order) {
            if (!alive[e]) continue;
            // attributes of e shared with some other alive atom
            std::vector<std::string> shared;
            for (const auto& a : q.atoms[e].schema.attrs()) {
                bool elsewhere = false;
                for (size_t o = 0; o < q.atoms.size(); ++o)
                    if (alive[o] && o != static_cast<size_t>(e) && q.atoms[o].schema.contains(a))
                        elsewhere = true;
                if (elsewhere) shared.push_back(a);
            }
            for (int w : order) {
                if (!alive[w] || w == e) continue;
                bool fits = true;
                for (const auto& a : shared) fits = fits && q.atoms[w].schema.contains(a);
                if (fits) {
                    witness = w;
                    break;
                }
            }
            if (witness != -1) {
                ear = e;
                break;
            }
        }
        if (ear == -1) return std::nullopt; // cyclic
        tree.edges.emplace_back(ear, witness);
        alive[ear] = false;
        --remaining;
    }
    tree.root = 0;
    return tree;
}

// One bag per join tree node; gamma_t puts weight 1 on the node's own edge.
inline Decomposition join_tree_to_decomposition(const JoinTree& j) {
    if (!is_valid_join_tree(j)) throw ValidationError("not a valid join tree");
    Decomposition t;
    t.bag_ids = j.symbols;
    for (const auto& s : j.schemas) t.bags.push_back(s.attrs());
    t.tree_edges = j.edges;
    t.root = j.root;
    for (size_t b = 0; b < t.bags.size(); ++b) {
        FractionalEdgeCover gamma;
        gamma.weights[static_cast<int>(b)] = Rational(1);
        t.per_bag_cover.push_back(std::move(gamma));
        t.per_bag_weight.push_back(t.bags[b].empty() ? Rational(0) : Rational(1));
    }
    return t;
}

} // namespace covers
