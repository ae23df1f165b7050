#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "covers/error.hpp"
#include "covers/lp.hpp"
#include "covers/rational.hpp"
#include "covers/relation.hpp"

namespace covers {

// Multi-hypergraph: several edges may share the same node set. Node and edge
// ids are stable insertion indices.
struct Hypergraph {
    std::vector<std::string> nodes;
    struct Edge {
        std::string name;
        std::vector<int> node_ids; // sorted, distinct
    };
    std::vector<Edge> edges;

    int node_id(const std::string& name) const {
        auto it = std::find(nodes.begin(), nodes.end(), name);
        if (it == nodes.end()) throw UnknownAttributeError("unknown hypergraph node: " + name);
        return static_cast<int>(it - nodes.begin());
    }

    int add_node(const std::string& name) {
        nodes.push_back(name);
        return static_cast<int>(nodes.size()) - 1;
    }

    void add_edge(const std::string& name, std::vector<int> ids) {
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        for (int v : ids) {
            if (v < 0 || v >= static_cast<int>(nodes.size()))
                throw ValidationError("edge references unknown node");
        }
        edges.push_back(Edge{name, std::move(ids)});
    }
};

// gamma: edge id -> nonnegative rational weight (absent edges weigh zero).
struct FractionalEdgeCover {
    std::map<int, Rational> weights;

    Rational total_weight() const {
        Rational w(0);
        for (const auto& [e, g] : weights) w += g;
        return w;
    }
};

inline Hypergraph query_hypergraph(const JoinQuery& q) {
    Hypergraph h;
    for (const auto& a : q.attributes()) h.add_node(a);
    for (const auto& atom : q.atoms) {
        std::vector<int> ids;
        for (const auto& attr : atom.schema.attrs()) ids.push_back(h.node_id(attr));
        h.add_edge(atom.name, std::move(ids));
    }
    return h;
}

// Hypergraph restricted to a node subset: nodes renumbered, every edge cut
// down to the subset, empty restrictions dropped. `orig_edge_ids[i]` maps the
// restricted edge i back to its source edge.
struct RestrictedHypergraph {
    Hypergraph graph;
    std::vector<int> orig_edge_ids;
};

inline RestrictedHypergraph restrict_hypergraph(const Hypergraph& h,
                                                const std::vector<std::string>& keep) {
    RestrictedHypergraph out;
    std::vector<int> new_id(h.nodes.size(), -1);
    for (const auto& name : keep) {
        int v = h.node_id(name);
        if (new_id[v] == -1) new_id[v] = out.graph.add_node(name);
    }
    for (size_t e = 0; e < h.edges.size(); ++e) {
        std::vector<int> ids;
        for (int v : h.edges[e].node_ids)
            if (new_id[v] != -1) ids.push_back(new_id[v]);
        if (!ids.empty()) {
            out.graph.add_edge(h.edges[e].name, std::move(ids));
            out.orig_edge_ids.push_back(static_cast<int>(e));
        }
    }
    return out;
}

// rho*(H) with an optimal fractional edge cover. Solved exactly through the
// dual fractional-matching LP (max sum y_v, per edge sum_{v in e} y_v <= 1):
// the cover weights are the dual multipliers at the optimum.
struct EdgeCoverSolution {
    Rational rho_star;
    FractionalEdgeCover cover;
};

inline EdgeCoverSolution fractional_edge_cover_solution(const Hypergraph& h) {
    std::vector<bool> covered(h.nodes.size(), false);
    for (const auto& e : h.edges)
        for (int v : e.node_ids) covered[v] = true;
    for (size_t v = 0; v < h.nodes.size(); ++v)
        if (!covered[v])
            throw UncoverableNodeError("node lies in no edge: " + h.nodes[v]);

    EdgeCoverSolution sol;
    if (h.nodes.empty()) {
        sol.rho_star = Rational(0);
        return sol;
    }
    size_t n = h.nodes.size(), m = h.edges.size();
    std::vector<std::vector<Rational>> a(m, std::vector<Rational>(n, Rational(0)));
    for (size_t e = 0; e < m; ++e)
        for (int v : h.edges[e].node_ids) a[e][v] = Rational(1);
    std::vector<Rational> b(m, Rational(1)), c(n, Rational(1));
    SimplexResult lp = simplex_maximize(a, b, c);
    sol.rho_star = lp.value;
    for (size_t e = 0; e < m; ++e)
        if (!lp.duals[e].is_zero()) sol.cover.weights[static_cast<int>(e)] = lp.duals[e];
    return sol;
}

inline Rational fractional_edge_cover_number(const Hypergraph& h) {
    return fractional_edge_cover_solution(h).rho_star;
}

namespace detail {

// Node-set bitmask over 64-bit words; result hypergraphs can exceed 64 nodes.
struct NodeMask {
    std::vector<uint64_t> words;

    explicit NodeMask(size_t nodes) : words((nodes + 63) / 64, 0) {}
    void set(int v) { words[v / 64] |= uint64_t(1) << (v % 64); }
    void unite(const NodeMask& o) {
        for (size_t i = 0; i < words.size(); ++i) words[i] |= o.words[i];
    }
    bool covers(const NodeMask& full) const { return words == full.words; }
};

inline std::vector<NodeMask> edge_masks(const Hypergraph& h) {
    std::vector<NodeMask> masks;
    masks.reserve(h.edges.size());
    for (const auto& e : h.edges) {
        NodeMask m(h.nodes.size());
        for (int v : e.node_ids) m.set(v);
        masks.push_back(std::move(m));
    }
    return masks;
}

inline NodeMask full_mask(const Hypergraph& h) {
    NodeMask m(h.nodes.size());
    for (size_t v = 0; v < h.nodes.size(); ++v) m.set(static_cast<int>(v));
    return m;
}

} // namespace detail

// M covers every node and no edge of M is removable.
inline bool is_minimal_edge_cover(const Hypergraph& h, const std::vector<int>& m) {
    for (int e : m)
        if (e < 0 || e >= static_cast<int>(h.edges.size()))
            throw ValidationError("edge id out of range");
    auto masks = detail::edge_masks(h);
    auto full = detail::full_mask(h);
    detail::NodeMask all(h.nodes.size());
    for (int e : m) all.unite(masks[e]);
    if (!all.covers(full)) return false;
    for (size_t drop = 0; drop < m.size(); ++drop) {
        detail::NodeMask rest(h.nodes.size());
        for (size_t i = 0; i < m.size(); ++i)
            if (i != drop) rest.unite(masks[m[i]]);
        if (rest.covers(full)) return false;
    }
    return true;
}

// Exhaustive oracle: every minimal edge cover, found by subset enumeration in
// increasing size with supersets of found covers pruned. Edge count is capped
// because this is for small instances only.
inline std::vector<std::vector<int>> all_minimal_edge_covers(const Hypergraph& h,
                                                             int max_edges = 20) {
    const int m = static_cast<int>(h.edges.size());
    if (m > max_edges)
        throw TooLargeError("edge count " + std::to_string(m) + " exceeds enumeration bound " +
                            std::to_string(max_edges));
    auto masks = detail::edge_masks(h);
    auto full = detail::full_mask(h);
    {
        detail::NodeMask all(h.nodes.size());
        for (const auto& em : masks) all.unite(em);
        if (!all.covers(full)) return {}; // some node uncoverable
    }

    std::vector<uint32_t> found_bits;
    std::vector<std::vector<int>> found;
    std::vector<int> combo;

    auto record_if_minimal_cover = [&](uint32_t bits) {
        detail::NodeMask all(h.nodes.size());
        for (int e = 0; e < m; ++e)
            if (bits & (uint32_t(1) << e)) all.unite(masks[e]);
        if (!all.covers(full)) return;
        for (uint32_t prev : found_bits)
            if ((prev & bits) == prev) return; // strictly contains a smaller cover
        found_bits.push_back(bits);
        std::vector<int> ids;
        for (int e = 0; e < m; ++e)
            if (bits & (uint32_t(1) << e)) ids.push_back(e);
        found.push_back(std::move(ids));
    };

    for (int size = 1; size <= m; ++size) {
        combo.assign(size, 0);
        for (int i = 0; i < size; ++i) combo[i] = i;
        for (;;) {
            uint32_t bits = 0;
            for (int e : combo) bits |= uint32_t(1) << e;
            record_if_minimal_cover(bits);
            int i = size - 1;
            while (i >= 0 && combo[i] == m - size + i) --i;
            if (i < 0) break;
            ++combo[i];
            for (int j = i + 1; j < size; ++j) combo[j] = combo[j - 1] + 1;
        }
    }
    return found;
}

// Hypergraph of a relation R over attribute sets P (App-style result
// hypergraph): one node per distinct projection per set in P, one edge per
// row. Edge id i is row i of R in its stored order.
struct ResultHypergraph {
    Hypergraph base;
    Schema schema;
    std::vector<std::vector<std::string>> projections;
    std::vector<std::pair<int, Row>> node_tuples; // (index into projections, projected row)
    std::vector<Row> edge_tuples;                 // full rows

    Relation rel(const std::vector<int>& edge_ids) const {
        std::vector<Row> rows;
        for (int e : edge_ids) {
            if (e < 0 || e >= static_cast<int>(edge_tuples.size()))
                throw ValidationError("edge id out of range");
            rows.push_back(edge_tuples[e]);
        }
        return Relation(schema, std::move(rows));
    }
};

inline ResultHypergraph result_hypergraph(const Relation& r,
                                          const std::vector<std::vector<std::string>>& p) {
    std::set<std::string> seen;
    for (const auto& s : p)
        for (const auto& a : s) {
            if (!r.schema().contains(a))
                throw SchemaNotCoveredError("projection attribute not in schema: " + a);
            seen.insert(a);
        }
    for (const auto& a : r.schema().attrs())
        if (!seen.count(a))
            throw SchemaNotCoveredError("attribute sets do not cover schema: " + a);

    ResultHypergraph rh;
    rh.schema = r.schema();
    rh.projections = p;

    std::map<std::pair<int, Row>, int> node_of;
    std::vector<std::vector<int>> proj_cols;
    for (const auto& s : p) {
        std::vector<int> cols;
        for (const auto& a : s) cols.push_back(r.schema().index_of(a));
        proj_cols.push_back(std::move(cols));
    }
    for (const auto& row : r.rows()) {
        std::vector<int> edge_nodes;
        for (size_t si = 0; si < p.size(); ++si) {
            Row proj(proj_cols[si].size());
            for (size_t i = 0; i < proj_cols[si].size(); ++i) proj[i] = row[proj_cols[si][i]];
            auto key = std::make_pair(static_cast<int>(si), proj);
            auto it = node_of.find(key);
            if (it == node_of.end()) {
                int id = rh.base.add_node("p" + std::to_string(rh.base.nodes.size()));
                it = node_of.emplace(std::move(key), id).first;
                rh.node_tuples.emplace_back(static_cast<int>(si), proj);
            }
            edge_nodes.push_back(it->second);
        }
        rh.base.add_edge("t" + std::to_string(rh.edge_tuples.size()), std::move(edge_nodes));
        rh.edge_tuples.push_back(row);
    }
    return rh;
}

} // namespace covers
