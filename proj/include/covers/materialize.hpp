#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "covers/decomposition.hpp"
#include "covers/error.hpp"
#include "covers/relation.hpp"

namespace covers {

namespace detail {

struct JoinAtomState {
    const Relation* rel;
    std::vector<int> attr_cols;      // column per query attribute, -1 if absent
    std::vector<size_t> candidates;  // row indices alive under current bindings
};

inline void generic_join_recurse(std::vector<JoinAtomState>& atoms,
                                 const std::vector<std::string>& order, size_t depth,
                                 Row& assignment, std::vector<Row>& out) {
    if (depth == order.size()) {
        out.push_back(assignment);
        return;
    }
    // Candidate values: sorted intersection over all atoms containing the
    // attribute (generic-join scheme).
    std::vector<const JoinAtomState*> holders;
    for (const auto& a : atoms)
        if (a.attr_cols[depth] >= 0) holders.push_back(&a);

    std::vector<Value> values;
    {
        const JoinAtomState* first = holders.front();
        for (size_t r : first->candidates) values.push_back(first->rel->rows()[r][first->attr_cols[depth]]);
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (size_t h = 1; h < holders.size() && !values.empty(); ++h) {
            std::vector<Value> present;
            for (size_t r : holders[h]->candidates)
                present.push_back(holders[h]->rel->rows()[r][holders[h]->attr_cols[depth]]);
            std::sort(present.begin(), present.end());
            present.erase(std::unique(present.begin(), present.end()), present.end());
            std::vector<Value> kept;
            std::set_intersection(values.begin(), values.end(), present.begin(), present.end(),
                                  std::back_inserter(kept));
            values = std::move(kept);
        }
    }

    for (const auto& v : values) {
        assignment[depth] = v;
        std::vector<std::vector<size_t>> saved;
        saved.reserve(atoms.size());
        for (auto& a : atoms) {
            saved.push_back(a.candidates);
            if (a.attr_cols[depth] >= 0) {
                std::vector<size_t> kept;
                for (size_t r : a.candidates)
                    if (a.rel->rows()[r][a.attr_cols[depth]] == v) kept.push_back(r);
                a.candidates = std::move(kept);
            }
        }
        generic_join_recurse(atoms, order, depth + 1, assignment, out);
        for (size_t i = 0; i < atoms.size(); ++i) atoms[i].candidates = std::move(saved[i]);
    }
}

} // namespace detail

// Worst-case-optimal style join: expands one attribute at a time,
// intersecting the per-relation candidate value sets. Exact result over the
// schema `attrs_order` (which must be a permutation of att(q)).
inline Relation generic_join(const JoinQuery& q, const Database& db,
                             const std::vector<std::string>& attrs_order) {
    {
        std::vector<std::string> want = q.attributes(), got = attrs_order;
        std::sort(want.begin(), want.end());
        std::sort(got.begin(), got.end());
        if (want != got)
            throw ValidationError("attrs_order must be a permutation of the query attributes");
    }

    std::vector<detail::JoinAtomState> atoms;
    for (const auto& atom : q.atoms) {
        auto it = db.find(atom.name);
        if (it == db.end()) throw ValidationError("relation missing from database: " + atom.name);
        if (!(it->second.schema() == atom.schema))
            throw SchemaMismatchError("database schema differs for " + atom.name);
        if (it->second.empty()) return Relation(Schema{attrs_order}, {});
        detail::JoinAtomState st;
        st.rel = &it->second;
        for (const auto& a : attrs_order) {
            st.attr_cols.push_back(atom.schema.contains(a) ? atom.schema.index_of(a) : -1);
        }
        for (size_t r = 0; r < it->second.size(); ++r) st.candidates.push_back(r);
        // atoms with no join attribute act as boolean gates; nonempty means pass
        bool engaged = std::any_of(st.attr_cols.begin(), st.attr_cols.end(),
                                   [](int c) { return c >= 0; });
        if (engaged) atoms.push_back(std::move(st));
    }
    if (atoms.empty()) {
        if (attrs_order.empty()) return Relation(Schema{{}}, {Row{}});
        return Relation(Schema{attrs_order}, {});
    }

    std::vector<Row> out;
    Row assignment(attrs_order.size());
    detail::generic_join_recurse(atoms, attrs_order, 0, assignment, out);
    return Relation(Schema{attrs_order}, std::move(out));
}

// Acyclic, globally consistent reduction of (Q, T, D): one relation per bag,
// joined by the tree of T.
struct AcyclicInstance {
    JoinQuery query;    // one atom per bag, named by bag id
    JoinTree join_tree; // tree of T over the bag relation symbols
    Database database;  // calibrated bag relations
};

namespace detail {

inline JoinQuery bag_restricted_query(const JoinQuery& q, const std::vector<std::string>& bag) {
    JoinQuery out;
    for (const auto& atom : q.atoms) {
        std::vector<std::string> attrs;
        for (const auto& a : atom.schema.attrs())
            if (std::find(bag.begin(), bag.end(), a) != bag.end()) attrs.push_back(a);
        if (!attrs.empty()) out.atoms.push_back({atom.name, Schema{attrs}});
    }
    return out;
}

} // namespace detail

// Bag materialization (generic join per bag) followed by full calibration:
// one bottom-up and one top-down semi-join pass over the rooted tree. The
// result database is pairwise consistent along tree edges, hence globally
// consistent for the acyclic bag query.
inline AcyclicInstance reduce_to_acyclic(
    const JoinQuery& q, const Decomposition& t, const Database& db,
    const std::map<std::string, std::vector<std::string>>& bag_order_overrides = {}) {
    ValidityReport report = validate_decomposition(q, t);
    if (!report.valid())
        throw InvalidDecompositionError("invalid decomposition: " + report.to_string());

    bool any_empty_input = false;
    for (const auto& atom : q.atoms) {
        auto it = db.find(atom.name);
        if (it == db.end()) throw ValidationError("relation missing from database: " + atom.name);
        any_empty_input = any_empty_input || it->second.empty();
    }

    std::vector<std::string> global_order = t.attribute_order();
    auto bag_attr_order = [&](size_t b) {
        auto it = bag_order_overrides.find(t.bag_ids[b]);
        if (it != bag_order_overrides.end()) return it->second;
        std::vector<std::string> order = t.bags[b];
        std::sort(order.begin(), order.end(), [&](const std::string& x, const std::string& y) {
            auto px = std::find(global_order.begin(), global_order.end(), x);
            auto py = std::find(global_order.begin(), global_order.end(), y);
            return px < py;
        });
        return order;
    };

    // Materialize R_B = Q_B(D_B) per bag.
    std::vector<Relation> bag_rels(t.bag_count());
    bool any_empty_bag = any_empty_input;
    for (size_t b = 0; b < t.bag_count(); ++b) {
        if (any_empty_input) {
            bag_rels[b] = Relation(Schema{t.bags[b]}, {});
            continue;
        }
        JoinQuery qb = detail::bag_restricted_query(q, t.bags[b]);
        Database dbb;
        for (const auto& atom : qb.atoms)
            dbb.emplace(atom.name, project(db.at(atom.name), atom.schema.attrs()));
        Relation rb = generic_join(qb, dbb, bag_attr_order(b));
        bag_rels[b] = rb.reordered(t.bags[b]);
        any_empty_bag = any_empty_bag || bag_rels[b].empty();
    }

    if (any_empty_bag) {
        // Global consistency forces the whole instance empty.
        for (size_t b = 0; b < t.bag_count(); ++b) bag_rels[b] = Relation(Schema{t.bags[b]}, {});
    } else {
        std::vector<int> parent = t.parents();
        std::vector<int> pre = t.preorder();
        // bottom-up, then top-down; each edge visit deletes dangling tuples on
        // both sides
        for (auto it = pre.rbegin(); it != pre.rend(); ++it) {
            int c = *it;
            if (parent[c] < 0) continue;
            bag_rels[parent[c]] = semi_join_reduce(bag_rels[parent[c]], bag_rels[c]);
            bag_rels[c] = semi_join_reduce(bag_rels[c], bag_rels[parent[c]]);
        }
        for (int c : pre) {
            if (parent[c] < 0) continue;
            bag_rels[c] = semi_join_reduce(bag_rels[c], bag_rels[parent[c]]);
            bag_rels[parent[c]] = semi_join_reduce(bag_rels[parent[c]], bag_rels[c]);
        }
        for (const auto& r : bag_rels) any_empty_bag = any_empty_bag || r.empty();
        if (any_empty_bag)
            for (size_t b = 0; b < t.bag_count(); ++b)
                bag_rels[b] = Relation(Schema{t.bags[b]}, {});
    }

    AcyclicInstance inst;
    for (size_t b = 0; b < t.bag_count(); ++b) {
        inst.query.atoms.push_back({t.bag_ids[b], Schema{t.bags[b]}});
        inst.database.emplace(t.bag_ids[b], std::move(bag_rels[b]));
    }
    inst.join_tree.symbols = t.bag_ids;
    for (const auto& bag : t.bags) inst.join_tree.schemas.push_back(Schema{bag});
    inst.join_tree.edges = t.tree_edges;
    inst.join_tree.root = t.root;
    return inst;
}

} // namespace covers
