#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "covers/cover_join.hpp"
#include "covers/decomposition.hpp"
#include "covers/error.hpp"
#include "covers/relation.hpp"

namespace covers {

// A d-tree: one node per attribute, each with a key drawn from its ancestors.
// Read as a decomposition with bags {A} u key(A), it must be valid for the
// query; that validity, not the derivation recipe, is what enumeration needs.
struct DTree {
    std::vector<std::string> attrs;               // node id = index, root = 0
    std::vector<int> parent;                      // -1 for the root
    std::vector<std::vector<std::string>> keys;   // key(A), subset of ancestors

    int index_of(const std::string& a) const {
        auto it = std::find(attrs.begin(), attrs.end(), a);
        if (it == attrs.end()) throw UnknownAttributeError("attribute not in d-tree: " + a);
        return static_cast<int>(it - attrs.begin());
    }

    Decomposition as_decomposition() const {
        Decomposition t;
        for (size_t i = 0; i < attrs.size(); ++i) {
            t.bag_ids.push_back(attrs[i]);
            std::vector<std::string> bag{attrs[i]};
            for (const auto& k : keys[i]) bag.push_back(k);
            t.bags.push_back(std::move(bag));
            if (parent[i] >= 0) t.tree_edges.emplace_back(parent[i], static_cast<int>(i));
        }
        t.root = 0;
        return t;
    }
};

// Derivation from a decomposition: walk bags top-down; each not-yet-emitted
// attribute becomes a child of the most recently emitted attribute it shares
// a bag with, and key(A) collects the ancestors present in the first bag on
// the root path that contains A.
inline DTree derive_dtree(const Decomposition& t) {
    if (t.bags.empty()) throw InvalidDecompositionError("empty decomposition");
    DTree d;
    auto co_occurs = [&](const std::string& a, const std::string& b) {
        for (const auto& bag : t.bags) {
            bool has_a = std::find(bag.begin(), bag.end(), a) != bag.end();
            bool has_b = std::find(bag.begin(), bag.end(), b) != bag.end();
            if (has_a && has_b) return true;
        }
        return false;
    };
    for (int bag : t.preorder()) {
        std::vector<std::string> fresh = t.bags[bag];
        std::sort(fresh.begin(), fresh.end());
        for (const auto& a : fresh) {
            if (std::find(d.attrs.begin(), d.attrs.end(), a) != d.attrs.end()) continue;
            int parent = -1;
            for (int i = static_cast<int>(d.attrs.size()) - 1; i >= 0; --i) {
                if (co_occurs(d.attrs[i], a)) {
                    parent = i;
                    break;
                }
            }
            // disconnected attribute (Cartesian branch): hang it off the last
            // emitted attribute with an empty key
            if (parent == -1 && !d.attrs.empty()) parent = static_cast<int>(d.attrs.size()) - 1;
            d.attrs.push_back(a);
            d.parent.push_back(parent);
            // key(A): ancestors of A inside A's first bag
            std::vector<std::string> key;
            const auto& home = t.bags[bag];
            for (int anc = parent; anc >= 0; anc = d.parent[anc]) {
                if (std::find(home.begin(), home.end(), d.attrs[anc]) != home.end() &&
                    co_occurs(d.attrs[anc], a))
                    key.push_back(d.attrs[anc]);
            }
            std::sort(key.begin(), key.end());
            d.keys.push_back(std::move(key));
        }
    }
    return d;
}

// Checks the DTree invariants against a query and its source decomposition.
inline ValidityReport validate_dtree(const DTree& d, const JoinQuery& q, const Decomposition& t) {
    ValidityReport report;
    std::vector<std::string> attrs = q.attributes();
    std::sort(attrs.begin(), attrs.end());
    std::vector<std::string> have = d.attrs;
    std::sort(have.begin(), have.end());
    if (attrs != have)
        report.violations.push_back({"structure", "d-tree attributes differ from att(Q)"});
    for (size_t i = 0; i < d.attrs.size(); ++i) {
        // {A} u key(A) inside some bag of T
        bool inside = false;
        for (const auto& bag : t.bags) {
            bool fits = std::find(bag.begin(), bag.end(), d.attrs[i]) != bag.end();
            for (const auto& k : d.keys[i])
                fits = fits && std::find(bag.begin(), bag.end(), k) != bag.end();
            inside = inside || fits;
        }
        if (!inside)
            report.violations.push_back(
                {"structure", "bag of " + d.attrs[i] + " not contained in any source bag"});
        // key(A) must consist of ancestors
        for (const auto& k : d.keys[i]) {
            bool is_ancestor = false;
            for (int anc = d.parent[i]; anc >= 0; anc = d.parent[anc])
                is_ancestor = is_ancestor || d.attrs[anc] == k;
            if (!is_ancestor)
                report.violations.push_back(
                    {"structure", "key of " + d.attrs[i] + " contains non-ancestor " + k});
        }
    }
    if (!report.valid()) return report;
    ValidityReport as_dec = validate_decomposition(q, d.as_decomposition());
    for (auto& v : as_dec.violations) report.violations.push_back(std::move(v));
    return report;
}

// Multimap d-representation: per attribute, key(A)-tuples map to the ordered
// set of A-values seen under that key. Sorted association lists; building
// from a topologically sorted cover makes almost every insert an append.
struct MultimapDRep {
    DTree dtree;
    struct AttrMap {
        std::vector<std::pair<Row, std::vector<Value>>> entries; // sorted by key
    };
    std::vector<AttrMap> maps; // aligned with dtree.attrs

    size_t total_entries() const {
        size_t n = 0;
        for (const auto& m : maps)
            for (const auto& [k, vs] : m.entries) n += vs.size();
        return n;
    }

    const std::vector<Value>* lookup(int attr, const Row& key) const {
        const auto& es = maps[attr].entries;
        auto it = std::lower_bound(es.begin(), es.end(), key,
                                   [](const auto& e, const Row& k) { return e.first < k; });
        if (it == es.end() || it->first != key) return nullptr;
        return &it->second;
    }
};

namespace detail {

// A relation is a cover of the result it represents iff it is a cover of the
// join of its own bag projections. Self-contained check for strict mode.
inline void require_self_cover(const Relation& k, const Decomposition& t) {
    JoinQuery q;
    Database db;
    for (size_t b = 0; b < t.bags.size(); ++b) {
        q.atoms.push_back({t.bag_ids[b], Schema{t.bags[b]}});
        db.emplace(t.bag_ids[b], project(k, t.bags[b]));
    }
    CoverVerdict v = is_cover(k, q, t, db);
    if (!v.is_cover()) throw NotACoverError("relation is not a cover over the decomposition: " +
                                            v.describe());
}

} // namespace detail

// cover2factorization: for each tuple of K (in d-tree topological sort
// order), insert pi_key(A) t -> pi_A t into m_A, deduplicated.
inline MultimapDRep cover_to_drep(const Relation& k, const Decomposition& t,
                                  bool strict = false) {
    if (strict) detail::require_self_cover(k, t);
    MultimapDRep rep;
    rep.dtree = derive_dtree(t);
    rep.maps.resize(rep.dtree.attrs.size());

    std::vector<int> attr_cols, key_arity_offset;
    std::vector<std::vector<int>> key_cols;
    for (size_t i = 0; i < rep.dtree.attrs.size(); ++i) {
        attr_cols.push_back(k.schema().index_of(rep.dtree.attrs[i]));
        std::vector<int> cols;
        for (const auto& key_attr : rep.dtree.keys[i])
            cols.push_back(k.schema().index_of(key_attr));
        key_cols.push_back(std::move(cols));
    }

    Relation sorted = k.sorted_by(rep.dtree.attrs);
    for (const auto& row : sorted.rows()) {
        for (size_t i = 0; i < rep.dtree.attrs.size(); ++i) {
            Row key(key_cols[i].size());
            for (size_t c = 0; c < key_cols[i].size(); ++c) key[c] = row[key_cols[i][c]];
            const Value& v = row[attr_cols[i]];
            auto& entries = rep.maps[i].entries;
            if (!entries.empty() && entries.back().first == key) {
                auto& vs = entries.back().second;
                auto it = std::lower_bound(vs.begin(), vs.end(), v);
                if (it == vs.end() || *it != v) vs.insert(it, v);
            } else {
                auto it = std::lower_bound(
                    entries.begin(), entries.end(), key,
                    [](const auto& e, const Row& want) { return e.first < want; });
                if (it != entries.end() && it->first == key) {
                    auto& vs = it->second;
                    auto vit = std::lower_bound(vs.begin(), vs.end(), v);
                    if (vit == vs.end() || *vit != v) vs.insert(vit, v);
                } else {
                    entries.insert(it, {key, {v}});
                }
            }
        }
    }
    return rep;
}

// Constant-delay enumeration: depth-first odometer over the d-tree. Between
// two emitted tuples at most one multimap probe per attribute happens; the
// optional counter instruments exactly that.
class DRepEnumerator {
public:
    explicit DRepEnumerator(const MultimapDRep& rep) : rep_(&rep) {
        const size_t n = rep.dtree.attrs.size();
        value_lists_.resize(n);
        value_index_.resize(n, 0);
        current_.resize(n);
        key_cols_.resize(n);
        for (size_t i = 0; i < n; ++i) {
            for (const auto& key_attr : rep.dtree.keys[i])
                key_cols_[i].push_back(rep.dtree.index_of(key_attr));
        }
        if (!rep.maps.empty() && !rep.maps[0].entries.empty()) {
            done_ = !descend(0);
        } else {
            done_ = true;
        }
    }

    bool done() const { return done_; }

    // Tuple over the d-tree attribute order.
    const Row& current() const { return current_; }
    const std::vector<std::string>& attr_order() const { return rep_->dtree.attrs; }

    size_t probes_since_last_emit() const { return probes_; }

    void advance() {
        probes_ = 0;
        int i = static_cast<int>(current_.size()) - 1;
        while (i >= 0) {
            if (value_index_[i] + 1 < value_lists_[i]->size()) {
                ++value_index_[i];
                current_[i] = (*value_lists_[i])[value_index_[i]];
                descend(i + 1);
                return;
            }
            --i;
        }
        done_ = true;
    }

private:
    // Fills attrs [from..n) with the first value under their current keys.
    // A probe can only miss if the multimaps violate the d-rep invariants.
    bool descend(int from) {
        for (size_t i = from; i < current_.size(); ++i) {
            Row key(key_cols_[i].size());
            for (size_t c = 0; c < key_cols_[i].size(); ++c) key[c] = current_[key_cols_[i][c]];
            const std::vector<Value>* vs = rep_->lookup(static_cast<int>(i), key);
            ++probes_;
            if (vs == nullptr || vs->empty())
                throw Error("d-representation probe miss: invalid multimap set");
            value_lists_[i] = vs;
            value_index_[i] = 0;
            current_[i] = (*vs)[0];
        }
        return true;
    }

    const MultimapDRep* rep_;
    std::vector<const std::vector<Value>*> value_lists_;
    std::vector<size_t> value_index_;
    std::vector<std::vector<int>> key_cols_;
    Row current_;
    bool done_ = false;
    size_t probes_ = 0;
};

// Materialized enumeration (tests and the CLI stream row by row instead).
inline Relation enumerate_result(const MultimapDRep& rep) {
    std::vector<Row> rows;
    for (DRepEnumerator it(rep); !it.done(); it.advance()) rows.push_back(it.current());
    return Relation(Schema{rep.dtree.attrs}, std::move(rows));
}

// |Q(D)| straight off the cover: per-attribute aggregation over join keys,
// no enumeration. Memoized on the context attributes feeding each subtree.
inline unsigned long long count_result(const Relation& k, const Decomposition& t,
                                       bool strict = false) {
    MultimapDRep rep = cover_to_drep(k, t, strict);
    const size_t n = rep.dtree.attrs.size();
    if (k.empty()) return 0;
    if (n == 0) return k.empty() ? 0 : 1;

    std::vector<std::vector<int>> children(n);
    for (size_t i = 1; i < n; ++i) children[rep.dtree.parent[i]].push_back(static_cast<int>(i));

    // context(A) = attributes outside A's subtree that keys inside it mention
    std::vector<std::vector<int>> context(n);
    {
        std::vector<std::vector<int>> subtree(n);
        for (int i = static_cast<int>(n) - 1; i >= 0; --i) {
            subtree[i].push_back(i);
            for (int c : children[i])
                subtree[i].insert(subtree[i].end(), subtree[c].begin(), subtree[c].end());
        }
        for (size_t i = 0; i < n; ++i) {
            std::set<int> inside(subtree[i].begin(), subtree[i].end());
            std::set<int> ctx;
            for (int node : subtree[i])
                for (const auto& ka : rep.dtree.keys[node]) {
                    int id = rep.dtree.index_of(ka);
                    if (!inside.count(id)) ctx.insert(id);
                }
            context[i].assign(ctx.begin(), ctx.end());
        }
    }

    std::map<std::pair<int, Row>, unsigned long long> memo;
    Row assignment(n);
    auto count_node = [&](auto&& self, int node) -> unsigned long long {
        Row ctx_key;
        for (int c : context[node]) ctx_key.push_back(assignment[c]);
        auto memo_key = std::make_pair(node, ctx_key);
        auto hit = memo.find(memo_key);
        if (hit != memo.end()) return hit->second;

        Row key;
        for (const auto& ka : rep.dtree.keys[node]) key.push_back(assignment[rep.dtree.index_of(ka)]);
        const std::vector<Value>* vs = rep.lookup(node, key);
        unsigned long long total = 0;
        if (vs != nullptr) {
            for (const auto& v : *vs) {
                assignment[node] = v;
                unsigned long long prod = 1;
                for (int c : children[node]) prod *= self(self, c);
                total += prod;
            }
        }
        memo.emplace(std::move(memo_key), total);
        return total;
    };
    return count_node(count_node, 0);
}

} // namespace covers
