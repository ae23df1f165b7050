#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "covers/error.hpp"

namespace covers {

// Data values are UTF-8 strings under byte-lexicographic order; that is the
// single total order every operator in the engine relies on.
using Value = std::string;
using Row = std::vector<Value>;

class Schema {
public:
    Schema() = default;
    explicit Schema(std::vector<std::string> attrs) : attrs_(std::move(attrs)) {
        std::set<std::string> seen;
        for (const auto& a : attrs_) {
            if (!seen.insert(a).second)
                throw ValidationError("duplicate attribute in schema: " + a);
        }
    }

    size_t size() const { return attrs_.size(); }
    const std::string& at(size_t i) const { return attrs_[i]; }
    const std::vector<std::string>& attrs() const { return attrs_; }

    bool contains(const std::string& name) const {
        return std::find(attrs_.begin(), attrs_.end(), name) != attrs_.end();
    }

    int index_of(const std::string& name) const {
        auto it = std::find(attrs_.begin(), attrs_.end(), name);
        if (it == attrs_.end())
            throw UnknownAttributeError("unknown attribute: " + name);
        return static_cast<int>(it - attrs_.begin());
    }

    // Same attributes in the same order.
    bool operator==(const Schema& o) const { return attrs_ == o.attrs_; }
    bool operator!=(const Schema& o) const { return !(*this == o); }

    bool same_attribute_set(const Schema& o) const {
        if (attrs_.size() != o.attrs_.size()) return false;
        std::vector<std::string> a = attrs_, b = o.attrs_;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        return a == b;
    }

private:
    std::vector<std::string> attrs_;
};

// An immutable set of tuples. Rows are deduplicated and kept in total
// lexicographic order under the recorded sort key (a column permutation);
// the default key is schema order, so identical inputs always produce
// byte-identical relations.
class Relation {
public:
    Relation() = default;

    Relation(Schema schema, std::vector<Row> rows) : schema_(std::move(schema)) {
        for (const auto& r : rows) {
            if (r.size() != schema_.size())
                throw ValidationError("row arity does not match schema");
        }
        for (size_t i = 0; i < schema_.size(); ++i) sort_key_.push_back(static_cast<int>(i));
        rows_ = std::move(rows);
        normalize();
    }

    const Schema& schema() const { return schema_; }
    const std::vector<Row>& rows() const { return rows_; }
    const std::vector<int>& sort_key() const { return sort_key_; }
    size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }

    bool contains(const Row& r) const {
        return std::binary_search(rows_.begin(), rows_.end(), r, RowLess{&sort_key_});
    }

    // Copy resorted so that `key_attrs` forms the leading sort columns; the
    // remaining columns follow in schema order. The row set is unchanged.
    Relation sorted_by(const std::vector<std::string>& key_attrs) const {
        std::vector<int> key;
        std::vector<bool> used(schema_.size(), false);
        for (const auto& a : key_attrs) {
            int i = schema_.index_of(a);
            if (!used[i]) {
                key.push_back(i);
                used[i] = true;
            }
        }
        for (size_t i = 0; i < schema_.size(); ++i)
            if (!used[i]) key.push_back(static_cast<int>(i));
        Relation out;
        out.schema_ = schema_;
        out.rows_ = rows_;
        out.sort_key_ = std::move(key);
        std::sort(out.rows_.begin(), out.rows_.end(), RowLess{&out.sort_key_});
        return out;
    }

    // Columns permuted into the given attribute order (must be the same set).
    Relation reordered(const std::vector<std::string>& attr_order) const {
        Schema target{attr_order};
        if (!target.same_attribute_set(schema_))
            throw SchemaMismatchError("reorder must keep the attribute set");
        std::vector<int> src;
        for (const auto& a : attr_order) src.push_back(schema_.index_of(a));
        std::vector<Row> rows;
        rows.reserve(rows_.size());
        for (const auto& r : rows_) {
            Row out(src.size());
            for (size_t i = 0; i < src.size(); ++i) out[i] = r[src[i]];
            rows.push_back(std::move(out));
        }
        return Relation(std::move(target), std::move(rows));
    }

    // Row-set equality, aligning columns by attribute name.
    bool same_rows(const Relation& o) const {
        if (!schema_.same_attribute_set(o.schema_)) return false;
        Relation aligned = o.schema_ == schema_ ? o : o.reordered(schema_.attrs());
        Relation self = canonical();
        aligned = aligned.canonical();
        return self.rows_ == aligned.rows_;
    }

    bool subset_of(const Relation& o) const {
        if (!schema_.same_attribute_set(o.schema_)) return false;
        Relation aligned = o.schema_ == schema_ ? o.canonical() : o.reordered(schema_.attrs());
        Relation self = canonical();
        for (const auto& r : self.rows_)
            if (!aligned.contains(r)) return false;
        return true;
    }

private:
    Relation canonical() const {
        bool id = true;
        for (size_t i = 0; i < sort_key_.size(); ++i) id = id && sort_key_[i] == static_cast<int>(i);
        if (id) return *this;
        Relation out;
        out.schema_ = schema_;
        out.rows_ = rows_;
        for (size_t i = 0; i < schema_.size(); ++i) out.sort_key_.push_back(static_cast<int>(i));
        std::sort(out.rows_.begin(), out.rows_.end());
        return out;
    }

    struct RowLess {
        const std::vector<int>* key;
        bool operator()(const Row& a, const Row& b) const {
            for (int c : *key) {
                if (a[c] < b[c]) return true;
                if (a[c] > b[c]) return false;
            }
            return false;
        }
    };

    void normalize() {
        std::sort(rows_.begin(), rows_.end(), RowLess{&sort_key_});
        rows_.erase(std::unique(rows_.begin(), rows_.end()), rows_.end());
    }

    Schema schema_;
    std::vector<Row> rows_;
    std::vector<int> sort_key_;
};

// Relation symbol -> relation; ordered for deterministic iteration.
using Database = std::map<std::string, Relation>;

inline size_t database_size(const Database& db) {
    size_t n = 0;
    for (const auto& [name, rel] : db) n += rel.size();
    return n;
}

// A natural join query: a list of (relation symbol, schema) atoms. Joins are
// expressed by attribute sharing across schemas.
struct JoinQuery {
    struct Atom {
        std::string name;
        Schema schema;
    };
    std::vector<Atom> atoms;

    // Attributes in first-occurrence order.
    std::vector<std::string> attributes() const {
        std::vector<std::string> out;
        for (const auto& a : atoms)
            for (const auto& attr : a.schema.attrs())
                if (std::find(out.begin(), out.end(), attr) == out.end()) out.push_back(attr);
        return out;
    }

    const Atom* find(const std::string& name) const {
        for (const auto& a : atoms)
            if (a.name == name) return &a;
        return nullptr;
    }
};

inline std::vector<std::string> shared_attributes(const Schema& a, const Schema& b) {
    std::vector<std::string> out;
    for (const auto& attr : a.attrs())
        if (b.contains(attr)) out.push_back(attr);
    return out;
}

// pi_attrs(R): duplicate-free projection, output sorted on `attrs`.
inline Relation project(const Relation& r, const std::vector<std::string>& attrs) {
    std::vector<int> cols;
    for (const auto& a : attrs) cols.push_back(r.schema().index_of(a));
    std::vector<Row> rows;
    rows.reserve(r.size());
    for (const auto& row : r.rows()) {
        Row out(cols.size());
        for (size_t i = 0; i < cols.size(); ++i) out[i] = row[cols[i]];
        rows.push_back(std::move(out));
    }
    return Relation(Schema{attrs}, std::move(rows));
}

namespace detail {

inline Relation join_pair(const Relation& left, const Relation& right) {
    std::vector<std::string> shared = shared_attributes(left.schema(), right.schema());
    std::vector<std::string> out_attrs = left.schema().attrs();
    std::vector<int> right_extra;
    for (size_t i = 0; i < right.schema().size(); ++i) {
        if (!left.schema().contains(right.schema().at(i))) {
            out_attrs.push_back(right.schema().at(i));
            right_extra.push_back(static_cast<int>(i));
        }
    }
    Relation ls = left.sorted_by(shared);
    Relation rs = right.sorted_by(shared);
    std::vector<int> lk, rk;
    for (const auto& a : shared) {
        lk.push_back(left.schema().index_of(a));
        rk.push_back(right.schema().index_of(a));
    }
    auto key_of = [](const Row& row, const std::vector<int>& k) {
        Row key(k.size());
        for (size_t i = 0; i < k.size(); ++i) key[i] = row[k[i]];
        return key;
    };
    std::vector<Row> out;
    size_t i = 0, j = 0;
    while (i < ls.size() && j < rs.size()) {
        Row ki = key_of(ls.rows()[i], lk);
        Row kj = key_of(rs.rows()[j], rk);
        if (ki < kj) {
            ++i;
        } else if (kj < ki) {
            ++j;
        } else {
            size_t i2 = i, j2 = j;
            while (i2 < ls.size() && key_of(ls.rows()[i2], lk) == ki) ++i2;
            while (j2 < rs.size() && key_of(rs.rows()[j2], rk) == ki) ++j2;
            for (size_t a = i; a < i2; ++a) {
                for (size_t b = j; b < j2; ++b) {
                    Row combined = ls.rows()[a];
                    for (int c : right_extra) combined.push_back(rs.rows()[b][c]);
                    out.push_back(std::move(combined));
                }
            }
            i = i2;
            j = j2;
        }
    }
    return Relation(Schema{out_attrs}, std::move(out));
}

} // namespace detail

// Exact natural join by pairwise sort-merge. Test oracle and tiny-instance
// workhorse; not the worst-case-optimal path.
inline Relation natural_join_bruteforce(const std::vector<Relation>& rels) {
    if (rels.empty()) return Relation(Schema{{}}, {Row{}});
    Relation acc = rels[0];
    for (size_t i = 1; i < rels.size(); ++i) acc = detail::join_pair(acc, rels[i]);
    return acc;
}

// Rows of r with at least one joinable partner in s (one co-scan after
// sorting both on the shared attributes).
inline Relation semi_join_reduce(const Relation& r, const Relation& s) {
    std::vector<std::string> shared = shared_attributes(r.schema(), s.schema());
    if (shared.empty()) {
        if (s.empty()) return Relation(r.schema(), {});
        return r;
    }
    Relation keys = project(s, shared);
    std::vector<int> cols;
    for (const auto& a : shared) cols.push_back(r.schema().index_of(a));
    std::vector<Row> out;
    for (const auto& row : r.rows()) {
        Row key(cols.size());
        for (size_t i = 0; i < cols.size(); ++i) key[i] = row[cols[i]];
        if (keys.contains(key)) out.push_back(row);
    }
    return Relation(r.schema(), std::move(out));
}

// True iff neither relation has a dangling tuple w.r.t. their natural join.
inline bool is_consistent(const Relation& r, const Relation& s) {
    return semi_join_reduce(r, s).size() == r.size() &&
           semi_join_reduce(s, r).size() == s.size();
}

} // namespace covers
