#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "covers/decomposition.hpp"
#include "covers/drep.hpp"
#include "covers/error.hpp"
#include "covers/hypergraph.hpp"
#include "covers/planner.hpp"
#include "covers/rational.hpp"
#include "covers/relation.hpp"

namespace covers {

// The four shipped commutative semirings over exact rationals. Boolean values
// live in {0,1}, count in the nonnegative integers, max-product in the
// nonnegative rationals; all share additive identity 0 and unit 1.
struct Semiring {
    enum class Kind { Boolean, Count, SumProduct, MaxProduct };
    Kind kind = Kind::SumProduct;

    static Semiring parse(const std::string& name) {
        Semiring s;
        if (name == "boolean") s.kind = Kind::Boolean;
        else if (name == "count") s.kind = Kind::Count;
        else if (name == "sumproduct" || name == "sumproduct-rational") s.kind = Kind::SumProduct;
        else if (name == "maxproduct" || name == "maxproduct-rational") s.kind = Kind::MaxProduct;
        else throw ParseError("unknown semiring: " + name);
        return s;
    }

    std::string name() const {
        switch (kind) {
            case Kind::Boolean: return "boolean";
            case Kind::Count: return "count";
            case Kind::SumProduct: return "sumproduct-rational";
            case Kind::MaxProduct: return "maxproduct-rational";
        }
        return "";
    }

    Rational zero() const { return Rational(0); }
    Rational one() const { return Rational(1); }

    Rational add(const Rational& a, const Rational& b) const {
        switch (kind) {
            case Kind::Boolean: return (!a.is_zero() || !b.is_zero()) ? Rational(1) : Rational(0);
            case Kind::MaxProduct: return std::max(a, b);
            default: return a + b;
        }
    }
    Rational mul(const Rational& a, const Rational& b) const {
        if (kind == Kind::Boolean)
            return (!a.is_zero() && !b.is_zero()) ? Rational(1) : Rational(0);
        return a * b;
    }
    Rational pow(const Rational& a, unsigned long long e) const {
        if (kind == Kind::Boolean) return e == 0 ? Rational(1) : a;
        return a.pow(e);
    }

    void check_value(const Rational& v) const {
        switch (kind) {
            case Kind::Boolean:
                if (!(v == Rational(0) || v == Rational(1)))
                    throw ValidationError("boolean semiring values must be 0 or 1");
                break;
            case Kind::Count:
                if (!v.is_integer() || v < Rational(0))
                    throw ValidationError("count semiring values must be nonnegative integers");
                break;
            case Kind::MaxProduct:
                if (v < Rational(0))
                    throw ValidationError("max-product semiring values must be nonnegative");
                break;
            case Kind::SumProduct:
                break;
        }
    }
};

// Listing representation of a function psi_S: tuples over S with a nonzero
// semiring value. Rows are sorted and tuple-unique; zero rows are dropped.
struct FactorRelation {
    std::string name;
    std::vector<std::string> attrs;
    std::vector<std::pair<Row, Rational>> rows;

    FactorRelation() = default;
    FactorRelation(std::string n, std::vector<std::string> a,
                   std::vector<std::pair<Row, Rational>> r)
        : name(std::move(n)), attrs(std::move(a)), rows(std::move(r)) {
        Schema check{attrs};
        for (const auto& [tuple, value] : rows)
            if (tuple.size() != attrs.size())
                throw ValidationError("factor row arity mismatch in " + name);
        std::sort(rows.begin(), rows.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        for (size_t i = 0; i + 1 < rows.size(); ++i)
            if (rows[i].first == rows[i + 1].first)
                throw ValidationError("duplicate tuple in factor " + name);
        rows.erase(std::remove_if(rows.begin(), rows.end(),
                                  [](const auto& r) { return r.second.is_zero(); }),
                   rows.end());
    }

    int col(const std::string& a) const {
        auto it = std::find(attrs.begin(), attrs.end(), a);
        if (it == attrs.end()) throw UnknownAttributeError("factor has no attribute " + a);
        return static_cast<int>(it - attrs.begin());
    }
    bool has(const std::string& a) const {
        return std::find(attrs.begin(), attrs.end(), a) != attrs.end();
    }

    std::optional<Rational> value_of(const Row& tuple) const {
        auto it = std::lower_bound(rows.begin(), rows.end(), tuple,
                                   [](const auto& r, const Row& t) { return r.first < t; });
        if (it == rows.end() || it->first != tuple) return std::nullopt;
        return it->second;
    }

    // Support as a plain relation, value column dropped.
    Relation support() const {
        std::vector<Row> out;
        for (const auto& [tuple, value] : rows) out.push_back(tuple);
        return Relation(Schema{attrs}, std::move(out));
    }
};

// psi_{S/T}: 1 on the projection of psi_S's support onto S n T.
inline FactorRelation indicator_projection(const FactorRelation& f,
                                           const std::vector<std::string>& t) {
    std::vector<std::string> common;
    for (const auto& a : f.attrs)
        if (std::find(t.begin(), t.end(), a) != t.end()) common.push_back(a);
    if (common.empty())
        throw EmptyIntersectionError("indicator projection needs a shared attribute");
    std::vector<int> cols;
    for (const auto& a : common) cols.push_back(f.col(a));
    std::set<Row> seen;
    std::vector<std::pair<Row, Rational>> rows;
    for (const auto& [tuple, value] : f.rows) {
        Row proj(cols.size());
        for (size_t i = 0; i < cols.size(); ++i) proj[i] = tuple[cols[i]];
        if (seen.insert(proj).second) rows.emplace_back(proj, Rational(1));
    }
    return FactorRelation(f.name + "_ind", common, std::move(rows));
}

namespace detail {

// Natural join of two listing representations with values multiplied.
inline FactorRelation factor_multiply(const FactorRelation& a, const FactorRelation& b,
                                      const Semiring& s) {
    std::vector<std::string> shared;
    for (const auto& attr : a.attrs)
        if (b.has(attr)) shared.push_back(attr);
    std::vector<std::string> out_attrs = a.attrs;
    std::vector<int> b_extra;
    for (size_t i = 0; i < b.attrs.size(); ++i)
        if (std::find(a.attrs.begin(), a.attrs.end(), b.attrs[i]) == a.attrs.end()) {
            out_attrs.push_back(b.attrs[i]);
            b_extra.push_back(static_cast<int>(i));
        }
    std::vector<int> ak, bk;
    for (const auto& attr : shared) {
        ak.push_back(a.col(attr));
        bk.push_back(b.col(attr));
    }
    auto key_of = [](const Row& r, const std::vector<int>& k) {
        Row key(k.size());
        for (size_t i = 0; i < k.size(); ++i) key[i] = r[k[i]];
        return key;
    };
    auto sorted_by_key = [&](const FactorRelation& f, const std::vector<int>& k) {
        std::vector<const std::pair<Row, Rational>*> ptrs;
        for (const auto& r : f.rows) ptrs.push_back(&r);
        std::stable_sort(ptrs.begin(), ptrs.end(), [&](const auto* x, const auto* y) {
            return key_of(x->first, k) < key_of(y->first, k);
        });
        return ptrs;
    };
    auto pa = sorted_by_key(a, ak), pb = sorted_by_key(b, bk);
    std::vector<std::pair<Row, Rational>> rows;
    size_t i = 0, j = 0;
    while (i < pa.size() && j < pb.size()) {
        Row ki = key_of(pa[i]->first, ak), kj = key_of(pb[j]->first, bk);
        if (ki < kj) ++i;
        else if (kj < ki) ++j;
        else {
            size_t i2 = i, j2 = j;
            while (i2 < pa.size() && key_of(pa[i2]->first, ak) == ki) ++i2;
            while (j2 < pb.size() && key_of(pb[j2]->first, bk) == ki) ++j2;
            for (size_t x = i; x < i2; ++x)
                for (size_t y = j; y < j2; ++y) {
                    Row combined = pa[x]->first;
                    for (int c : b_extra) combined.push_back(pb[y]->first[c]);
                    rows.emplace_back(std::move(combined), s.mul(pa[x]->second, pb[y]->second));
                }
            i = i2;
            j = j2;
        }
    }
    return FactorRelation(a.name + "*" + b.name, std::move(out_attrs), std::move(rows));
}

// Folds attr out of f with the semiring addition (or max/or).
inline FactorRelation factor_aggregate_out(const FactorRelation& f, const std::string& attr,
                                           const Semiring& s, const std::string& out_name) {
    int drop = f.col(attr);
    std::vector<std::string> out_attrs;
    for (const auto& a : f.attrs)
        if (a != attr) out_attrs.push_back(a);
    std::map<Row, Rational> grouped;
    for (const auto& [tuple, value] : f.rows) {
        Row rest;
        for (size_t i = 0; i < tuple.size(); ++i)
            if (static_cast<int>(i) != drop) rest.push_back(tuple[i]);
        auto it = grouped.find(rest);
        if (it == grouped.end()) grouped.emplace(std::move(rest), value);
        else it->second = s.add(it->second, value);
    }
    std::vector<std::pair<Row, Rational>> rows(grouped.begin(), grouped.end());
    return FactorRelation(out_name, std::move(out_attrs), std::move(rows));
}

// Folds attr out of f with multiplication over the whole declared domain:
// only groups covering every domain value survive.
inline FactorRelation factor_multiply_out(const FactorRelation& f, const std::string& attr,
                                          unsigned long long dom_size, const Semiring& s,
                                          const std::string& out_name) {
    int drop = f.col(attr);
    std::vector<std::string> out_attrs;
    for (const auto& a : f.attrs)
        if (a != attr) out_attrs.push_back(a);
    std::map<Row, std::pair<Rational, unsigned long long>> grouped; // product, count
    for (const auto& [tuple, value] : f.rows) {
        Row rest;
        for (size_t i = 0; i < tuple.size(); ++i)
            if (static_cast<int>(i) != drop) rest.push_back(tuple[i]);
        auto it = grouped.find(rest);
        if (it == grouped.end()) grouped.emplace(std::move(rest), std::make_pair(value, 1ULL));
        else {
            it->second.first = s.mul(it->second.first, value);
            it->second.second += 1;
        }
    }
    std::vector<std::pair<Row, Rational>> rows;
    for (const auto& [rest, pv] : grouped)
        if (pv.second == dom_size) rows.emplace_back(rest, pv.first);
    return FactorRelation(out_name, std::move(out_attrs), std::move(rows));
}

inline FactorRelation factor_power(const FactorRelation& f, unsigned long long e,
                                   const Semiring& s) {
    std::vector<std::pair<Row, Rational>> rows;
    for (const auto& [tuple, value] : f.rows) rows.emplace_back(tuple, s.pow(value, e));
    return FactorRelation(f.name, f.attrs, std::move(rows));
}

} // namespace detail

// Per-bound-attribute aggregate: the semiring's addition, or its product.
enum class BoundOp { Aggregate, Multiply };

// An FAQ: attribute order tau with the free attributes as a prefix, one
// aggregate operator per bound attribute, one factor per hyperedge.
struct FaqQuery {
    Semiring semiring;
    std::vector<std::string> order; // tau
    size_t num_free = 0;
    std::map<std::string, BoundOp> bound_ops;
    std::vector<FactorRelation> factors;
    std::map<std::string, unsigned long long> declared_domains;

    std::vector<std::string> free_attrs() const {
        return {order.begin(), order.begin() + num_free};
    }

    void validate() const {
        if (num_free > order.size()) throw MalformedOrderError("free prefix exceeds order");
        std::set<std::string> seen;
        for (const auto& a : order)
            if (!seen.insert(a).second) throw MalformedOrderError("duplicate attribute in order: " + a);
        for (size_t i = 0; i < order.size(); ++i) {
            bool bound = bound_ops.count(order[i]) > 0;
            if (i < num_free && bound)
                throw MalformedOrderError("free attribute " + order[i] + " has an aggregate");
            if (i >= num_free && !bound)
                throw MalformedOrderError("bound attribute " + order[i] + " lacks an aggregate");
        }
        std::set<std::string> in_factors;
        for (const auto& f : factors) {
            for (const auto& a : f.attrs) {
                in_factors.insert(a);
                if (!seen.count(a))
                    throw MalformedOrderError("factor attribute " + a + " missing from order");
            }
            for (const auto& [tuple, value] : f.rows) semiring.check_value(value);
        }
        for (const auto& a : order)
            if (!in_factors.count(a))
                throw MalformedOrderError("attribute " + a + " occurs in no factor");
    }

    Hypergraph hypergraph() const {
        Hypergraph h;
        for (const auto& a : order) h.add_node(a);
        for (const auto& f : factors) {
            std::vector<int> ids;
            for (const auto& a : f.attrs) ids.push_back(h.node_id(a));
            h.add_edge(f.name, std::move(ids));
        }
        return h;
    }

    std::vector<Value> active_domain(const std::string& attr) const {
        std::set<Value> vals;
        for (const auto& f : factors) {
            if (!f.has(attr)) continue;
            int c = f.col(attr);
            for (const auto& [tuple, value] : f.rows) vals.insert(tuple[c]);
        }
        return {vals.begin(), vals.end()};
    }

    unsigned long long domain_size(const std::string& attr) const {
        auto it = declared_domains.find(attr);
        if (it != declared_domains.end()) return it->second;
        size_t active = active_domain(attr).size();
        if (active == 0)
            throw ValidationError("attribute " + attr + " has an empty domain and no declared size");
        return active;
    }
};

// Merges every factor whose attribute set is contained in another factor's
// (psi'_S = psi_S x psi_T); the FAQ semantics are unchanged and the
// no-subset-edge precondition of the bag-function machinery holds afterwards.
inline FaqQuery absorb_subset_factors(FaqQuery q) {
    // Merging factors can shrink active domains, so pin the nominal domain
    // sizes of product-aggregated attributes first.
    for (const auto& [attr, op] : q.bound_ops)
        if (op == BoundOp::Multiply && !q.declared_domains.count(attr))
            q.declared_domains[attr] = q.domain_size(attr);
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < q.factors.size() && !changed; ++i) {
            for (size_t j = 0; j < q.factors.size() && !changed; ++j) {
                if (i == j) continue;
                const auto& big = q.factors[i];
                const auto& small = q.factors[j];
                bool subset = true;
                for (const auto& a : small.attrs) subset = subset && big.has(a);
                if (!subset) continue;
                FactorRelation merged = detail::factor_multiply(big, small, q.semiring);
                merged.name = big.name;
                q.factors[i] = std::move(merged);
                q.factors.erase(q.factors.begin() + j);
                changed = true;
            }
        }
    }
    return q;
}

// InsideOut bound-attribute elimination, innermost (last in tau) first.
// Aggregate case: join the touched factors with the indicator projections of
// every overlapping outside factor, then fold the attribute out by oplus.
// Product case: fold the attribute out of touched factors over the full
// domain and raise untouched factors to the domain-size power.
inline FaqQuery eliminate_bound(FaqQuery q) {
    q.validate();
    // |dom(A)| is a property of the query, so capture it before any
    // elimination step can empty a factor.
    std::map<std::string, unsigned long long> dom_sizes;
    for (const auto& [attr, op] : q.bound_ops)
        if (op == BoundOp::Multiply) dom_sizes[attr] = q.domain_size(attr);
    int fresh = 0;
    for (size_t step = q.order.size(); step > q.num_free; --step) {
        const std::string attr = q.order[step - 1];
        BoundOp op = q.bound_ops.at(attr);
        if (op == BoundOp::Aggregate) {
            std::vector<FactorRelation> touched, rest;
            for (auto& f : q.factors) (f.has(attr) ? touched : rest).push_back(std::move(f));
            std::set<std::string> u;
            for (const auto& f : touched)
                for (const auto& a : f.attrs) u.insert(a);
            std::vector<std::string> u_attrs(u.begin(), u.end());

            FactorRelation joined = std::move(touched.front());
            for (size_t i = 1; i < touched.size(); ++i)
                joined = detail::factor_multiply(joined, touched[i], q.semiring);
            for (const auto& f : rest) {
                bool overlaps = false;
                for (const auto& a : f.attrs) overlaps = overlaps || u.count(a) > 0;
                if (overlaps)
                    joined = detail::factor_multiply(joined, indicator_projection(f, u_attrs),
                                                     q.semiring);
            }
            FactorRelation eliminated = detail::factor_aggregate_out(
                joined, attr, q.semiring, "elim" + std::to_string(fresh++) + "_" + attr);
            rest.push_back(std::move(eliminated));
            q.factors = std::move(rest);
        } else {
            unsigned long long dom = dom_sizes.at(attr);
            std::vector<FactorRelation> next;
            for (auto& f : q.factors) {
                if (f.has(attr))
                    next.push_back(detail::factor_multiply_out(
                        f, attr, dom, q.semiring, "elim" + std::to_string(fresh++) + "_" + attr));
                else
                    next.push_back(detail::factor_power(f, dom, q.semiring));
            }
            q.factors = std::move(next);
        }
        q.bound_ops.erase(attr);
        q.order.pop_back();
    }
    return q;
}

// faqw(tau): the elimination hypergraph sequence is built symbolically over
// tau (free attributes use the aggregate rule); the width is the max over
// rho* of the original hypergraph restricted to U_j, taken over the free
// positions and the non-product bound positions.
inline Rational faq_width(const FaqQuery& q) {
    q.validate();
    Hypergraph h = q.hypergraph();
    std::vector<std::set<std::string>> edges;
    for (const auto& f : q.factors) edges.emplace_back(f.attrs.begin(), f.attrs.end());

    Rational best(0);
    for (size_t j = q.order.size(); j >= 1; --j) {
        const std::string& attr = q.order[j - 1];
        bool in_k = j <= q.num_free ||
                    q.bound_ops.at(attr) == BoundOp::Aggregate;
        std::set<std::string> u;
        for (const auto& e : edges)
            if (e.count(attr))
                for (const auto& a : e) u.insert(a);
        if (in_k && !u.empty()) {
            RestrictedHypergraph rh =
                restrict_hypergraph(h, std::vector<std::string>(u.begin(), u.end()));
            best = std::max(best, fractional_edge_cover_number(rh.graph));
        }
        // advance the elimination hypergraph sequence
        bool product = j > q.num_free && q.bound_ops.at(attr) == BoundOp::Multiply;
        if (product) {
            for (auto& e : edges) e.erase(attr);
            edges.erase(std::remove_if(edges.begin(), edges.end(),
                                       [](const auto& e) { return e.empty(); }),
                        edges.end());
        } else {
            std::vector<std::set<std::string>> next;
            for (auto& e : edges)
                if (!e.count(attr)) next.push_back(std::move(e));
            u.erase(attr);
            if (!u.empty()) next.push_back(std::move(u));
            edges = std::move(next);
        }
    }
    return best;
}

// One bag function per bag: the product of the factors mapped to the bag and
// the indicator projections of every overlapping factor. The listing
// representations are then calibrated over the decomposition tree, which
// deletes rows whose full product is zero anyway.
struct BagFunctionSet {
    std::vector<std::string> bag_ids;
    std::vector<std::string> value_columns; // "__beta_<bag>"
    std::vector<FactorRelation> betas;      // attrs = bag attributes
    std::map<std::string, std::string> factor_to_bag;
};

inline BagFunctionSet bag_functions(const FaqQuery& q, const Decomposition& t,
                                    const std::map<std::string, std::string>& mapping = {}) {
    if (q.num_free != q.order.size())
        throw ValidationError("bag functions need a bound-free query");
    JoinQuery support_query;
    for (const auto& f : q.factors) support_query.atoms.push_back({f.name, Schema{f.attrs}});
    ValidityReport report = validate_decomposition(support_query, t);
    if (!report.valid())
        throw InvalidDecompositionError("invalid decomposition: " + report.to_string());

    BagFunctionSet out;
    out.bag_ids = t.bag_ids;

    auto bag_contains = [&](size_t b, const FactorRelation& f) {
        for (const auto& a : f.attrs)
            if (std::find(t.bags[b].begin(), t.bags[b].end(), a) == t.bags[b].end()) return false;
        return true;
    };
    // m(S): explicit override, else the lexicographically least containing bag
    std::vector<int> assigned(q.factors.size(), -1);
    for (size_t i = 0; i < q.factors.size(); ++i) {
        auto it = mapping.find(q.factors[i].name);
        if (it != mapping.end()) {
            int b = t.bag_index(it->second);
            if (!bag_contains(b, q.factors[i]))
                throw BadMappingError("factor " + q.factors[i].name + " not contained in bag " +
                                      it->second);
            assigned[i] = b;
        } else {
            int best = -1;
            std::vector<std::string> best_key;
            for (size_t b = 0; b < t.bags.size(); ++b) {
                if (!bag_contains(b, q.factors[i])) continue;
                std::vector<std::string> key = t.bags[b];
                std::sort(key.begin(), key.end());
                if (best == -1 || key < best_key) {
                    best = static_cast<int>(b);
                    best_key = key;
                }
            }
            if (best == -1)
                throw BadMappingError("no bag contains factor " + q.factors[i].name);
            assigned[i] = best;
        }
        out.factor_to_bag[q.factors[i].name] = t.bag_ids[assigned[i]];
    }

    for (size_t b = 0; b < t.bags.size(); ++b) {
        std::optional<FactorRelation> beta;
        auto fold = [&](FactorRelation f) {
            if (!beta) beta = std::move(f);
            else beta = detail::factor_multiply(*beta, f, q.semiring);
        };
        for (size_t i = 0; i < q.factors.size(); ++i) {
            bool overlaps = false;
            for (const auto& a : q.factors[i].attrs)
                overlaps = overlaps ||
                           std::find(t.bags[b].begin(), t.bags[b].end(), a) != t.bags[b].end();
            if (overlaps) fold(indicator_projection(q.factors[i], t.bags[b]));
        }
        for (size_t i = 0; i < q.factors.size(); ++i)
            if (assigned[i] == static_cast<int>(b)) fold(q.factors[i]);
        if (!beta) throw BadMappingError("bag " + t.bag_ids[b] + " touches no factor");
        // reorder columns to the bag's declared attribute order
        std::vector<int> perm;
        for (const auto& a : t.bags[b]) perm.push_back(beta->col(a));
        std::vector<std::pair<Row, Rational>> rows;
        for (const auto& [tuple, value] : beta->rows) {
            Row r(perm.size());
            for (size_t c = 0; c < perm.size(); ++c) r[c] = tuple[perm[c]];
            rows.emplace_back(std::move(r), value);
        }
        out.betas.push_back(
            FactorRelation("beta_" + t.bag_ids[b], t.bags[b], std::move(rows)));
        out.value_columns.push_back("__beta_" + t.bag_ids[b]);
    }

    // calibrate supports along the tree (bottom-up then top-down)
    auto semi = [&](FactorRelation& f, const FactorRelation& g) {
        std::vector<std::string> shared;
        for (const auto& a : f.attrs)
            if (g.has(a)) shared.push_back(a);
        if (shared.empty()) {
            if (g.rows.empty()) f.rows.clear();
            return;
        }
        Relation keys = project(g.support(), shared);
        std::vector<int> cols;
        for (const auto& a : shared) cols.push_back(f.col(a));
        std::vector<std::pair<Row, Rational>> kept;
        for (const auto& row : f.rows) {
            Row key(cols.size());
            for (size_t i = 0; i < cols.size(); ++i) key[i] = row.first[cols[i]];
            if (keys.contains(key)) kept.push_back(row);
        }
        f.rows = std::move(kept);
    };
    std::vector<int> parent = t.parents();
    std::vector<int> pre = t.preorder();
    for (auto it = pre.rbegin(); it != pre.rend(); ++it) {
        int c = *it;
        if (parent[c] < 0) continue;
        semi(out.betas[parent[c]], out.betas[c]);
        semi(out.betas[c], out.betas[parent[c]]);
    }
    for (int c : pre) {
        if (parent[c] < 0) continue;
        semi(out.betas[c], out.betas[parent[c]]);
        semi(out.betas[parent[c]], out.betas[c]);
    }
    bool any_empty = false;
    for (const auto& beta : out.betas) any_empty = any_empty || beta.rows.empty();
    if (any_empty)
        for (auto& beta : out.betas) beta.rows.clear();
    return out;
}

// A cover of an FAQ result: relation over the free attributes extended with
// one aggregate column per bag, together with ext(T, beta).
struct FaqCover {
    Cover cover;
    Semiring semiring;
    std::vector<std::string> free_attrs;
    std::vector<std::string> value_columns; // aligned with decomposition bags
};

inline FaqCover faq_cover(const FaqQuery& q, const Decomposition& t,
                          const std::map<std::string, std::string>& mapping = {},
                          const std::optional<CoverJoinPlan>& plan_override = std::nullopt,
                          std::optional<uint64_t> seed = std::nullopt) {
    FaqQuery residual = eliminate_bound(absorb_subset_factors(q));
    residual = absorb_subset_factors(residual);
    BagFunctionSet bags = bag_functions(residual, t, mapping);

    // ext(T, beta): each bag gains its value column
    Decomposition ext = t;
    ext.per_bag_cover.clear();
    ext.per_bag_weight.clear();
    for (size_t b = 0; b < ext.bags.size(); ++b)
        ext.bags[b].push_back(bags.value_columns[b]);

    AcyclicInstance inst;
    for (size_t b = 0; b < ext.bags.size(); ++b) {
        inst.query.atoms.push_back({ext.bag_ids[b], Schema{ext.bags[b]}});
        std::vector<Row> rows;
        for (const auto& [tuple, value] : bags.betas[b].rows) {
            Row r = tuple;
            r.push_back(value.str());
            rows.push_back(std::move(r));
        }
        inst.database.emplace(ext.bag_ids[b], Relation(Schema{ext.bags[b]}, std::move(rows)));
    }
    inst.join_tree.symbols = ext.bag_ids;
    for (const auto& bag : ext.bags) inst.join_tree.schemas.push_back(Schema{bag});
    inst.join_tree.edges = ext.tree_edges;
    inst.join_tree.root = ext.root;

    CoverJoinPlan plan = plan_override ? *plan_override : default_plan(inst.join_tree);
    Cover c = execute_plan(plan, inst, seed);
    ext = analyze_decomposition(inst.query, ext);
    c.decomposition = ext;

    FaqCover out;
    out.cover = std::move(c);
    out.semiring = q.semiring;
    out.free_attrs = q.free_attrs();
    out.value_columns = bags.value_columns;
    // canonical column order: free attributes then value columns
    std::vector<std::string> order = out.free_attrs;
    for (const auto& v : out.value_columns) order.push_back(v);
    out.cover.relation = out.cover.relation.reordered(order);
    return out;
}

// Enumerates the FAQ's listing representation from a cover: the join of the
// bag relations streamed through the d-representation, each tuple's value
// recombined as the product of its per-bag aggregate columns.
struct FaqOutputRow {
    Row free;
    Rational value;
};

inline std::vector<FaqOutputRow> faq_enumerate(const FaqCover& fc) {
    std::vector<FaqOutputRow> out;
    if (fc.cover.relation.empty()) return out;
    MultimapDRep rep = cover_to_drep(fc.cover.relation, fc.cover.decomposition);
    std::vector<int> free_pos, value_pos;
    for (const auto& a : fc.free_attrs) free_pos.push_back(rep.dtree.index_of(a));
    for (const auto& v : fc.value_columns) value_pos.push_back(rep.dtree.index_of(v));
    for (DRepEnumerator it(rep); !it.done(); it.advance()) {
        const Row& full = it.current();
        FaqOutputRow row;
        row.free.reserve(free_pos.size());
        for (int p : free_pos) row.free.push_back(full[p]);
        row.value = fc.semiring.one();
        for (int p : value_pos) row.value = fc.semiring.mul(row.value, Rational::parse(full[p]));
        if (!row.value.is_zero()) out.push_back(std::move(row));
    }
    std::sort(out.begin(), out.end(),
              [](const FaqOutputRow& a, const FaqOutputRow& b) { return a.free < b.free; });
    return out;
}

} // namespace covers
