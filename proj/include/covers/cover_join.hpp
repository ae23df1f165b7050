#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "covers/decomposition.hpp"
#include "covers/error.hpp"
#include "covers/hypergraph.hpp"
#include "covers/relation.hpp"

namespace covers {

// A cover is only meaningful together with the decomposition it preserves.
struct Cover {
    Relation relation;
    Decomposition decomposition;
};

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct JoinBlocks {
    Relation left_sorted, right_sorted;
    std::vector<int> left_key_cols, right_key_cols;
    std::vector<int> right_extra_cols;
    Schema out_schema;
    // [l_begin, l_end) x [r_begin, r_end) per matched key block
    struct Block {
        size_t l_begin, l_end, r_begin, r_end;
    };
    std::vector<Block> blocks;

    Row combine(size_t li, size_t ri) const {
        Row out = left_sorted.rows()[li];
        for (int c : right_extra_cols) out.push_back(right_sorted.rows()[ri][c]);
        return out;
    }
};

inline JoinBlocks join_blocks(const Relation& r1, const Relation& r2, bool check_consistent) {
    JoinBlocks jb;
    std::vector<std::string> shared = shared_attributes(r1.schema(), r2.schema());
    jb.left_sorted = r1.sorted_by(shared);
    jb.right_sorted = r2.sorted_by(shared);
    for (const auto& a : shared) {
        jb.left_key_cols.push_back(r1.schema().index_of(a));
        jb.right_key_cols.push_back(r2.schema().index_of(a));
    }
    std::vector<std::string> out_attrs = r1.schema().attrs();
    for (size_t i = 0; i < r2.schema().size(); ++i) {
        if (!r1.schema().contains(r2.schema().at(i))) {
            out_attrs.push_back(r2.schema().at(i));
            jb.right_extra_cols.push_back(static_cast<int>(i));
        }
    }
    jb.out_schema = Schema{out_attrs};

    auto key_of = [](const Relation& r, size_t row, const std::vector<int>& cols) {
        Row key(cols.size());
        for (size_t i = 0; i < cols.size(); ++i) key[i] = r.rows()[row][cols[i]];
        return key;
    };
    size_t i = 0, j = 0;
    while (i < jb.left_sorted.size() && j < jb.right_sorted.size()) {
        Row ki = key_of(jb.left_sorted, i, jb.left_key_cols);
        Row kj = key_of(jb.right_sorted, j, jb.right_key_cols);
        if (ki < kj) {
            if (check_consistent)
                throw InconsistentInputsError("left tuple has no join partner (uncalibrated input)");
            ++i;
        } else if (kj < ki) {
            if (check_consistent)
                throw InconsistentInputsError("right tuple has no join partner (uncalibrated input)");
            ++j;
        } else {
            size_t i2 = i, j2 = j;
            while (i2 < jb.left_sorted.size() && key_of(jb.left_sorted, i2, jb.left_key_cols) == ki)
                ++i2;
            while (j2 < jb.right_sorted.size() &&
                   key_of(jb.right_sorted, j2, jb.right_key_cols) == ki)
                ++j2;
            jb.blocks.push_back({i, i2, j, j2});
            i = i2;
            j = j2;
        }
    }
    if (check_consistent && (i < jb.left_sorted.size() || j < jb.right_sorted.size()))
        throw InconsistentInputsError("dangling tuples after last shared block");
    return jb;
}

} // namespace detail

// The binary cover-join: a minimum-size cover of R1 |><| R2 over the two-bag
// decomposition {sgn(R1), sgn(R2)}. Per shared-key block the rows are paired
// one-to-one and the overhang of the larger side fans into one fixed row of
// the smaller side (the block's last row; a seed picks another fan-out row,
// which yields a different but equally valid cover). Inputs must be
// consistent; `check_consistent` enforces that in debug-style use.
inline Relation cover_join(const Relation& r1, const Relation& r2,
                           std::optional<uint64_t> seed = std::nullopt,
                           bool check_consistent = false) {
    detail::JoinBlocks jb = detail::join_blocks(r1, r2, check_consistent);
    std::vector<Row> out;
    size_t block_index = 0;
    for (const auto& blk : jb.blocks) {
        size_t n1 = blk.l_end - blk.l_begin;
        size_t n2 = blk.r_end - blk.r_begin;
        bool left_large = n1 >= n2;
        size_t big = left_large ? n1 : n2;
        size_t small = left_large ? n2 : n1;
        size_t fan = small - 1;
        if (seed) fan = detail::splitmix64(*seed + block_index) % small;
        // small-side row order with the fan-out row moved last
        std::vector<size_t> small_rows;
        for (size_t k = 0; k < small; ++k)
            if (k != fan) small_rows.push_back(k);
        small_rows.push_back(fan);
        for (size_t j = 0; j < big; ++j) {
            size_t s = small_rows[std::min(j, small - 1)];
            size_t li = left_large ? blk.l_begin + j : blk.l_begin + s;
            size_t ri = left_large ? blk.r_begin + s : blk.r_begin + j;
            out.push_back(jb.combine(li, ri));
        }
        ++block_index;
    }
    return Relation(jb.out_schema, std::move(out));
}

// Exhaustive oracle: every cover of R1 |><| R2 over {sgn(R1), sgn(R2)}, i.e.
// the cross product of the minimal edge covers of each block's complete
// bipartite result hypergraph.
inline std::vector<Relation> cover_join_all(const Relation& r1, const Relation& r2,
                                            size_t max_block_nodes = 6) {
    detail::JoinBlocks jb = detail::join_blocks(r1, r2, false);
    std::vector<std::vector<std::vector<Row>>> block_choices; // per block, per cover, rows
    for (const auto& blk : jb.blocks) {
        size_t n1 = blk.l_end - blk.l_begin;
        size_t n2 = blk.r_end - blk.r_begin;
        if (n1 > max_block_nodes || n2 > max_block_nodes)
            throw TooLargeError("join block exceeds " + std::to_string(max_block_nodes) +
                                " rows per side");
        Hypergraph h;
        for (size_t a = 0; a < n1 + n2; ++a) h.add_node("n" + std::to_string(a));
        std::vector<std::pair<size_t, size_t>> edge_rows;
        for (size_t a = 0; a < n1; ++a) {
            for (size_t b = 0; b < n2; ++b) {
                h.add_edge("e", {static_cast<int>(a), static_cast<int>(n1 + b)});
                edge_rows.emplace_back(blk.l_begin + a, blk.r_begin + b);
            }
        }
        std::vector<std::vector<Row>> covers;
        for (const auto& m : all_minimal_edge_covers(h)) {
            std::vector<Row> rows;
            for (int e : m) rows.push_back(jb.combine(edge_rows[e].first, edge_rows[e].second));
            covers.push_back(std::move(rows));
        }
        block_choices.push_back(std::move(covers));
    }

    std::vector<Relation> out;
    std::vector<size_t> pick(block_choices.size(), 0);
    for (;;) {
        std::vector<Row> rows;
        for (size_t b = 0; b < block_choices.size(); ++b)
            for (const auto& r : block_choices[b][pick[b]]) rows.push_back(r);
        out.push_back(Relation(jb.out_schema, std::move(rows)));
        size_t b = 0;
        while (b < pick.size() && ++pick[b] == block_choices[b].size()) {
            pick[b] = 0;
            ++b;
        }
        if (b == pick.size()) break;
        if (pick.empty()) break;
    }
    return out;
}

// is_cover verdicts. Result preservation is checked bag by bag against the
// oracle join; minimality by testing each row for removability (a row is
// removable iff every one of its bag projections also occurs in another row).
struct CoverVerdict {
    enum class Kind { Cover, NotResultPreserving, NotMinimal };
    Kind kind = Kind::Cover;

    // NotResultPreserving
    std::string bag_id;
    std::vector<std::string> bag_attrs;
    std::vector<Row> missing; // in pi_B Q(D) but not in pi_B K
    std::vector<Row> extra;   // in pi_B K but not in pi_B Q(D)

    // NotMinimal
    Row removable_row;

    bool is_cover() const { return kind == Kind::Cover; }

    std::string describe() const {
        switch (kind) {
            case Kind::Cover:
                return "Cover";
            case Kind::NotResultPreserving: {
                std::string out = "NotResultPreserving(bag " + bag_id;
                auto fmt = [](const std::vector<Row>& rows) {
                    std::string s;
                    for (const auto& r : rows) {
                        s += " (";
                        for (size_t i = 0; i < r.size(); ++i) {
                            if (i) s += ",";
                            s += r[i];
                        }
                        s += ")";
                    }
                    return s;
                };
                if (!missing.empty()) out += "; missing" + fmt(missing);
                if (!extra.empty()) out += "; extra" + fmt(extra);
                return out + ")";
            }
            case Kind::NotMinimal: {
                std::string out = "NotMinimal(row";
                for (size_t i = 0; i < removable_row.size(); ++i)
                    out += (i ? "," : " ") + removable_row[i];
                return out + ")";
            }
        }
        return "";
    }
};

inline CoverVerdict is_cover(const Relation& k, const JoinQuery& q, const Decomposition& t,
                             const Database& db) {
    {
        Schema want{q.attributes()};
        if (!k.schema().same_attribute_set(want))
            throw SchemaMismatchError("cover schema must equal att(Q)");
    }
    std::vector<Relation> rels;
    for (const auto& atom : q.atoms) {
        auto it = db.find(atom.name);
        if (it == db.end()) throw ValidationError("relation missing from database: " + atom.name);
        rels.push_back(it->second);
    }
    Relation result = natural_join_bruteforce(rels);

    for (size_t b = 0; b < t.bags.size(); ++b) {
        Relation pk = project(k, t.bags[b]);
        Relation pr = project(result, t.bags[b]);
        if (pk.same_rows(pr)) continue;
        CoverVerdict v;
        v.kind = CoverVerdict::Kind::NotResultPreserving;
        v.bag_id = t.bag_ids[b];
        v.bag_attrs = t.bags[b];
        for (const auto& row : pr.rows())
            if (!pk.contains(row)) v.missing.push_back(row);
        for (const auto& row : pk.rows())
            if (!pr.contains(row)) v.extra.push_back(row);
        return v;
    }

    // Minimality: a row may be dropped iff no bag projection becomes unique
    // to it.
    std::vector<std::vector<int>> bag_cols;
    for (const auto& bag : t.bags) {
        std::vector<int> cols;
        for (const auto& a : bag) cols.push_back(k.schema().index_of(a));
        bag_cols.push_back(std::move(cols));
    }
    std::vector<std::map<Row, int>> proj_counts(t.bags.size());
    for (const auto& row : k.rows()) {
        for (size_t b = 0; b < t.bags.size(); ++b) {
            Row proj(bag_cols[b].size());
            for (size_t i = 0; i < bag_cols[b].size(); ++i) proj[i] = row[bag_cols[b][i]];
            proj_counts[b][proj] += 1;
        }
    }
    for (const auto& row : k.rows()) {
        bool removable = true;
        for (size_t b = 0; b < t.bags.size() && removable; ++b) {
            Row proj(bag_cols[b].size());
            for (size_t i = 0; i < bag_cols[b].size(); ++i) proj[i] = row[bag_cols[b][i]];
            removable = proj_counts[b].at(proj) > 1;
        }
        if (removable) {
            CoverVerdict v;
            v.kind = CoverVerdict::Kind::NotMinimal;
            v.removable_row = row;
            return v;
        }
    }
    return CoverVerdict{};
}

} // namespace covers
