#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "covers/error.hpp"
#include "covers/planner.hpp"
#include "covers/relation.hpp"

namespace covers {

// Equi-join query sigma_psi(R_1 x ... x R_n) with signature mappings: lambda
// sends each atom to a database relation (not necessarily injectively) and
// mu_{R_i} bijectively renames atom attributes to database attributes. All
// atom attributes are globally distinct.
struct EquiJoinQuery {
    struct Atom {
        std::string name;
        std::vector<std::string> attrs;              // atom attributes, declared order
        std::string target;                          // lambda(atom)
        std::map<std::string, std::string> attr_map; // mu: atom attr -> target attr
    };
    std::vector<Atom> atoms;
    std::vector<std::pair<std::string, std::string>> equalities; // psi

    std::vector<std::string> all_attrs() const {
        std::vector<std::string> out;
        for (const auto& a : atoms)
            for (const auto& attr : a.attrs) out.push_back(attr);
        return out;
    }
};

// Union-find closure psi+ of the equality conjunction.
struct EquivalenceClasses {
    std::map<std::string, int> class_of;
    std::vector<std::vector<std::string>> classes; // sorted members

    const std::vector<std::string>& members(const std::string& attr) const {
        auto it = class_of.find(attr);
        if (it == class_of.end()) throw UnknownAttributeError("unknown attribute: " + attr);
        return classes[it->second];
    }

    // S+: attributes transitively equal to those in S, sorted.
    std::vector<std::string> closure_of(const std::vector<std::string>& s) const {
        std::set<std::string> out;
        for (const auto& a : s)
            for (const auto& m : members(a)) out.insert(m);
        return {out.begin(), out.end()};
    }
};

inline EquivalenceClasses closure(const EquiJoinQuery& q) {
    std::vector<std::string> attrs = q.all_attrs();
    {
        std::set<std::string> dedup(attrs.begin(), attrs.end());
        if (dedup.size() != attrs.size())
            throw MalformedSignatureError("atom attributes must be globally distinct");
    }
    std::map<std::string, std::string> parent;
    for (const auto& a : attrs) parent[a] = a;
    auto find = [&](std::string x) {
        while (parent[x] != x) x = parent[x];
        return x;
    };
    for (const auto& [a, b] : q.equalities) {
        if (!parent.count(a)) throw UnknownAttributeError("equality references unknown " + a);
        if (!parent.count(b)) throw UnknownAttributeError("equality references unknown " + b);
        parent[find(a)] = find(b);
    }
    std::map<std::string, std::vector<std::string>> groups;
    for (const auto& a : attrs) groups[find(a)].push_back(a);
    EquivalenceClasses out;
    for (auto& [root, members] : groups) {
        std::sort(members.begin(), members.end());
        for (const auto& m : members) out.class_of[m] = static_cast<int>(out.classes.size());
        out.classes.push_back(members);
    }
    return out;
}

// The Appendix-C three-step construction: rename each atom's relation to its
// atom attributes (D1), delete rows violating intra-atom equalities (D2),
// then widen each relation to S+ by copying equivalent columns (D'). The
// resulting natural join query satisfies Q'(D') = Q(D).
inline std::pair<JoinQuery, Database> to_natural_join(const EquiJoinQuery& q, const Database& db) {
    EquivalenceClasses classes = closure(q);
    JoinQuery out_query;
    Database out_db;
    for (const auto& atom : q.atoms) {
        auto target_it = db.find(atom.target);
        if (target_it == db.end())
            throw MalformedSignatureError("atom " + atom.name + " maps to unknown relation " +
                                          atom.target);
        const Relation& source = target_it->second;
        if (atom.attr_map.size() != atom.attrs.size() ||
            atom.attrs.size() != source.schema().size())
            throw MalformedSignatureError("signature of " + atom.name + " is not bijective");
        std::vector<int> source_cols;
        std::set<std::string> hit;
        for (const auto& a : atom.attrs) {
            auto it = atom.attr_map.find(a);
            if (it == atom.attr_map.end())
                throw MalformedSignatureError("atom attribute " + a + " lacks a mapping");
            if (!hit.insert(it->second).second)
                throw MalformedSignatureError("signature of " + atom.name + " is not bijective");
            source_cols.push_back(source.schema().index_of(it->second));
        }

        // D2 filter: intra-atom equal attributes must agree
        std::vector<std::pair<int, int>> intra;
        for (size_t i = 0; i < atom.attrs.size(); ++i)
            for (size_t j = i + 1; j < atom.attrs.size(); ++j)
                if (classes.class_of.at(atom.attrs[i]) == classes.class_of.at(atom.attrs[j]))
                    intra.emplace_back(static_cast<int>(i), static_cast<int>(j));

        // D' schema: S+ sorted; new columns copy the lexicographically least
        // equivalent attribute present in the atom
        std::vector<std::string> wide = classes.closure_of(atom.attrs);
        std::vector<int> copy_from(wide.size(), -1); // index into atom.attrs
        for (size_t w = 0; w < wide.size(); ++w) {
            auto own = std::find(atom.attrs.begin(), atom.attrs.end(), wide[w]);
            if (own != atom.attrs.end()) {
                copy_from[w] = static_cast<int>(own - atom.attrs.begin());
                continue;
            }
            int best = -1;
            for (size_t i = 0; i < atom.attrs.size(); ++i) {
                if (classes.class_of.at(atom.attrs[i]) != classes.class_of.at(wide[w])) continue;
                if (best == -1 || atom.attrs[i] < atom.attrs[best]) best = static_cast<int>(i);
            }
            if (best == -1)
                throw MalformedSignatureError("attribute " + wide[w] +
                                              " has no equivalent column in atom " + atom.name);
            copy_from[w] = best;
        }

        std::vector<Row> rows;
        for (const auto& src : source.rows()) {
            Row renamed(atom.attrs.size());
            for (size_t i = 0; i < atom.attrs.size(); ++i) renamed[i] = src[source_cols[i]];
            bool ok = true;
            for (auto [i, j] : intra) ok = ok && renamed[i] == renamed[j];
            if (!ok) continue;
            Row widened(wide.size());
            for (size_t w = 0; w < wide.size(); ++w) widened[w] = renamed[copy_from[w]];
            rows.push_back(std::move(widened));
        }
        out_query.atoms.push_back({atom.name, Schema{wide}});
        out_db.emplace(atom.name, Relation(Schema{wide}, std::move(rows)));
    }
    return {out_query, out_db};
}

// Covers for equi-joins: expand to the natural join instance and run the
// usual pipeline. Bags must be closed under the attribute equivalences.
inline Cover equi_cover(const EquiJoinQuery& q, const Decomposition& t, const Database& db,
                        const std::optional<CoverJoinPlan>& plan_override = std::nullopt,
                        std::optional<uint64_t> seed = std::nullopt) {
    EquivalenceClasses classes = closure(q);
    for (size_t b = 0; b < t.bags.size(); ++b) {
        std::vector<std::string> closed = classes.closure_of(t.bags[b]);
        std::vector<std::string> bag = t.bags[b];
        std::sort(bag.begin(), bag.end());
        if (bag != closed)
            throw InvalidDecompositionError("bag " + t.bag_ids[b] +
                                            " is not closed under the attribute equivalences");
    }
    auto [qn, dbn] = to_natural_join(q, db);
    Decomposition analyzed = analyze_decomposition(qn, t);
    return compute_cover(qn, analyzed, dbn, plan_override, seed);
}

} // namespace covers
