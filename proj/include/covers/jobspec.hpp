#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "covers/csv.hpp"
#include "covers/decomposition.hpp"
#include "covers/equijoin.hpp"
#include "covers/error.hpp"
#include "covers/faq.hpp"
#include "covers/relation.hpp"

namespace covers {

// Line-oriented job spec. Directives:
//   relation <name> <attr>... <csv-path>
//   query <relation>...
//   bag <id> <attr>...
//   edge <bag-id> <bag-id>
//   atom <name> uses <relation> map <A>-><B>, ...
//   eq <A> = <B>
//   semiring boolean|count|sumproduct|maxproduct
//   free <attr>...
//   bound <attr> sum|prod
//   factor <name> <attr>... <csv-path>
//   domain <attr> <size>
// '#' starts a comment. Relative CSV paths resolve against the spec file.
struct JobSpec {
    enum class Kind { Natural, Equi, Faq };
    Kind kind = Kind::Natural;

    Database database;                 // declared relations
    JoinQuery query;                   // Natural
    EquiJoinQuery equi;                // Equi
    FaqQuery faq;                      // Faq
    std::optional<Decomposition> decomposition; // skeleton; root = first bag

    std::vector<std::string> spec_attr_order; // attributes in spec order
};

namespace detail {

inline std::string dirname_of(const std::string& path) {
    auto pos = path.find_last_of('/');
    if (pos == std::string::npos) return ".";
    return path.substr(0, pos);
}

inline std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok) {
        if (tok[0] == '#') break;
        out.push_back(tok);
    }
    return out;
}

} // namespace detail

inline JobSpec parse_job_spec(const std::string& path) {
    std::string text = read_file(path);
    std::string dir = detail::dirname_of(path);
    JobSpec spec;

    struct BagLine {
        std::string id;
        std::vector<std::string> attrs;
    };
    std::vector<BagLine> bags;
    std::vector<std::pair<std::string, std::string>> bag_edges;
    std::vector<std::string> query_rels;
    bool has_atoms = false, has_factors = false;
    std::vector<std::string> free_attrs;
    std::vector<std::pair<std::string, BoundOp>> bound_attrs;
    std::optional<Semiring> semiring;

    auto note_attr = [&](const std::string& a) {
        if (std::find(spec.spec_attr_order.begin(), spec.spec_attr_order.end(), a) ==
            spec.spec_attr_order.end())
            spec.spec_attr_order.push_back(a);
    };

    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        std::vector<std::string> tok = detail::tokenize(line);
        if (tok.empty()) continue;
        auto fail = [&](const std::string& msg) -> void {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " + msg);
        };
        const std::string& head = tok[0];
        if (head == "relation") {
            if (tok.size() < 3) fail("relation needs a name, attributes and a csv path");
            std::string name = tok[1];
            std::string csv = tok.back();
            std::vector<std::string> attrs(tok.begin() + 2, tok.end() - 1);
            if (attrs.empty()) fail("relation " + name + " declares no attributes");
            if (spec.database.count(name)) fail("relation " + name + " declared twice");
            std::string full = csv[0] == '/' ? csv : dir + "/" + csv;
            Relation r = load_relation_csv(full);
            if (!(r.schema() == Schema{attrs}))
                fail("csv header of " + csv + " does not match the declared schema");
            for (const auto& a : attrs) note_attr(a);
            spec.database.emplace(name, std::move(r));
        } else if (head == "query") {
            if (tok.size() < 2) fail("query needs relation names");
            query_rels.assign(tok.begin() + 1, tok.end());
        } else if (head == "bag") {
            if (tok.size() < 3) fail("bag needs an id and attributes");
            bags.push_back({tok[1], {tok.begin() + 2, tok.end()}});
        } else if (head == "edge") {
            if (tok.size() != 3) fail("edge needs two bag ids");
            bag_edges.emplace_back(tok[1], tok[2]);
        } else if (head == "atom") {
            // atom R1 uses R map A1->A, A2->B
            if (tok.size() < 5 || tok[2] != "uses" || tok[4] != "map")
                fail("atom syntax: atom <name> uses <relation> map <A>-><B>, ...");
            EquiJoinQuery::Atom atom;
            atom.name = tok[1];
            atom.target = tok[3];
            for (size_t i = 5; i < tok.size(); ++i) {
                std::string pair = tok[i];
                if (!pair.empty() && pair.back() == ',') pair.pop_back();
                if (pair.empty()) continue;
                auto arrow = pair.find("->");
                if (arrow == std::string::npos) fail("map entry needs the form A1->A");
                std::string from = pair.substr(0, arrow), to = pair.substr(arrow + 2);
                if (from.empty() || to.empty()) fail("map entry needs the form A1->A");
                atom.attrs.push_back(from);
                atom.attr_map[from] = to;
                note_attr(from);
            }
            if (atom.attrs.empty()) fail("atom " + atom.name + " maps no attributes");
            spec.equi.atoms.push_back(std::move(atom));
            has_atoms = true;
        } else if (head == "eq") {
            // eq A2 = A3
            if (tok.size() != 4 || tok[2] != "=") fail("eq syntax: eq <A> = <B>");
            spec.equi.equalities.emplace_back(tok[1], tok[3]);
        } else if (head == "semiring") {
            if (tok.size() != 2) fail("semiring needs a name");
            semiring = Semiring::parse(tok[1]);
        } else if (head == "free") {
            for (size_t i = 1; i < tok.size(); ++i) {
                free_attrs.push_back(tok[i]);
                note_attr(tok[i]);
            }
        } else if (head == "bound") {
            if (tok.size() != 3) fail("bound syntax: bound <attr> sum|prod");
            BoundOp op = BoundOp::Aggregate;
            if (tok[2] == "prod") op = BoundOp::Multiply;
            else if (tok[2] != "sum") fail("bound operator must be sum or prod");
            bound_attrs.emplace_back(tok[1], op);
        } else if (head == "factor") {
            if (tok.size() < 3) fail("factor needs a name, attributes and a csv path");
            std::string name = tok[1];
            for (const auto& f : spec.faq.factors)
                if (f.name == name) fail("factor " + name + " declared twice");
            std::string csv = tok.back();
            std::vector<std::string> attrs(tok.begin() + 2, tok.end() - 1);
            std::string full = csv[0] == '/' ? csv : dir + "/" + csv;
            CsvTable table = parse_csv(read_file(full), full);
            std::vector<std::string> want = attrs;
            want.push_back("__value");
            if (table.header != want)
                fail("factor csv " + csv + " must have columns <attrs...,__value>");
            std::vector<std::pair<Row, Rational>> rows;
            for (auto& r : table.rows) {
                Rational v;
                try {
                    v = Rational::parse(r.back());
                } catch (const std::exception&) {
                    fail("bad __value literal in " + csv);
                }
                r.pop_back();
                rows.emplace_back(std::move(r), v);
            }
            for (const auto& a : attrs) note_attr(a);
            spec.faq.factors.push_back(FactorRelation(name, attrs, std::move(rows)));
            has_factors = true;
        } else if (head == "domain") {
            if (tok.size() != 3) fail("domain syntax: domain <attr> <size>");
            try {
                spec.faq.declared_domains[tok[1]] = std::stoull(tok[2]);
            } catch (const std::exception&) {
                fail("domain size must be a nonnegative integer");
            }
        } else {
            fail("unknown directive: " + head);
        }
    }

    // assemble the query
    if (!query_rels.empty() && (has_atoms || has_factors))
        throw ParseError(path + ": query cannot be mixed with atom/factor directives");
    if (has_atoms && has_factors)
        throw ParseError(path + ": atom and factor directives cannot be mixed");
    if (!has_factors && (semiring || !free_attrs.empty() || !bound_attrs.empty()))
        throw ParseError(path + ": semiring/free/bound directives need factor declarations");

    if (has_factors) {
        spec.kind = JobSpec::Kind::Faq;
        if (!semiring) throw ParseError(path + ": faq specs need a semiring directive");
        spec.faq.semiring = *semiring;
        spec.faq.order = free_attrs;
        spec.faq.num_free = free_attrs.size();
        for (const auto& [attr, op] : bound_attrs) {
            spec.faq.order.push_back(attr);
            spec.faq.bound_ops[attr] = op;
        }
        try {
            spec.faq.validate();
        } catch (const Error& e) {
            throw ValidationError(path + ": " + e.what());
        }
    } else if (has_atoms) {
        spec.kind = JobSpec::Kind::Equi;
        for (const auto& atom : spec.equi.atoms)
            if (!spec.database.count(atom.target))
                throw ValidationError(path + ": atom " + atom.name + " uses unknown relation " +
                                      atom.target);
    } else if (!query_rels.empty()) {
        spec.kind = JobSpec::Kind::Natural;
        for (const auto& name : query_rels) {
            auto it = spec.database.find(name);
            if (it == spec.database.end())
                throw ValidationError(path + ": query references unknown relation " + name);
            spec.query.atoms.push_back({name, it->second.schema()});
        }
    } else {
        throw ParseError(path + ": no query, atom or factor directives");
    }

    if (!bags.empty()) {
        Decomposition t;
        for (const auto& b : bags) {
            t.bag_ids.push_back(b.id);
            t.bags.push_back(b.attrs);
        }
        for (const auto& [a, b] : bag_edges)
            t.tree_edges.emplace_back(t.bag_index(a), t.bag_index(b));
        t.root = 0; // rooted at the first declared bag
        spec.decomposition = std::move(t);
    } else if (!bag_edges.empty()) {
        throw ParseError(path + ": edge directives without bag declarations");
    }
    return spec;
}

} // namespace covers
