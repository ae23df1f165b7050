#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "covers/cover_join.hpp"
#include "covers/csv.hpp"
#include "covers/drep.hpp"
#include "covers/equijoin.hpp"
#include "covers/error.hpp"
#include "covers/faq.hpp"
#include "covers/jobspec.hpp"
#include "covers/planner.hpp"

namespace covers::engine {

// Exit codes: 0 ok, 2 parse, 3 validation, 4 unsound plan, 5 verification.
struct RunResult {
    int exit_code = 0;
    std::string output;     // stdout payload
    std::string diagnostic; // one-line error, empty on success
};

struct Flags {
    std::optional<std::string> plan;
    std::optional<uint64_t> seed;
    bool emit_drep = false;
    bool strict = false;
    std::optional<std::string> cover_csv; // for `check`
};

namespace detail {

// Everything the join-style commands need: a natural join query, an analyzed
// decomposition, and the database (equi-joins arrive here already expanded).
struct JoinContext {
    JoinQuery query;
    Decomposition decomposition;
    Database database;
    std::vector<std::string> output_order; // attributes in spec order
};

inline JoinContext join_context(const JobSpec& spec) {
    JoinContext ctx;
    if (spec.kind == JobSpec::Kind::Equi) {
        auto [qn, dbn] = to_natural_join(spec.equi, spec.database);
        ctx.query = std::move(qn);
        ctx.database = std::move(dbn);
        EquivalenceClasses classes = closure(spec.equi);
        if (spec.decomposition) {
            for (size_t b = 0; b < spec.decomposition->bags.size(); ++b) {
                std::vector<std::string> bag = spec.decomposition->bags[b];
                std::sort(bag.begin(), bag.end());
                if (bag != classes.closure_of(spec.decomposition->bags[b]))
                    throw InvalidDecompositionError("bag " + spec.decomposition->bag_ids[b] +
                                                    " is not closed under the equivalences");
            }
            ctx.decomposition = analyze_decomposition(ctx.query, *spec.decomposition);
        } else {
            auto jt = gyo_join_tree(ctx.query);
            if (!jt)
                throw ValidationError("cyclic query: declare a decomposition with bag/edge lines");
            ctx.decomposition = join_tree_to_decomposition(*jt);
        }
    } else {
        ctx.query = spec.query;
        ctx.database = spec.database;
        if (spec.decomposition) {
            ctx.decomposition = analyze_decomposition(ctx.query, *spec.decomposition);
        } else {
            auto jt = gyo_join_tree(ctx.query);
            if (!jt)
                throw ValidationError("cyclic query: declare a decomposition with bag/edge lines");
            ctx.decomposition = join_tree_to_decomposition(*jt);
        }
    }
    for (const auto& a : spec.spec_attr_order)
        if (Schema{ctx.query.attributes()}.contains(a)) ctx.output_order.push_back(a);
    return ctx;
}

inline std::optional<CoverJoinPlan> plan_override(const Flags& flags) {
    if (!flags.plan) return std::nullopt;
    return parse_plan(*flags.plan);
}

inline Cover computed_cover(const JoinContext& ctx, const Flags& flags) {
    Cover c = compute_cover(ctx.query, ctx.decomposition, ctx.database, plan_override(flags),
                            flags.seed);
    if (flags.strict) {
        CoverVerdict v = is_cover(c.relation, ctx.query, ctx.decomposition, ctx.database);
        if (!v.is_cover()) throw NotACoverError("computed relation failed verification: " +
                                                v.describe());
    }
    return c;
}

inline std::string drep_sections(const MultimapDRep& rep) {
    std::string out;
    for (size_t i = 0; i < rep.dtree.attrs.size(); ++i) {
        out += "[" + rep.dtree.attrs[i] + " | key:";
        if (rep.dtree.keys[i].empty()) out += " ()";
        for (const auto& k : rep.dtree.keys[i]) out += " " + k;
        out += "]\n";
        for (const auto& [key, values] : rep.maps[i].entries) {
            std::string k = "(";
            for (size_t c = 0; c < key.size(); ++c) k += (c ? "," : "") + key[c];
            k += ")";
            for (const auto& v : values) out += k + " -> " + v + "\n";
        }
    }
    return out;
}

// Direct nested-loop FAQ evaluation; the cross-check twin of the cover path.
inline std::vector<FaqOutputRow> faq_bruteforce(const FaqQuery& q) {
    std::vector<std::vector<Value>> domains(q.order.size());
    for (size_t i = 0; i < q.order.size(); ++i) {
        domains[i] = q.active_domain(q.order[i]);
        auto it = q.declared_domains.find(q.order[i]);
        if (it != q.declared_domains.end()) {
            size_t pad = 0;
            while (domains[i].size() < it->second)
                domains[i].push_back("__pad" + std::to_string(pad++));
        }
    }
    std::vector<std::vector<int>> cols;
    for (const auto& f : q.factors) {
        std::vector<int> c;
        for (const auto& a : f.attrs) {
            auto it = std::find(q.order.begin(), q.order.end(), a);
            c.push_back(static_cast<int>(it - q.order.begin()));
        }
        cols.push_back(std::move(c));
    }
    Row assignment(q.order.size());
    auto factors_product = [&]() {
        Rational acc = q.semiring.one();
        for (size_t f = 0; f < q.factors.size(); ++f) {
            Row t(cols[f].size());
            for (size_t c = 0; c < t.size(); ++c) t[c] = assignment[cols[f][c]];
            auto v = q.factors[f].value_of(t);
            if (!v) return q.semiring.zero();
            acc = q.semiring.mul(acc, *v);
        }
        return acc;
    };
    auto eval = [&](auto&& self, size_t j) -> Rational {
        if (j == q.order.size()) return factors_product();
        BoundOp op = q.bound_ops.at(q.order[j]);
        Rational acc = op == BoundOp::Aggregate ? q.semiring.zero() : q.semiring.one();
        for (const auto& v : domains[j]) {
            assignment[j] = v;
            acc = op == BoundOp::Aggregate ? q.semiring.add(acc, self(self, j + 1))
                                           : q.semiring.mul(acc, self(self, j + 1));
        }
        return acc;
    };
    std::vector<FaqOutputRow> out;
    auto free_loop = [&](auto&& self, size_t j) -> void {
        if (j == q.num_free) {
            Rational v = eval(eval, q.num_free);
            if (!v.is_zero())
                out.push_back({Row(assignment.begin(), assignment.begin() + q.num_free), v});
            return;
        }
        for (const auto& v : domains[j]) {
            assignment[j] = v;
            self(self, j + 1);
        }
    };
    free_loop(free_loop, 0);
    std::sort(out.begin(), out.end(),
              [](const FaqOutputRow& a, const FaqOutputRow& b) { return a.free < b.free; });
    return out;
}

inline Decomposition faq_decomposition(const JobSpec& spec, const FaqQuery& residual) {
    if (spec.decomposition) return *spec.decomposition;
    Decomposition t; // single bag over the free attributes always works
    t.bag_ids = {"B1"};
    t.bags = {residual.order};
    t.root = 0;
    return t;
}

inline std::string faq_table_csv(const std::vector<FaqOutputRow>& rows,
                                 const std::vector<std::string>& free_attrs) {
    std::vector<std::string> header = free_attrs;
    header.push_back("__value");
    std::vector<std::vector<std::string>> body;
    for (const auto& r : rows) {
        std::vector<std::string> row = r.free;
        row.push_back(r.value.str());
        body.push_back(std::move(row));
    }
    return write_csv(header, body);
}

inline RunResult dispatch(const std::string& command, const JobSpec& spec, const Flags& flags) {
    RunResult res;
    std::ostringstream out;

    if (spec.kind == JobSpec::Kind::Faq) {
        FaqQuery residual = eliminate_bound(absorb_subset_factors(spec.faq));
        residual = absorb_subset_factors(residual);
        Decomposition t = faq_decomposition(spec, residual);
        if (command == "cover" || command == "faq" || command == "enumerate" ||
            command == "count" || command == "stats") {
            FaqCover fc = faq_cover(spec.faq, t, {}, plan_override(flags), flags.seed);
            if (command == "cover") {
                out << write_relation_csv(fc.cover.relation);
            } else if (command == "faq" || command == "enumerate") {
                if (flags.emit_drep) {
                    out << drep_sections(cover_to_drep(fc.cover.relation, fc.cover.decomposition));
                } else {
                    out << faq_table_csv(faq_enumerate(fc), fc.free_attrs);
                }
            } else if (command == "count") {
                out << faq_enumerate(fc).size() << "\n";
            } else {
                out << "factor_rows=" << [&] {
                    size_t n = 0;
                    for (const auto& f : spec.faq.factors) n += f.rows.size();
                    return n;
                }() << "\n";
                out << "cover_size=" << fc.cover.relation.size() << "\n";
                out << "result_size=" << faq_enumerate(fc).size() << "\n";
                out << "faq_width=" << faq_width(spec.faq).str() << "\n";
            }
        } else if (command == "oracle") {
            out << faq_table_csv(faq_bruteforce(spec.faq), spec.faq.free_attrs());
        } else if (command == "plans") {
            BagFunctionSet bags = bag_functions(residual, t);
            JoinTree jt;
            jt.symbols = t.bag_ids;
            for (size_t b = 0; b < t.bags.size(); ++b) {
                std::vector<std::string> s = t.bags[b];
                s.push_back(bags.value_columns[b]);
                jt.schemas.push_back(Schema{s});
            }
            jt.edges = t.tree_edges;
            jt.root = t.root;
            for (const auto& p : enumerate_plans(jt)) out << p.to_string() << "\n";
        } else if (command == "check") {
            throw ValidationError("check is not supported for faq specs");
        } else {
            throw ValidationError("unknown command: " + command);
        }
        res.output = out.str();
        return res;
    }

    JoinContext ctx = join_context(spec);
    if (command == "cover") {
        Cover c = computed_cover(ctx, flags);
        out << write_relation_csv(c.relation.reordered(ctx.output_order));
    } else if (command == "check") {
        if (!flags.cover_csv) throw ValidationError("check needs a cover csv path");
        Relation k = load_relation_csv(*flags.cover_csv);
        CoverVerdict v = is_cover(k, ctx.query, ctx.decomposition, ctx.database);
        out << v.describe() << "\n";
        if (!v.is_cover()) {
            res.exit_code = 5;
            res.diagnostic = "verification failure: " + v.describe();
        }
    } else if (command == "enumerate") {
        Cover c = computed_cover(ctx, flags);
        MultimapDRep rep = cover_to_drep(c.relation, ctx.decomposition);
        if (flags.emit_drep) {
            out << drep_sections(rep);
        } else {
            out << write_relation_csv(enumerate_result(rep).reordered(ctx.output_order));
        }
    } else if (command == "count") {
        Cover c = computed_cover(ctx, flags);
        out << count_result(c.relation, ctx.decomposition) << "\n";
    } else if (command == "stats") {
        Cover c = computed_cover(ctx, flags);
        AcyclicInstance inst = reduce_to_acyclic(ctx.query, ctx.decomposition, ctx.database);
        out << "db_size=" << database_size(ctx.database) << "\n";
        out << "cover_size=" << c.relation.size() << "\n";
        out << "result_size=" << count_result(c.relation, ctx.decomposition) << "\n";
        out << "width=" << width(ctx.decomposition).str() << "\n";
        for (const auto& atom : inst.query.atoms)
            out << "bag_" << atom.name << "_size=" << inst.database.at(atom.name).size() << "\n";
    } else if (command == "plans") {
        AcyclicInstance inst = reduce_to_acyclic(ctx.query, ctx.decomposition, ctx.database);
        for (const auto& p : enumerate_plans(inst.join_tree)) out << p.to_string() << "\n";
    } else if (command == "oracle") {
        std::vector<Relation> rels;
        for (const auto& atom : ctx.query.atoms) rels.push_back(ctx.database.at(atom.name));
        out << write_relation_csv(natural_join_bruteforce(rels).reordered(ctx.output_order));
    } else if (command == "faq") {
        throw ValidationError("faq command needs a spec with factor directives");
    } else {
        throw ValidationError("unknown command: " + command);
    }
    res.output = out.str();
    return res;
}

} // namespace detail

inline RunResult run(const std::string& command, const std::string& spec_path,
                     const Flags& flags = {}) {
    RunResult res;
    try {
        JobSpec spec = parse_job_spec(spec_path);
        return detail::dispatch(command, spec, flags);
    } catch (const ParseError& e) {
        res.exit_code = 2;
        res.diagnostic = std::string("parse error: ") + e.what();
    } catch (const UnsoundPlanError& e) {
        res.exit_code = 4;
        res.diagnostic = std::string("unsound plan: ") + e.what();
    } catch (const NotACoverError& e) {
        res.exit_code = 5;
        res.diagnostic = std::string("verification failure: ") + e.what();
    } catch (const InconsistentInputsError& e) {
        res.exit_code = 5;
        res.diagnostic = std::string("inconsistency: ") + e.what();
    } catch (const ValidationError& e) {
        res.exit_code = 3;
        res.diagnostic = std::string("validation error: ") + e.what();
    } catch (const Error& e) {
        res.exit_code = 3;
        res.diagnostic = std::string("error: ") + e.what();
    }
    return res;
}

} // namespace covers::engine
