#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "covers/cover_join.hpp"
#include "covers/decomposition.hpp"
#include "covers/error.hpp"
#include "covers/materialize.hpp"
#include "covers/relation.hpp"

namespace covers {

// Binary plan over a join tree: leaves are relation symbols, each internal
// node cover-joins its two subplans. Sound plans split the join tree along
// single edges ("J = J1 o J2").
struct CoverJoinPlan {
    struct Node {
        std::string leaf; // set for leaves
        int left = -1;
        int right = -1;
    };
    std::vector<Node> nodes;
    int root = -1;

    bool is_leaf(int i) const { return nodes[i].left < 0; }

    int add_leaf(const std::string& name) {
        nodes.push_back(Node{name, -1, -1});
        return static_cast<int>(nodes.size()) - 1;
    }
    int add_join(int l, int r) {
        nodes.push_back(Node{"", l, r});
        return static_cast<int>(nodes.size()) - 1;
    }

    void leaves_of(int i, std::vector<std::string>& out) const {
        if (is_leaf(i)) {
            out.push_back(nodes[i].leaf);
            return;
        }
        leaves_of(nodes[i].left, out);
        leaves_of(nodes[i].right, out);
    }
    std::vector<std::string> leaves() const {
        std::vector<std::string> out;
        if (root >= 0) leaves_of(root, out);
        return out;
    }

    std::string to_string(int i) const {
        if (is_leaf(i)) return nodes[i].leaf;
        return "(" + to_string(nodes[i].left) + "*" + to_string(nodes[i].right) + ")";
    }
    std::string to_string() const { return root < 0 ? "" : to_string(root); }
};

// Plan spec grammar: expr := name | '(' expr '*' expr ')'.
inline CoverJoinPlan parse_plan(const std::string& text) {
    CoverJoinPlan plan;
    size_t pos = 0;
    auto skip_ws = [&]() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    };
    auto parse_expr = [&](auto&& self) -> int {
        skip_ws();
        if (pos >= text.size()) throw ParseError("plan: unexpected end of input");
        if (text[pos] == '(') {
            ++pos;
            int l = self(self);
            skip_ws();
            if (pos >= text.size() || text[pos] != '*') throw ParseError("plan: expected '*'");
            ++pos;
            int r = self(self);
            skip_ws();
            if (pos >= text.size() || text[pos] != ')') throw ParseError("plan: expected ')'");
            ++pos;
            return plan.add_join(l, r);
        }
        size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        if (start == pos) throw ParseError("plan: expected relation name");
        return plan.add_leaf(text.substr(start, pos - start));
    };
    plan.root = parse_expr(parse_expr);
    skip_ws();
    if (pos != text.size()) throw ParseError("plan: trailing input");
    return plan;
}

namespace detail {

inline bool subtree_connected(const JoinTree& j, const std::set<int>& nodes) {
    if (nodes.empty()) return false;
    auto adj = j.adjacency();
    std::set<int> seen{*nodes.begin()};
    std::vector<int> stack{*nodes.begin()};
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (int y : adj[x])
            if (nodes.count(y) && !seen.count(y)) {
                seen.insert(y);
                stack.push_back(y);
            }
    }
    return seen.size() == nodes.size();
}

inline int crossing_edges(const JoinTree& j, const std::set<int>& a, const std::set<int>& b) {
    int n = 0;
    for (const auto& [x, y] : j.edges) {
        if ((a.count(x) && b.count(y)) || (a.count(y) && b.count(x))) ++n;
    }
    return n;
}

inline bool validate_plan_node(const CoverJoinPlan& plan, int node, const JoinTree& j,
                               std::set<int>& out_leaves) {
    if (plan.is_leaf(node)) {
        int idx;
        try {
            idx = j.index_of(plan.nodes[node].leaf);
        } catch (const ValidationError&) {
            return false;
        }
        if (out_leaves.count(idx)) return false;
        out_leaves.insert(idx);
        return true;
    }
    std::set<int> l, r;
    if (!validate_plan_node(plan, plan.nodes[node].left, j, l)) return false;
    if (!validate_plan_node(plan, plan.nodes[node].right, j, r)) return false;
    for (int x : l)
        if (r.count(x)) return false;
    if (!subtree_connected(j, l) || !subtree_connected(j, r)) return false;
    if (crossing_edges(j, l, r) != 1) return false;
    out_leaves = l;
    out_leaves.insert(r.begin(), r.end());
    return true;
}

} // namespace detail

// True iff every internal node's operand leaf sets arise from single-edge
// splits of the corresponding subtree of J, and the plan uses each relation
// exactly once.
inline bool validate_plan(const CoverJoinPlan& plan, const JoinTree& j) {
    if (plan.root < 0) return false;
    std::set<int> leaves;
    if (!detail::validate_plan_node(plan, plan.root, j, leaves)) return false;
    return leaves.size() == j.symbols.size();
}

// All cover-join plans over J up to commutativity of each split: the operand
// holding the smallest join-tree index goes left.
inline std::vector<CoverJoinPlan> enumerate_plans(const JoinTree& j, size_t max_nodes = 8) {
    if (j.symbols.size() > max_nodes)
        throw TooLargeError("join tree exceeds plan enumeration bound of " +
                            std::to_string(max_nodes) + " nodes");

    struct Builder {
        const JoinTree& j;
        std::map<std::vector<int>, std::vector<CoverJoinPlan>> memo;

        std::vector<CoverJoinPlan> plans(std::vector<int> nodes) {
            std::sort(nodes.begin(), nodes.end());
            auto it = memo.find(nodes);
            if (it != memo.end()) return it->second;
            std::vector<CoverJoinPlan> out;
            if (nodes.size() == 1) {
                CoverJoinPlan p;
                p.root = p.add_leaf(j.symbols[nodes[0]]);
                out.push_back(std::move(p));
            } else {
                std::set<int> in_set(nodes.begin(), nodes.end());
                for (const auto& [x, y] : j.edges) {
                    if (!in_set.count(x) || !in_set.count(y)) continue;
                    // removing edge (x,y) splits the subtree
                    std::set<int> side_x;
                    std::vector<int> stack{x};
                    side_x.insert(x);
                    auto adj = j.adjacency();
                    while (!stack.empty()) {
                        int u = stack.back();
                        stack.pop_back();
                        for (int v : adj[u]) {
                            if (!in_set.count(v) || side_x.count(v)) continue;
                            if (u == x && v == y) continue;
                            if (u == y && v == x) continue;
                            side_x.insert(v);
                            stack.push_back(v);
                        }
                    }
                    if (side_x.count(y)) continue; // edge not a bridge within this node set
                    std::vector<int> left, right;
                    for (int u : nodes) (side_x.count(u) ? left : right).push_back(u);
                    if (right.empty()) continue;
                    if (*std::min_element(right.begin(), right.end()) <
                        *std::min_element(left.begin(), left.end()))
                        std::swap(left, right);
                    for (const auto& lp : plans(left)) {
                        for (const auto& rp : plans(right)) {
                            CoverJoinPlan p;
                            std::map<int, int> remap;
                            auto graft = [&](const CoverJoinPlan& src, auto&& self,
                                             int node) -> int {
                                if (src.is_leaf(node)) return p.add_leaf(src.nodes[node].leaf);
                                int l = self(src, self, src.nodes[node].left);
                                int r = self(src, self, src.nodes[node].right);
                                return p.add_join(l, r);
                            };
                            int l = graft(lp, graft, lp.root);
                            int r = graft(rp, graft, rp.root);
                            p.root = p.add_join(l, r);
                            out.push_back(std::move(p));
                        }
                    }
                }
            }
            memo[nodes] = out;
            return out;
        }
    };

    Builder b{j, {}};
    std::vector<int> all(j.symbols.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return b.plans(all);
}

namespace detail {

inline Relation execute_plan_node(const CoverJoinPlan& plan, int node, const Database& db,
                                  std::optional<uint64_t> seed, bool check_consistent) {
    if (plan.is_leaf(node)) {
        auto it = db.find(plan.nodes[node].leaf);
        if (it == db.end())
            throw ValidationError("plan leaf not in database: " + plan.nodes[node].leaf);
        return it->second;
    }
    Relation l = execute_plan_node(plan, plan.nodes[node].left, db, seed, check_consistent);
    Relation r = execute_plan_node(plan, plan.nodes[node].right, db, seed, check_consistent);
    std::optional<uint64_t> local;
    if (seed) local = *seed + static_cast<uint64_t>(node) * 0x9e37ULL;
    return cover_join(l, r, local, check_consistent);
}

} // namespace detail

// Runs a validated plan on a globally consistent acyclic instance and returns
// a cover over the decomposition corresponding to the join tree.
inline Cover execute_plan(const CoverJoinPlan& plan, const AcyclicInstance& inst,
                          std::optional<uint64_t> seed = std::nullopt,
                          bool check_consistent = false, bool bypass_validation = false) {
    if (!bypass_validation && !validate_plan(plan, inst.join_tree))
        throw UnsoundPlanError("plan " + plan.to_string() +
                               " does not follow a single-edge split of the join tree");
    Cover cover;
    cover.relation = detail::execute_plan_node(plan, plan.root, inst.database, seed,
                                               check_consistent);
    cover.decomposition = join_tree_to_decomposition(inst.join_tree);
    return cover;
}

// Exhaustive executor: every relation obtainable from the plan when each
// cover-join may return any of its covers. Oracle for tiny instances.
inline std::vector<Relation> execute_plan_all(const CoverJoinPlan& plan,
                                              const AcyclicInstance& inst,
                                              size_t max_block_nodes = 6,
                                              bool bypass_validation = false) {
    if (!bypass_validation && !validate_plan(plan, inst.join_tree))
        throw UnsoundPlanError("plan " + plan.to_string() +
                               " does not follow a single-edge split of the join tree");

    auto eval = [&](auto&& self, int node) -> std::vector<Relation> {
        if (plan.is_leaf(node)) {
            auto it = inst.database.find(plan.nodes[node].leaf);
            if (it == inst.database.end())
                throw ValidationError("plan leaf not in database: " + plan.nodes[node].leaf);
            return {it->second};
        }
        std::vector<Relation> ls = self(self, plan.nodes[node].left);
        std::vector<Relation> rs = self(self, plan.nodes[node].right);
        std::vector<Relation> out;
        for (const auto& l : ls)
            for (const auto& r : rs)
                for (auto& k : cover_join_all(l, r, max_block_nodes)) out.push_back(std::move(k));
        // dedupe by row set
        std::vector<Relation> unique;
        for (auto& k : out) {
            bool dup = false;
            for (const auto& u : unique) dup = dup || u.same_rows(k);
            if (!dup) unique.push_back(std::move(k));
        }
        return unique;
    };
    return eval(eval, plan.root);
}

// Left-deep plan over the depth-first preorder of the join tree.
inline CoverJoinPlan default_plan(const JoinTree& j) {
    std::vector<int> order;
    {
        auto adj = j.adjacency();
        std::vector<bool> seen(j.symbols.size(), false);
        std::vector<int> stack{j.root};
        while (!stack.empty()) {
            int t = stack.back();
            stack.pop_back();
            if (seen[t]) continue;
            seen[t] = true;
            order.push_back(t);
            for (auto it = adj[t].rbegin(); it != adj[t].rend(); ++it)
                if (!seen[*it]) stack.push_back(*it);
        }
    }
    CoverJoinPlan p;
    int acc = p.add_leaf(j.symbols[order[0]]);
    for (size_t i = 1; i < order.size(); ++i)
        acc = p.add_join(acc, p.add_leaf(j.symbols[order[i]]));
    p.root = acc;
    return p;
}

// Theorem-16 pipeline: reduce to a calibrated acyclic instance over T, turn
// T into a join tree, run a cover-join plan. Always reduces first so the
// plan's global-consistency precondition holds.
inline Cover compute_cover(const JoinQuery& q, const Decomposition& t, const Database& db,
                           const std::optional<CoverJoinPlan>& plan_override = std::nullopt,
                           std::optional<uint64_t> seed = std::nullopt) {
    AcyclicInstance inst = reduce_to_acyclic(q, t, db);
    CoverJoinPlan plan = plan_override ? *plan_override : default_plan(inst.join_tree);
    Cover cover = execute_plan(plan, inst, seed);
    cover.decomposition = t;
    return cover;
}

} // namespace covers
