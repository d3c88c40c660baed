#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "smrank/ff.hpp"
#include "smrank/smpoly.hpp"
#include "smrank/word.hpp"

namespace smrank {

// ---------------------------------------------------------------------------
// Immutable tree IR for set-multilinear formulas. Nodes cache structural
// attributes (support, product-depth, node and leaf counts); trees may share
// subtrees physically, but all size attributes count occurrences, i.e. tree
// semantics. Sum and Product accept fan-in >= 1: unary products arise
// naturally in degenerate builder cases (e.g. the d = 2 word-polynomial
// formula) and validate fine.
// ---------------------------------------------------------------------------

enum class NodeKind { Var, Const, Sum, Product };

struct FormulaNode;
using NodePtr = std::shared_ptr<const FormulaNode>;

struct FormulaNode {
    NodeKind kind;
    u32 set = 0;   // Var: 1-based set index
    u16 var = 0;   // Var: 1-based variable index
    u64 cval = 0;  // Const: canonical field value
    std::vector<NodePtr> children;

    // Cached structural attributes (valid regardless of set-multilinear
    // typing; `support` is the structural union/first-child mask).
    u64 support = 0;
    u32 product_depth = 0;
    u64 node_count = 1;
    u64 leaf_count = 1;

    u32 degree() const { return static_cast<u32>(std::popcount(support)); }
};

inline NodePtr f_var(u32 set, u16 var) {
    auto n = std::make_shared<FormulaNode>();
    n->kind = NodeKind::Var;
    n->set = set;
    n->var = var;
    n->support = u64(1) << (set - 1);
    return n;
}

inline NodePtr f_const(u64 value) {
    auto n = std::make_shared<FormulaNode>();
    n->kind = NodeKind::Const;
    n->cval = value;
    return n;
}

namespace detail {

inline NodePtr make_gate(NodeKind kind, std::vector<NodePtr> children) {
    if (children.empty()) throw std::invalid_argument("formula gate: need at least one child");
    auto n = std::make_shared<FormulaNode>();
    n->kind = kind;
    n->children = std::move(children);
    n->node_count = 1;
    n->leaf_count = 0;
    n->support = 0;
    u32 max_child_depth = 0;
    for (const NodePtr& c : n->children) {
        n->node_count += c->node_count;
        n->leaf_count += c->leaf_count;
        max_child_depth = std::max(max_child_depth, c->product_depth);
        if (kind == NodeKind::Product) n->support |= c->support;
    }
    if (kind == NodeKind::Sum) n->support = n->children.front()->support;
    n->product_depth = max_child_depth + (kind == NodeKind::Product ? 1 : 0);
    return n;
}

} // namespace detail

inline NodePtr f_sum(std::vector<NodePtr> children) { return detail::make_gate(NodeKind::Sum, std::move(children)); }
inline NodePtr f_product(std::vector<NodePtr> children) {
    return detail::make_gate(NodeKind::Product, std::move(children));
}

// Validation failure, locating the offending node by its child-index path.
class FormulaError : public std::runtime_error {
public:
    FormulaError(std::string path, const std::string& reason)
        : std::runtime_error("formula validation failed at " + path + ": " + reason), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

class Formula {
public:
    Formula(ProfilePtr profile, FieldPtr field, NodePtr root)
        : profile_(std::move(profile)), field_(std::move(field)), root_(std::move(root)) {
        if (!root_) throw std::invalid_argument("Formula: null root");
    }

    const ProfilePtr& profile() const { return profile_; }
    const FieldPtr& field() const { return field_; }
    const NodePtr& root() const { return root_; }

    u64 support_mask() const { return root_->support; }
    u32 degree() const { return root_->degree(); }
    u32 product_depth() const { return root_->product_depth; }
    u64 node_count() const { return root_->node_count; }
    u64 leaf_count() const { return root_->leaf_count; }

private:
    ProfilePtr profile_;
    FieldPtr field_;
    NodePtr root_;
};

namespace detail {

inline std::string path_str(const std::vector<size_t>& path) {
    std::string s = "root";
    for (size_t i : path) s += "." + std::to_string(i);
    return s;
}

inline u64 validate_node(const FormulaNode& node, const PartitionProfile& profile, const Field& field,
                         std::vector<size_t>& path) {
    switch (node.kind) {
    case NodeKind::Var:
        if (node.set < 1 || node.set > profile.d() || node.var < 1 || node.var > profile.size(node.set))
            throw FormulaError(path_str(path), "variable leaf outside the partition profile");
        return u64(1) << (node.set - 1);
    case NodeKind::Const:
        if (!field.canonical(node.cval)) throw FormulaError(path_str(path), "constant outside canonical field range");
        return 0;
    case NodeKind::Sum: {
        u64 support = 0;
        bool first = true;
        for (size_t i = 0; i < node.children.size(); ++i) {
            path.push_back(i);
            const u64 s = validate_node(*node.children[i], profile, field, path);
            path.pop_back();
            if (first) {
                support = s;
                first = false;
            } else if (s != support) {
                throw FormulaError(path_str(path), "sum children compute different supports");
            }
        }
        return support;
    }
    case NodeKind::Product: {
        u64 support = 0;
        for (size_t i = 0; i < node.children.size(); ++i) {
            path.push_back(i);
            const u64 s = validate_node(*node.children[i], profile, field, path);
            path.pop_back();
            if (s & support) throw FormulaError(path_str(path), "product children have overlapping supports");
            support |= s;
        }
        return support;
    }
    }
    throw std::logic_error("validate_node: unreachable");
}

} // namespace detail

// Returns the root support mask if every node satisfies the set-multilinear
// typing rules; throws FormulaError naming the offending node otherwise.
inline u64 validate(const Formula& f) {
    std::vector<size_t> path;
    return detail::validate_node(*f.root(), *f.profile(), *f.field(), path);
}

// The polynomial computed by the formula, by structural recursion with
// set-multilinear polynomial arithmetic. Shared subtrees are expanded once.
inline SetMLPoly expand(const Formula& f) {
    validate(f);
    std::map<const FormulaNode*, SetMLPoly> memo;
    const ProfilePtr& profile = f.profile();
    const FieldPtr& field = f.field();

    auto rec = [&](auto&& self, const FormulaNode& node) -> const SetMLPoly& {
        auto it = memo.find(&node);
        if (it != memo.end()) return it->second;
        SetMLPoly value = [&]() -> SetMLPoly {
            switch (node.kind) {
            case NodeKind::Var: return poly_var(profile, field, node.set, node.var);
            case NodeKind::Const: return poly_const(profile, field, node.cval);
            case NodeKind::Sum: {
                SetMLPoly acc = self(self, *node.children.front());
                for (size_t i = 1; i < node.children.size(); ++i) acc = poly_add(acc, self(self, *node.children[i]));
                return acc;
            }
            case NodeKind::Product: {
                SetMLPoly acc = self(self, *node.children.front());
                for (size_t i = 1; i < node.children.size(); ++i) acc = poly_mul(acc, self(self, *node.children[i]));
                return acc;
            }
            }
            throw std::logic_error("expand: unreachable");
        }();
        return memo.emplace(&node, std::move(value)).first->second;
    };
    return rec(rec, *f.root());
}

// ---------------------------------------------------------------------------
// Divide-and-conquer formula for IMM_{n,d} with product-depth at most delta.
// A chain segment of length L >= 2 is split into min(L, ceil(L^{1/delta}))
// near-equal contiguous blocks; matrix entries combine by summing over the
// n^{blocks-1} boundary index tuples. Subformulas are shared, so the tree
// is physically a DAG; size attributes count with multiplicity.
// ---------------------------------------------------------------------------

namespace detail {

inline bool pow_at_least(u64 r, u32 e, u64 target) { // r^e >= target, overflow-safe
    u128 p = 1;
    for (u32 i = 0; i < e; ++i) {
        p *= r;
        if (p >= target) return true;
    }
    return p >= target;
}

// ceil(L^(1/delta)) in exact integer arithmetic.
inline u32 ceil_root(u32 L, u32 delta) {
    if (delta <= 1 || L <= 1) return L;
    u32 r = 1;
    while (!pow_at_least(r, delta, L)) ++r;
    return r;
}

inline std::vector<u32> split_blocks(u32 len, u32 blocks) {
    std::vector<u32> out(blocks, len / blocks);
    for (u32 i = 0; i < len % blocks; ++i) ++out[i];
    return out;
}

struct ImmBuilder {
    u32 n;
    std::map<std::tuple<u32, u32, u32, u32, u32>, NodePtr> memo;

    NodePtr entry(u32 lo, u32 hi, u32 row, u32 col, u32 delta) {
        const auto key = std::make_tuple(lo, hi, row, col, delta);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;

        NodePtr result;
        const u32 len = hi - lo + 1;
        if (len == 1) {
            result = f_var(lo, static_cast<u16>((row - 1) * n + col));
        } else {
            const u32 b = std::min(len, ceil_root(len, delta));
            const std::vector<u32> sizes = split_blocks(len, b);
            std::vector<u32> starts(b);
            u32 at = lo;
            for (u32 i = 0; i < b; ++i) {
                starts[i] = at;
                at += sizes[i];
            }
            // Sum over boundary tuples (i_1..i_{b-1}) in [n]^{b-1}.
            const u64 tuples = checked_pow(n, b - 1);
            std::vector<NodePtr> summands;
            summands.reserve(tuples);
            std::vector<u32> bound(b - 1, 1);
            for (u64 t = 0; t < tuples; ++t) {
                std::vector<NodePtr> factors;
                factors.reserve(b);
                u32 prev = row;
                for (u32 i = 0; i < b; ++i) {
                    const u32 next = (i + 1 == b) ? col : bound[i];
                    factors.push_back(entry(starts[i], starts[i] + sizes[i] - 1, prev, next, delta - 1));
                    prev = next;
                }
                summands.push_back(f_product(std::move(factors)));
                for (u32 i = 0; i < b - 1; ++i) {
                    if (++bound[i] <= n) break;
                    bound[i] = 1;
                }
            }
            result = summands.size() == 1 ? summands.front() : f_sum(std::move(summands));
        }
        memo.emplace(key, result);
        return result;
    }
};

} // namespace detail

inline Formula build_imm_formula(u32 n, u32 d, u32 delta, const FieldPtr& coeff_field) {
    if (delta < 1) throw std::invalid_argument("build_imm_formula: delta must be >= 1");
    if (d < 2) throw std::invalid_argument("build_imm_formula: d must be >= 2");
    if (n < 1) throw std::invalid_argument("build_imm_formula: n must be >= 1");
    ProfilePtr profile = uniform_profile(d, n * n);
    detail::ImmBuilder builder{n, {}};
    NodePtr root = builder.entry(1, d, 1, 1, delta);
    return Formula(profile, coeff_field, root);
}

// Closed-form node count of the recursion above (counted with multiplicity),
// reported alongside the builder.
inline u64 imm_formula_node_count(u32 n, u32 d, u32 delta) {
    std::map<std::pair<u32, u32>, u64> memo; // (len, delta) -> nodes
    auto rec = [&](auto&& self, u32 len, u32 dl) -> u64 {
        if (len == 1) return 1;
        const auto key = std::make_pair(len, dl);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        const u32 b = std::min(len, detail::ceil_root(len, dl));
        const std::vector<u32> sizes = detail::split_blocks(len, b);
        u64 per_summand = 1; // the product gate
        for (u32 s : sizes) per_summand += self(self, s, dl - 1);
        const u64 tuples = checked_pow(n, b - 1);
        u64 total = tuples * per_summand + (tuples > 1 ? 1 : 0); // + sum gate
        memo.emplace(key, total);
        return total;
    };
    return rec(rec, d, delta);
}

// ---------------------------------------------------------------------------
// Depth-3 formula for the balanced symmetric word polynomial:
//   prod_{j in P_w} sum_{i=1}^{n} x_{i,j} x_{i,phi(j)}
// where phi pairs the positive and negative sets by rank order.
// ---------------------------------------------------------------------------

inline Formula build_word_poly_formula(const Word& w, const FieldPtr& coeff_field) {
    if (!w.is_symmetric()) throw std::invalid_argument("build_word_poly_formula: word must be symmetric");
    if (!w.is_balanced()) throw std::invalid_argument("build_word_poly_formula: word must be balanced");
    std::vector<u32> pos, neg;
    for (u32 i = 1; i <= w.d(); ++i) (w.sign(i) > 0 ? pos : neg).push_back(i);
    const u32 n = w.size(1);

    std::vector<NodePtr> factors;
    factors.reserve(pos.size());
    for (size_t a = 0; a < pos.size(); ++a) {
        std::vector<NodePtr> summands;
        summands.reserve(n);
        for (u16 i = 1; i <= n; ++i)
            summands.push_back(f_product({f_var(pos[a], i), f_var(neg[a], i)}));
        factors.push_back(f_sum(std::move(summands)));
    }
    NodePtr root = f_product(std::move(factors));

    std::vector<u32> sizes(w.d(), n);
    return Formula(make_profile(std::move(sizes)), coeff_field, root);
}

// ---------------------------------------------------------------------------
// Deterministic random set-multilinear formulas for the property suites.
// The generator respects the depth and size budgets and keeps the expansion
// term count below an internal cap so expansion oracles stay desk-scale.
// ---------------------------------------------------------------------------

struct RandomFormulaOptions {
    u64 term_cap = 4096;   // soft bound on expansion term count
    u32 max_sum_arity = 3; // fan-in of generated sums
    bool allow_constants = true;
};

namespace detail {

// Each call receives a node budget it may not exceed; luxuries (wider sums,
// constant factors, an extra summand) are taken only when they fit, so the
// generator adapts to tight budgets instead of failing midway.
struct RandomFormulaGen {
    const PartitionProfile& profile;
    const Field& field;
    SplitMix64 rng;
    RandomFormulaOptions opts;

    // Cheapest completion: a single leaf, or a flat product of leaves.
    static u64 min_nodes(u64 degree) { return degree <= 1 ? 1 : degree + 1; }

    NodePtr gen_single(u32 set, u32 depth_budget, u64 term_cap, u64 budget) {
        const u32 n = profile.size(set);
        u64 max_arity = std::min<u64>({opts.max_sum_arity, n, term_cap, budget >= 2 ? budget - 1 : 1});
        const u32 arity = 1 + static_cast<u32>(rng.bounded(std::max<u64>(max_arity, 1)));
        if (arity <= 1) return f_var(set, static_cast<u16>(1 + rng.bounded(n)));

        std::vector<u16> vars(n);
        for (u16 i = 0; i < n; ++i) vars[i] = static_cast<u16>(i + 1);
        for (u32 i = n - 1; i > 0; --i) std::swap(vars[i], vars[rng.bounded(i + 1)]);
        u64 used = 1 + arity; // sum gate + leaves
        std::vector<NodePtr> kids;
        for (u32 i = 0; i < arity; ++i) {
            NodePtr leaf = f_var(set, vars[i]);
            if (opts.allow_constants && depth_budget >= 1 && used + 2 <= budget && rng.bounded(4) == 0) {
                leaf = f_product({f_const(1 + rng.bounded(field.order() - 1)), leaf});
                used += 2;
            }
            kids.push_back(std::move(leaf));
        }
        return f_sum(std::move(kids));
    }

    NodePtr gen(const std::vector<u32>& support, u32 depth_budget, u64 term_cap, u64 budget) {
        if (support.size() == 1) return gen_single(support[0], depth_budget, term_cap, budget);
        if (depth_budget == 0) throw std::invalid_argument("random_formula: depth budget infeasible");

        const u64 summand_min = min_nodes(support.size());
        const bool add_sum = budget >= 2 * summand_min + 1 && rng.bounded(3) == 0;
        const u32 summands = add_sum ? 2 : 1;
        const u64 summand_budget = (budget - (summands > 1 ? 1 : 0)) / summands;

        std::vector<NodePtr> sum_kids;
        for (u32 s = 0; s < summands; ++s) {
            std::vector<u32> shuffled = support;
            for (size_t i = shuffled.size() - 1; i > 0; --i) std::swap(shuffled[i], shuffled[rng.bounded(i + 1)]);
            // The last depth level only permits flat products of single-set
            // factors; tight budgets also force the flat form, since every
            // multi-set group costs an extra product gate.
            u32 parts;
            if (depth_budget == 1) {
                parts = static_cast<u32>(shuffled.size());
            } else {
                parts = 2 + static_cast<u32>(rng.bounded(std::min<u64>(3, shuffled.size() - 1)));
                parts = std::min<u32>(parts, static_cast<u32>(shuffled.size()));
                if (u64(1) + shuffled.size() + parts > summand_budget) parts = static_cast<u32>(shuffled.size());
            }
            std::vector<std::vector<u32>> groups(parts);
            for (size_t i = 0; i < shuffled.size(); ++i) groups[i % parts].push_back(shuffled[i]);
            for (auto& g : groups) std::sort(g.begin(), g.end());

            // Split the node budget: every pending group keeps its minimum
            // reserved; the current child receives the rest.
            u64 remaining = summand_budget - 1; // product gate
            u64 reserve = 0;
            for (const auto& g : groups) reserve += min_nodes(g.size());

            // Share the term cap across factors multiplicatively.
            u64 cap_left = std::max<u64>(term_cap, 1);
            std::vector<NodePtr> factors;
            for (size_t gi = 0; gi < groups.size(); ++gi) {
                const u64 own_min = min_nodes(groups[gi].size());
                reserve -= own_min;
                const u64 child_budget = remaining > reserve ? remaining - reserve : own_min;
                const u64 share = std::max<u64>(1, nth_root_floor(cap_left, groups.size() - gi));
                NodePtr child = gen(groups[gi], depth_budget - 1, share, child_budget);
                remaining -= std::min<u64>(child->node_count, remaining);
                const u64 child_terms = std::max<u64>(1, estimate_terms(*child));
                cap_left = std::max<u64>(1, cap_left / child_terms);
                factors.push_back(std::move(child));
            }
            sum_kids.push_back(f_product(std::move(factors)));
        }
        if (sum_kids.size() == 1) return sum_kids.front();
        return f_sum(std::move(sum_kids));
    }

    static u64 nth_root_floor(u64 x, u64 k) {
        if (k <= 1) return x;
        u64 r = 1;
        while (true) {
            u128 p = 1;
            for (u64 i = 0; i < k && p <= x; ++i) p *= (r + 1);
            if (p > x) return r;
            ++r;
        }
    }

    static u64 estimate_terms(const FormulaNode& node) {
        switch (node.kind) {
        case NodeKind::Var:
        case NodeKind::Const: return 1;
        case NodeKind::Sum: {
            u64 s = 0;
            for (const auto& c : node.children) s += estimate_terms(*c);
            return s;
        }
        case NodeKind::Product: {
            u64 p = 1;
            for (const auto& c : node.children) p *= estimate_terms(*c);
            return p;
        }
        }
        return 1;
    }
};

} // namespace detail

inline Formula random_formula(const ProfilePtr& profile, u32 depth_budget, u64 size_budget, u64 seed,
                              const FieldPtr& field, const RandomFormulaOptions& opts = {}) {
    if (depth_budget < 1 || size_budget < 1) throw std::invalid_argument("random_formula: budgets must be >= 1");
    if (size_budget < detail::RandomFormulaGen::min_nodes(profile->d()))
        throw std::invalid_argument("random_formula: size budget too small to cover every variable set");
    detail::RandomFormulaGen gen{*profile, *field, SplitMix64(derive_stream(seed, 0x464f524d)), opts};
    std::vector<u32> support(profile->d());
    for (u32 j = 0; j < profile->d(); ++j) support[j] = j + 1;
    NodePtr root = gen.gen(support, depth_budget, opts.term_cap, size_budget);
    Formula f(profile, field, root);
    validate(f);
    if (f.node_count() > size_budget) throw std::logic_error("random_formula: internal budget accounting error");
    return f;
}

} // namespace smrank
