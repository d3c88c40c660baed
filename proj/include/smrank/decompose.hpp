#pragma once

#include <algorithm>
#include <vector>

#include "smrank/common.hpp"
#include "smrank/formula.hpp"

namespace smrank {

// ---------------------------------------------------------------------------
// Product decomposition of a set-multilinear formula: F = sum_i prod_j F_{i,j}
// with geometrically decaying factor degrees. Products are normalized to
// fan-in 2 before the walk, so the selected gate v always satisfies
// deg(v) in (D/3, 2D/3]. Using the single occurrence of v in the tree,
// F = F_v * G + F|_{v:=0} where G multiplies the product-node siblings along
// the root-to-v path; the residual product G is decomposed with the degree
// target rescaled to deg(G), and F|_{v:=0} (strictly fewer leaves) is
// decomposed at the original degree.
// ---------------------------------------------------------------------------

struct DecompTerm {
    std::vector<Formula> factors;
};

namespace detail {

inline NodePtr normalize_fanin2(const NodePtr& node) {
    if (node->kind == NodeKind::Var || node->kind == NodeKind::Const) return node;
    std::vector<NodePtr> kids;
    kids.reserve(node->children.size());
    for (const NodePtr& c : node->children) kids.push_back(normalize_fanin2(c));
    if (node->kind == NodeKind::Sum) return kids.size() == 1 ? kids.front() : f_sum(std::move(kids));
    NodePtr acc = kids.back();
    for (size_t i = kids.size() - 1; i-- > 0;) acc = f_product({kids[i], acc});
    return acc;
}

// Root-to-v walk: descend into the highest-degree child of each product
// (ties to the first), and into the first child of each sum, until the
// degree lands in (D/3, 2D/3]. Requires fan-in-2 products and deg >= 2.
inline std::vector<std::pair<NodePtr, size_t>> find_split_path(const NodePtr& root) {
    const u64 D = root->degree();
    std::vector<std::pair<NodePtr, size_t>> path; // (node, child index taken)
    NodePtr cur = root;
    while (!(3 * u64(cur->degree()) > D && 3 * u64(cur->degree()) <= 2 * D)) {
        if (cur->kind == NodeKind::Var || cur->kind == NodeKind::Const)
            throw std::logic_error("find_split_path: walk reached a leaf outside the degree window");
        size_t pick = 0;
        if (cur->kind == NodeKind::Product) {
            for (size_t i = 1; i < cur->children.size(); ++i)
                if (cur->children[i]->degree() > cur->children[pick]->degree()) pick = i;
        }
        path.emplace_back(cur, pick);
        cur = cur->children[pick];
    }
    path.emplace_back(cur, size_t(-1)); // v itself
    return path;
}

// F with the subtree at the end of `path` replaced by zero, simplified:
// a product with a vanished child vanishes, a sum drops vanished children.
// Returns nullptr for the zero formula.
inline NodePtr zero_out(const std::vector<std::pair<NodePtr, size_t>>& path, size_t at) {
    const auto& [node, pick] = path[at];
    if (at + 1 == path.size()) return nullptr; // v itself
    NodePtr replaced = zero_out(path, at + 1);
    if (node->kind == NodeKind::Product) {
        if (!replaced) return nullptr;
        std::vector<NodePtr> kids = node->children;
        kids[pick] = replaced;
        return f_product(std::move(kids));
    }
    std::vector<NodePtr> kids;
    for (size_t i = 0; i < node->children.size(); ++i) {
        if (i == pick) {
            if (replaced) kids.push_back(replaced);
        } else {
            kids.push_back(node->children[i]);
        }
    }
    if (kids.empty()) return nullptr;
    if (kids.size() == 1) return kids.front();
    return f_sum(std::move(kids));
}

inline void decompose_node(const NodePtr& node, std::vector<std::vector<NodePtr>>& out) {
    if (!node || node->degree() == 0)
        throw std::logic_error("decompose_node: degree-0 input");
    if (node->degree() == 1) {
        out.push_back({node});
        return;
    }
    const auto path = find_split_path(node);
    const NodePtr v = path.back().first;

    // G = product of the product-node siblings along the path, root-to-v order.
    std::vector<NodePtr> siblings;
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        const auto& [pnode, pick] = path[i];
        if (pnode->kind != NodeKind::Product) continue;
        for (size_t c = 0; c < pnode->children.size(); ++c)
            if (c != pick) siblings.push_back(pnode->children[c]);
    }
    if (siblings.empty()) throw std::logic_error("decompose_node: split gate has no residual factors");
    // Right-fold into fan-in-2 products, preserving root-to-v order, so the
    // recursive walk on G keeps its degree guarantees.
    NodePtr g = siblings.back();
    for (size_t i = siblings.size() - 1; i-- > 0;) g = f_product({siblings[i], g});

    // Terms passing through v: F_v times each term of the decomposition of
    // G, rescaled to deg(G).
    std::vector<std::vector<NodePtr>> g_terms;
    decompose_node(g, g_terms);
    for (auto& t : g_terms) {
        std::vector<NodePtr> factors;
        factors.reserve(t.size() + 1);
        factors.push_back(v);
        for (auto& f : t) factors.push_back(std::move(f));
        out.push_back(std::move(factors));
    }

    // Terms avoiding v: F|_{v:=0}, same degree, strictly fewer leaves.
    NodePtr rest = zero_out(path, 0);
    if (rest) decompose_node(rest, out);
}

} // namespace detail

inline std::vector<DecompTerm> product_decompose(const Formula& f) {
    validate(f);
    if (f.degree() < 2) throw std::invalid_argument("product_decompose: degree must be >= 2");
    NodePtr root = detail::normalize_fanin2(f.root());
    std::vector<std::vector<NodePtr>> raw;
    detail::decompose_node(root, raw);
    std::vector<DecompTerm> out;
    out.reserve(raw.size());
    for (auto& factors : raw) {
        DecompTerm term;
        term.factors.reserve(factors.size());
        for (auto& n : factors) term.factors.emplace_back(f.profile(), f.field(), n);
        out.push_back(std::move(term));
    }
    return out;
}

// Contract checker for the decomposition: expansion equality, term count
// bounded by the leaf count, exact rational degree windows
// (1/3)^j d <= deg(F_{i,j}) <= (2/3)^j d, chain length >= log_3 d, and a
// final factor of degree exactly 1.
struct ProductLemmaCheck {
    bool equality = false;
    bool term_bound = false;
    bool windows_ok = false;
    bool chain_length_ok = false;
    bool last_degree_ok = false;
    u64 term_count = 0;
    u64 leaf_count = 0;

    bool all_ok() const { return equality && term_bound && windows_ok && chain_length_ok && last_degree_ok; }
};

inline ProductLemmaCheck check_product_lemma(const Formula& f, const std::vector<DecompTerm>& terms) {
    ProductLemmaCheck r;
    r.term_count = terms.size();
    r.leaf_count = f.leaf_count();
    r.term_bound = r.term_count <= r.leaf_count;

    const u64 d = f.degree();
    r.windows_ok = true;
    r.chain_length_ok = true;
    r.last_degree_ok = true;
    for (const DecompTerm& t : terms) {
        const size_t ell = t.factors.size();
        // 3^ell >= d, i.e. ell >= log_3 d.
        if (!detail::pow_at_least(3, static_cast<u32>(ell), d)) r.chain_length_ok = false;
        if (t.factors.empty() || t.factors.back().degree() != 1) r.last_degree_ok = false;
        i64 pow3 = 1, pow2 = 1;
        for (size_t j = 0; j < ell; ++j) {
            pow3 *= 3;
            pow2 *= 2;
            const i64 deg = t.factors[j].degree();
            // (1/3)^j d <= deg <= (2/3)^j d with j 1-based, exact rationals.
            if (deg * pow3 < i64(d) || deg * pow3 > pow2 * i64(d)) r.windows_ok = false;
            if (pow3 > (i64(1) << 40)) break; // windows vacuous this deep; avoid overflow
        }
    }

    const SetMLPoly expected = expand(f);
    SetMLPoly sum = SetMLPoly::zero(f.profile(), f.field(), f.support_mask());
    for (const DecompTerm& t : terms) {
        SetMLPoly prod = expand(t.factors.front());
        for (size_t j = 1; j < t.factors.size(); ++j) prod = poly_mul(prod, expand(t.factors[j]));
        sum = poly_add(sum, prod);
    }
    r.equality = (sum == expected);
    return r;
}

// ---------------------------------------------------------------------------
// Degree partitions and the clubbing procedure.
// ---------------------------------------------------------------------------

struct DegreePartition {
    u32 d = 0;
    std::vector<std::vector<u32>> blocks; // 1-based positions

    DegreePartition(u32 d_, std::vector<std::vector<u32>> blocks_) : d(d_), blocks(std::move(blocks_)) {
        std::vector<bool> seen(d, false);
        u32 covered = 0;
        for (const auto& b : blocks) {
            if (b.empty()) throw std::invalid_argument("DegreePartition: empty block");
            for (u32 p : b) {
                if (p < 1 || p > d || seen[p - 1])
                    throw std::invalid_argument("DegreePartition: blocks must partition [d]");
                seen[p - 1] = true;
                ++covered;
            }
        }
        if (covered != d) throw std::invalid_argument("DegreePartition: blocks must cover [d]");
    }

    u64 block_mask(size_t i) const {
        u64 m = 0;
        for (u32 p : blocks[i]) m |= u64(1) << (p - 1);
        return m;
    }
};

// Sum over blocks of |sum of signs inside the block|, for a sign pattern
// given as a bitmask (bit i set = position i+1 is +1).
inline u64 partition_sign_sum(const std::vector<u64>& block_masks, u64 sign_bits) {
    u64 total = 0;
    for (const u64 mask : block_masks) {
        const i64 plus = std::popcount(sign_bits & mask);
        const i64 size = std::popcount(mask);
        const i64 sum = 2 * plus - size;
        total += static_cast<u64>(sum < 0 ? -sum : sum);
    }
    return total;
}

inline std::vector<u64> partition_block_masks(const DegreePartition& P) {
    std::vector<u64> masks(P.blocks.size());
    for (size_t i = 0; i < P.blocks.size(); ++i) masks[i] = P.block_mask(i);
    return masks;
}

inline u64 partition_sign_sum(const DegreePartition& P, u64 sign_bits) {
    return partition_sign_sum(partition_block_masks(P), sign_bits);
}

// The clubbing procedure: while two distinct blocks each of size < T/2
// exist, merge the two smallest; if a single undersized block remains,
// merge it into the smallest other block, then halt. Every output block
// then has size in [T/2, 3T/2]. Merge order ties break on the smallest
// least element. Throws domain_error when a final undersized block has no
// partner (total size < T/2), which the in-contract inputs cannot produce.
inline DegreePartition club_partition(const DegreePartition& P, const Rational& T) {
    for (const auto& b : P.blocks)
        if (Rational(i64(b.size())) >= T)
            throw std::invalid_argument("club_partition: input block of size >= T");

    auto order = [](const std::vector<u32>& a, const std::vector<u32>& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return *std::min_element(a.begin(), a.end()) < *std::min_element(b.begin(), b.end());
    };

    std::vector<std::vector<u32>> blocks = P.blocks;
    const Rational half = T / Rational(2);
    auto is_small = [&](const std::vector<u32>& b) { return Rational(i64(b.size())) < half; };

    while (true) {
        std::vector<size_t> small;
        for (size_t i = 0; i < blocks.size(); ++i)
            if (is_small(blocks[i])) small.push_back(i);
        if (small.size() >= 2) {
            std::sort(small.begin(), small.end(),
                      [&](size_t a, size_t b) { return order(blocks[a], blocks[b]); });
            const size_t a = small[0], b = small[1];
            blocks[a].insert(blocks[a].end(), blocks[b].begin(), blocks[b].end());
            std::sort(blocks[a].begin(), blocks[a].end());
            blocks.erase(blocks.begin() + b);
            continue;
        }
        if (small.size() == 1) {
            if (blocks.size() == 1)
                throw std::domain_error("club_partition: degenerate input, total size below T/2");
            size_t target = 0;
            bool have = false;
            for (size_t i = 0; i < blocks.size(); ++i) {
                if (i == small[0]) continue;
                if (!have || order(blocks[i], blocks[target])) {
                    target = i;
                    have = true;
                }
            }
            blocks[target].insert(blocks[target].end(), blocks[small[0]].begin(), blocks[small[0]].end());
            std::sort(blocks[target].begin(), blocks[target].end());
            blocks.erase(blocks.begin() + small[0]);
        }
        break;
    }
    return DegreePartition(P.d, std::move(blocks));
}

} // namespace smrank
