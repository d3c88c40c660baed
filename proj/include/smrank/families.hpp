#pragma once

#include <vector>

#include "smrank/ff.hpp"
#include "smrank/smpoly.hpp"
#include "smrank/word.hpp"

namespace smrank {

// ---------------------------------------------------------------------------
// Constructors for the explicit polynomial families: the interpolation-based
// design polynomial NW_{n,d}, iterated matrix multiplication IMM_{n,d}, and
// the prefix-matching word polynomials P_w.
// ---------------------------------------------------------------------------

// Hard cap on constructed term counts; keeps exhaustive experiments at desk
// scale instead of silently exploding.
inline constexpr u64 kTermBudget = u64(1) << 24;

// NW_{n,d}: one monomial prod_j x_{f(j),j} per univariate f over GF(2^k)
// with deg(f) < d/2, all coefficients 1. The index correspondence maps
// i in [n] to the field element with bit pattern i-1.
inline SetMLPoly nw(u32 n, u32 d, const FieldPtr& coeff_field) {
    if (!is_pow2(n) || n < 2) throw std::invalid_argument("nw: n must be a power of two, n >= 2");
    if (d < 1 || d > n) throw std::invalid_argument("nw: need 1 <= d <= n");
    const unsigned k = static_cast<unsigned>(log2_exact(n));
    const FieldPtr index_field = Field::gf2k(k);

    const u64 num_coeffs = (d + 1) / 2; // deg(f) < d/2
    const u64 count = checked_pow(n, num_coeffs);
    if (count > kTermBudget) throw std::invalid_argument("nw: term count exceeds the desk-scale budget");

    SetMLPoly result(uniform_profile(d, n), coeff_field, uniform_profile(d, n)->full_mask());
    PolyEnumerator en(index_field, num_coeffs);
    while (auto f = en.next()) {
        SetMLMonomial m(d);
        for (u32 j = 1; j <= d; ++j) {
            const u64 value = f->evaluate(j - 1); // phi(j) has bit pattern j-1
            m.set_var(j, static_cast<u16>(value + 1));
        }
        result.add_term(m, 1);
    }
    return result;
}

// IMM_{n,d}: the (1,1) entry of the product of d symbolic n x n matrices.
// Set j holds the entries of matrix j; entry (r,c) is variable (r-1)*n + c.
inline u16 imm_var(u32 n, u32 row, u32 col) { return static_cast<u16>((row - 1) * n + col); }

inline SetMLPoly imm(u32 n, u32 d, const FieldPtr& coeff_field) {
    if (n < 1) throw std::invalid_argument("imm: n must be >= 1");
    if (d < 2) throw std::invalid_argument("imm: d must be >= 2");
    const u64 count = checked_pow(n, d - 1);
    if (count > kTermBudget) throw std::invalid_argument("imm: term count exceeds the desk-scale budget");

    ProfilePtr profile = uniform_profile(d, n * n);
    SetMLPoly result(profile, coeff_field, profile->full_mask());
    std::vector<u32> path(d - 1, 1); // i_1 .. i_{d-1}
    for (u64 t = 0; t < count; ++t) {
        SetMLMonomial m(d);
        u32 prev = 1;
        for (u32 j = 1; j < d; ++j) {
            m.set_var(j, imm_var(n, prev, path[j - 1]));
            prev = path[j - 1];
        }
        m.set_var(d, imm_var(n, prev, 1));
        result.add_term(m, 1);
        for (u32 j = 0; j < d - 1; ++j) { // odometer
            if (++path[j] <= n) break;
            path[j] = 1;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Word polynomials. Each variable set X_i(w) has size 2^{|w_i|} and its
// variables carry Boolean labels of length |w_i|; a monomial belongs to P_w
// iff the concatenated positive and negative label strings (sets ascending)
// are prefix-comparable.
// ---------------------------------------------------------------------------

struct WordPolySpec {
    Word word;
    // labels[i][v-1] = label of variable v in set i+1, as an integer whose
    // log2(m_i) low bits spell the string (MSB = first character).
    std::vector<std::vector<u16>> labels;

    explicit WordPolySpec(Word w) : word(std::move(w)) {
        if (!word.is_dyadic())
            throw std::invalid_argument("WordPolySpec: word sizes must be powers of two");
        labels.resize(word.d());
        for (u32 i = 1; i <= word.d(); ++i) {
            labels[i - 1].resize(word.size(i));
            for (u16 v = 0; v < word.size(i); ++v) labels[i - 1][v] = v; // binary expansion of index-1
        }
    }

    WordPolySpec(Word w, std::vector<std::vector<u16>> custom) : word(std::move(w)), labels(std::move(custom)) {
        if (!word.is_dyadic())
            throw std::invalid_argument("WordPolySpec: word sizes must be powers of two");
        if (labels.size() != word.d()) throw std::invalid_argument("WordPolySpec: one label table per set required");
        for (u32 i = 1; i <= word.d(); ++i) {
            const u32 m = word.size(i);
            if (labels[i - 1].size() != m)
                throw std::invalid_argument("WordPolySpec: label table size must equal the set size");
            std::vector<bool> seen(m, false);
            for (u16 lab : labels[i - 1]) {
                if (lab >= m || seen[lab])
                    throw std::invalid_argument("WordPolySpec: labels must be a bijection onto {0,1}^{|w_i|}");
                seen[lab] = true;
            }
        }
    }

    ProfilePtr profile() const {
        std::vector<u32> sizes;
        for (u32 i = 1; i <= word.d(); ++i) sizes.push_back(word.size(i));
        return make_profile(std::move(sizes));
    }
};

inline SetMLPoly word_poly(const WordPolySpec& spec, const FieldPtr& coeff_field) {
    const Word& w = spec.word;
    const ProfilePtr profile = spec.profile();

    std::vector<u32> pos_sets, neg_sets;
    i64 len_pos = 0, len_neg = 0;
    for (u32 i = 1; i <= w.d(); ++i) {
        if (w.sign(i) > 0) {
            pos_sets.push_back(i);
            len_pos += w.log2_size(i);
        } else {
            neg_sets.push_back(i);
            len_neg += w.log2_size(i);
        }
    }
    if (len_pos + len_neg > 62) throw std::invalid_argument("word_poly: total label length exceeds 62 bits");

    // The longer side determines a term: its concatenated label string's
    // prefix decodes uniquely into the shorter side's variable choices.
    const bool pos_is_long = len_pos >= len_neg;
    const std::vector<u32>& long_sets = pos_is_long ? pos_sets : neg_sets;
    const std::vector<u32>& short_sets = pos_is_long ? neg_sets : pos_sets;
    const i64 len_long = pos_is_long ? len_pos : len_neg;
    const i64 len_short = pos_is_long ? len_neg : len_pos;

    u64 count = 1;
    for (u32 s : long_sets) {
        count *= w.size(s);
        if (count > kTermBudget) throw std::invalid_argument("word_poly: term count exceeds the desk-scale budget");
    }

    // Inverse label tables: label value -> variable index (1-based).
    std::vector<std::vector<u16>> inverse(w.d());
    for (u32 i = 1; i <= w.d(); ++i) {
        inverse[i - 1].resize(w.size(i));
        for (u16 v = 0; v < w.size(i); ++v) inverse[i - 1][spec.labels[i - 1][v]] = static_cast<u16>(v + 1);
    }

    SetMLPoly result(profile, coeff_field, profile->full_mask());
    std::vector<u16> choice(long_sets.size(), 1);
    for (u64 t = 0; t < count; ++t) {
        // Concatenated label string of the long side, first set in the
        // most significant bits.
        u64 sigma = 0;
        for (size_t a = 0; a < long_sets.size(); ++a) {
            const u32 s = long_sets[a];
            sigma = (sigma << w.log2_size(s)) | spec.labels[s - 1][choice[a] - 1];
        }
        const u64 prefix = len_short == 0 ? 0 : sigma >> (len_long - len_short);

        SetMLMonomial m(w.d());
        for (size_t a = 0; a < long_sets.size(); ++a) m.set_var(long_sets[a], choice[a]);
        i64 consumed = 0;
        for (u32 s : short_sets) {
            const int bits = w.log2_size(s);
            consumed += bits;
            const u64 label = (prefix >> (len_short - consumed)) & ((u64(1) << bits) - 1);
            m.set_var(s, inverse[s - 1][label]);
        }
        result.add_term(m, 1);

        for (size_t a = long_sets.size(); a-- > 0;) { // odometer, last set fastest
            if (++choice[a] <= w.size(long_sets[a])) break;
            choice[a] = 1;
        }
    }
    return result;
}

inline SetMLPoly word_poly(const Word& w, const FieldPtr& coeff_field) {
    return word_poly(WordPolySpec(w), coeff_field);
}

} // namespace smrank
