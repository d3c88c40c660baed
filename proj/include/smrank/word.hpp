#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "smrank/common.hpp"
#include "smrank/smpoly.hpp"

namespace smrank {

// ---------------------------------------------------------------------------
// A word assigns each variable set a polarity and a truncated size m_i, with
// |w_i| = log2(m_i). Sizes are kept as integers; log2 quantities are exact
// (half-)integers whenever every m_i is a power of two, which covers every
// configuration the verification suites assert on.
// ---------------------------------------------------------------------------

class Word {
public:
    struct Entry {
        int sign;  // +1 or -1
        u32 size;  // m_i = 2^{|w_i|}, 1 <= m_i
    };

    explicit Word(std::vector<Entry> entries) : entries_(std::move(entries)) {
        if (entries_.empty() || entries_.size() > 64)
            throw std::invalid_argument("Word: need 1 <= d <= 64 entries");
        for (const Entry& e : entries_) {
            if (e.sign != 1 && e.sign != -1) throw std::invalid_argument("Word: sign must be +1 or -1");
            if (e.size < 1) throw std::invalid_argument("Word: sizes must be >= 1");
        }
    }

    u32 d() const { return static_cast<u32>(entries_.size()); }
    int sign(u32 i) const { return entries_.at(i - 1).sign; } // 1-based
    u32 size(u32 i) const { return entries_.at(i - 1).size; }
    const std::vector<Entry>& entries() const { return entries_; }

    u64 pos_mask() const {
        u64 m = 0;
        for (u32 i = 0; i < entries_.size(); ++i)
            if (entries_[i].sign > 0) m |= u64(1) << i;
        return m;
    }
    u64 neg_mask() const { return ~pos_mask() & ((d() == 64) ? ~u64(0) : (u64(1) << d()) - 1); }

    bool is_dyadic() const {
        for (const Entry& e : entries_)
            if (!is_pow2(e.size)) return false;
        return true;
    }

    // |w_i| as an exact integer; dyadic words only.
    int log2_size(u32 i) const { return log2_exact(size(i)); }

    // Sum of |w_i| over a subset of positions (default all); dyadic only.
    i64 sum_log2_sizes(u64 mask = ~u64(0)) const {
        i64 s = 0;
        for (u32 i = 0; i < entries_.size(); ++i)
            if (mask >> i & 1) s += log2_exact(entries_[i].size);
        return s;
    }

    // w_S = sum of signed |w_i| over S; dyadic only.
    i64 signed_sum(u64 mask = ~u64(0)) const {
        i64 s = 0;
        for (u32 i = 0; i < entries_.size(); ++i)
            if (mask >> i & 1) s += entries_[i].sign * i64(log2_exact(entries_[i].size));
        return s;
    }

    double sum_log2_sizes_approx(u64 mask = ~u64(0)) const {
        double s = 0;
        for (u32 i = 0; i < entries_.size(); ++i)
            if (mask >> i & 1) s += std::log2(double(entries_[i].size));
        return s;
    }

    bool is_symmetric() const {
        if (!is_dyadic()) return false;
        for (const Entry& e : entries_)
            if (e.size != entries_[0].size) return false;
        return true;
    }

    bool is_balanced() const { return is_dyadic() && signed_sum() == 0; }

    bool fits_profile(const PartitionProfile& profile) const {
        if (profile.d() != d()) return false;
        for (u32 i = 1; i <= d(); ++i)
            if (size(i) > profile.size(i)) return false;
        return true;
    }

    // "+3,-3" style rendering for dyadic words, matching the CLI syntax.
    std::string str() const {
        std::string s;
        for (u32 i = 1; i <= d(); ++i) {
            if (i > 1) s += ',';
            s += sign(i) > 0 ? '+' : '-';
            s += is_pow2(size(i)) ? std::to_string(log2_exact(size(i))) : ("sz" + std::to_string(size(i)));
        }
        return s;
    }

    friend bool operator==(const Word& a, const Word& b) {
        if (a.d() != b.d()) return false;
        for (u32 i = 1; i <= a.d(); ++i)
            if (a.sign(i) != b.sign(i) || a.size(i) != b.size(i)) return false;
        return true;
    }

private:
    std::vector<Entry> entries_;
};

// Symmetric word in {k,-k}^d from a sign pattern.
inline Word make_symmetric_word(const std::vector<int>& signs, unsigned k) {
    if (k < 1 || k > 30) throw std::invalid_argument("make_symmetric_word: need 1 <= k <= 30");
    std::vector<Word::Entry> es;
    es.reserve(signs.size());
    for (int s : signs) es.push_back({s, u32(1) << k});
    return Word(std::move(es));
}

// All C(d, d/2) balanced symmetric words, positive positions enumerated in
// lexicographic subset order. Requires even d.
inline std::vector<Word> balanced_words(u32 d, unsigned k) {
    if (d == 0 || d % 2 != 0) throw std::invalid_argument("balanced_words: d must be positive and even");
    if (d > 30) throw std::invalid_argument("balanced_words: d too large for exhaustive enumeration");
    std::vector<Word> out;
    std::vector<u32> pick(d / 2);
    for (u32 i = 0; i < d / 2; ++i) pick[i] = i;
    while (true) {
        std::vector<int> signs(d, -1);
        for (u32 p : pick) signs[p] = 1;
        out.push_back(make_symmetric_word(signs, k));
        // next combination
        long i = long(pick.size()) - 1;
        while (i >= 0 && pick[i] == d - pick.size() + i) --i;
        if (i < 0) break;
        ++pick[i];
        for (size_t j = i + 1; j < pick.size(); ++j) pick[j] = pick[j - 1] + 1;
    }
    return out;
}

enum class WordMode { Uniform, Balanced };

// Random symmetric word in {k,-k}^d, deterministic per seed. Uniform mode
// flips independent fair signs; balanced mode is uniform over the C(d, d/2)
// sign patterns with equal counts (via a seeded Fisher-Yates permutation).
inline Word sample_word(u32 d, unsigned k, WordMode mode, u64 seed) {
    if (d == 0) throw std::invalid_argument("sample_word: d must be positive");
    SplitMix64 rng(derive_stream(seed, 0x574f5244));
    std::vector<int> signs(d);
    if (mode == WordMode::Uniform) {
        for (u32 i = 0; i < d; ++i) signs[i] = rng.coin() ? 1 : -1;
    } else {
        if (d % 2 != 0) throw std::invalid_argument("sample_word: balanced mode requires even d");
        std::vector<u32> idx(d);
        for (u32 i = 0; i < d; ++i) idx[i] = i;
        for (u32 i = d - 1; i > 0; --i) std::swap(idx[i], idx[rng.bounded(i + 1)]);
        for (u32 i = 0; i < d; ++i) signs[idx[i]] = i < d / 2 ? 1 : -1;
    }
    return make_symmetric_word(signs, k);
}

} // namespace smrank
