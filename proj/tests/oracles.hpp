// Independent test-side oracles. Everything here recomputes results through
// a different representation than the library (dense arrays, first-pivot
// elimination, direct enumeration) so the two paths can cross-check.
#pragma once

#include <cstdint>
#include <vector>

#include "smrank/measure.hpp"
#include "smrank/smpoly.hpp"

namespace oracle {

using namespace smrank;

// ---------------------------------------------------------------------------
// Dense set-multilinear polynomials: coefficient array indexed by the full
// mixed-radix monomial index over the supported sets (first set most
// significant). Intended for profiles with monomial spaces <= 1e4.
// ---------------------------------------------------------------------------

struct DensePoly {
    std::vector<u32> sets;  // supported sets ascending
    std::vector<u64> radix; // sizes of those sets
    std::vector<u64> coeffs;
    FieldPtr field;
};

inline DensePoly to_dense(const SetMLPoly& f) {
    DensePoly out;
    out.field = f.field();
    for (u32 j = 1; j <= f.profile()->d(); ++j) {
        if (f.support_mask() >> (j - 1) & 1) {
            out.sets.push_back(j);
            out.radix.push_back(f.profile()->size(j));
        }
    }
    u64 space = 1;
    for (u64 r : out.radix) space *= r;
    out.coeffs.assign(space, 0);
    for (const auto& [m, c] : f.terms()) {
        u64 idx = 0;
        for (size_t t = 0; t < out.sets.size(); ++t) idx = idx * out.radix[t] + (m.var(out.sets[t]) - 1);
        out.coeffs[idx] = out.field->add(out.coeffs[idx], c);
    }
    return out;
}

inline bool dense_equal(const DensePoly& a, const DensePoly& b) {
    return a.sets == b.sets && a.coeffs == b.coeffs;
}

inline DensePoly dense_add(const DensePoly& a, const DensePoly& b) {
    DensePoly r = a;
    for (size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] = r.field->add(a.coeffs[i], b.coeffs[i]);
    return r;
}

// Triple-loop product over the union of supports.
inline DensePoly dense_mul(const DensePoly& a, const DensePoly& b) {
    DensePoly r;
    r.field = a.field;
    size_t ia = 0, ib = 0;
    while (ia < a.sets.size() || ib < b.sets.size()) {
        if (ib == b.sets.size() || (ia < a.sets.size() && a.sets[ia] < b.sets[ib])) {
            r.sets.push_back(a.sets[ia]);
            r.radix.push_back(a.radix[ia]);
            ++ia;
        } else {
            r.sets.push_back(b.sets[ib]);
            r.radix.push_back(b.radix[ib]);
            ++ib;
        }
    }
    u64 space = 1;
    for (u64 x : r.radix) space *= x;
    r.coeffs.assign(space, 0);

    // decode index of a product monomial into per-set digits
    std::vector<u64> digits(r.sets.size());
    for (u64 pa = 0; pa < a.coeffs.size(); ++pa) {
        if (a.coeffs[pa] == 0) continue;
        for (u64 pb = 0; pb < b.coeffs.size(); ++pb) {
            if (b.coeffs[pb] == 0) continue;
            // digits of pa / pb, least significant set last
            for (size_t t = r.sets.size(); t-- > 0;) {
                bool from_a = false;
                for (size_t q = 0; q < a.sets.size(); ++q) from_a |= (a.sets[q] == r.sets[t]);
                if (from_a) {
                    size_t q = 0;
                    while (a.sets[q] != r.sets[t]) ++q;
                    u64 div = 1;
                    for (size_t u = a.sets.size(); u-- > q + 1;) div *= a.radix[u];
                    digits[t] = (pa / div) % a.radix[q];
                } else {
                    size_t q = 0;
                    while (b.sets[q] != r.sets[t]) ++q;
                    u64 div = 1;
                    for (size_t u = b.sets.size(); u-- > q + 1;) div *= b.radix[u];
                    digits[t] = (pb / div) % b.radix[q];
                }
            }
            u64 idx = 0;
            for (size_t t = 0; t < r.sets.size(); ++t) idx = idx * r.radix[t] + digits[t];
            r.coeffs[idx] = r.field->add(r.coeffs[idx], r.field->mul(a.coeffs[pa], b.coeffs[pb]));
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Naive dense rank: straightforward elimination with first-nonzero pivoting,
// no sparsity, no bit packing.
// ---------------------------------------------------------------------------

inline u64 dense_rank(const PDMatrix& M, const FieldPtr& field_override = nullptr) {
    const Field& field = field_override ? *field_override : *M.field();
    std::vector<std::vector<u64>> a(M.rows(), std::vector<u64>(M.cols(), 0));
    for (const auto& e : M.entries()) a[e.row][e.col] = field.from_integer(e.value);

    u64 rank = 0;
    u64 row = 0;
    for (u64 col = 0; col < M.cols() && row < M.rows(); ++col) {
        u64 pivot = row;
        while (pivot < M.rows() && a[pivot][col] == 0) ++pivot;
        if (pivot == M.rows()) continue;
        std::swap(a[row], a[pivot]);
        const u64 inv = field.inv(a[row][col]);
        for (u64 r2 = row + 1; r2 < M.rows(); ++r2) {
            if (a[r2][col] == 0) continue;
            const u64 factor = field.mul(a[r2][col], inv);
            for (u64 c2 = col; c2 < M.cols(); ++c2)
                a[r2][c2] = field.sub(a[r2][c2], field.mul(factor, a[row][c2]));
        }
        ++row;
        ++rank;
    }
    return rank;
}

// ---------------------------------------------------------------------------
// Brute-force partition probability by direct per-word block sums, written
// against the block position lists rather than bitmask popcounts.
// ---------------------------------------------------------------------------

inline std::pair<u64, u64> brute_partition_probability(const std::vector<std::vector<u32>>& blocks, u32 d,
                                                       const Rational& threshold) {
    const u64 total = u64(1) << d;
    u64 favorable = 0;
    for (u64 bits = 0; bits < total; ++bits) {
        i64 sum = 0;
        for (const auto& block : blocks) {
            i64 s = 0;
            for (u32 p : block) s += (bits >> (p - 1) & 1) ? 1 : -1;
            sum += s < 0 ? -s : s;
        }
        if (Rational(sum) < threshold) ++favorable;
    }
    return {favorable, total};
}

} // namespace oracle
