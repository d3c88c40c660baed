#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "smrank/common.hpp"
#include "smrank/ff.hpp"

namespace smrank {

// ---------------------------------------------------------------------------
// Sparse set-multilinear polynomials over a variable partition X_1..X_d.
// A monomial picks exactly one variable from each set of its support;
// supports are bitmasks over [d] (d <= 64), variable indices are 1-based.
// ---------------------------------------------------------------------------

class PartitionProfile {
public:
    explicit PartitionProfile(std::vector<u32> sizes) : sizes_(std::move(sizes)) {
        if (sizes_.empty() || sizes_.size() > 64)
            throw std::invalid_argument("PartitionProfile: need 1 <= d <= 64 variable sets");
        for (u32 s : sizes_)
            if (s < 1 || s > 65535) throw std::invalid_argument("PartitionProfile: set sizes must be in [1, 65535]");
    }

    u32 d() const { return static_cast<u32>(sizes_.size()); }
    u32 size(u32 set) const { return sizes_.at(set - 1); } // 1-based
    const std::vector<u32>& sizes() const { return sizes_; }
    u64 full_mask() const { return d() == 64 ? ~u64(0) : (u64(1) << d()) - 1; }

    bool operator==(const PartitionProfile& o) const { return sizes_ == o.sizes_; }

private:
    std::vector<u32> sizes_;
};

using ProfilePtr = std::shared_ptr<const PartitionProfile>;

inline ProfilePtr make_profile(std::vector<u32> sizes) {
    return std::make_shared<const PartitionProfile>(std::move(sizes));
}

inline ProfilePtr uniform_profile(u32 d, u32 n) {
    return make_profile(std::vector<u32>(d, n));
}

inline void require_same_profile(const ProfilePtr& a, const ProfilePtr& b, const char* where) {
    if (!a || !b || !(*a == *b))
        throw std::invalid_argument(std::string(where) + ": mismatched partition profiles");
}

// Dense-in-d representation: vars[j-1] = 0 when set j is unused, else the
// 1-based variable index. Lexicographic vector order doubles as the
// canonical monomial order (sets ascending, variable indices 1-based).
struct SetMLMonomial {
    std::vector<u16> vars;

    explicit SetMLMonomial(u32 d) : vars(d, 0) {}
    SetMLMonomial() = default;

    u32 d() const { return static_cast<u32>(vars.size()); }
    u16 var(u32 set) const { return vars[set - 1]; }
    void set_var(u32 set, u16 index) { vars[set - 1] = index; }

    u64 support_mask() const {
        u64 m = 0;
        for (u32 j = 0; j < vars.size(); ++j)
            if (vars[j] != 0) m |= u64(1) << j;
        return m;
    }

    u32 degree() const {
        u32 c = 0;
        for (u16 v : vars) c += (v != 0);
        return c;
    }

    // Concatenation of monomials with disjoint supports.
    static SetMLMonomial merge(const SetMLMonomial& a, const SetMLMonomial& b) {
        SetMLMonomial r(a.d());
        for (u32 j = 0; j < a.vars.size(); ++j) {
            if (a.vars[j] != 0 && b.vars[j] != 0)
                throw std::invalid_argument("SetMLMonomial::merge: overlapping supports");
            r.vars[j] = a.vars[j] != 0 ? a.vars[j] : b.vars[j];
        }
        return r;
    }

    friend bool operator<(const SetMLMonomial& a, const SetMLMonomial& b) { return a.vars < b.vars; }
    friend bool operator==(const SetMLMonomial& a, const SetMLMonomial& b) { return a.vars == b.vars; }
};

class SetMLPoly {
public:
    using TermMap = std::map<SetMLMonomial, u64>;

    SetMLPoly(ProfilePtr profile, FieldPtr field, u64 support_mask)
        : profile_(std::move(profile)), field_(std::move(field)), support_(support_mask) {
        if (support_ & ~profile_->full_mask())
            throw std::invalid_argument("SetMLPoly: support outside profile");
    }

    static SetMLPoly zero(ProfilePtr profile, FieldPtr field, u64 support_mask) {
        return SetMLPoly(std::move(profile), std::move(field), support_mask);
    }

    const ProfilePtr& profile() const { return profile_; }
    const FieldPtr& field() const { return field_; }
    u64 support_mask() const { return support_; }
    u32 degree() const { return static_cast<u32>(std::popcount(support_)); }
    const TermMap& terms() const { return terms_; }
    u64 num_terms() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    u64 coeff(const SetMLMonomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? 0 : it->second;
    }

    // Accumulates c into the coefficient of m; erases on cancellation.
    void add_term(const SetMLMonomial& m, u64 c) {
        if (c == 0) return;
        if (m.support_mask() != support_)
            throw std::invalid_argument("SetMLPoly::add_term: monomial support differs from polynomial support");
        auto [it, inserted] = terms_.try_emplace(m, 0);
        it->second = field_->add(it->second, c);
        if (it->second == 0) terms_.erase(it);
    }

    // Full invariant check: one variable per supported set, indices within
    // the profile, no zero coefficients stored.
    void validate() const {
        for (const auto& [m, c] : terms_) {
            if (c == 0) throw std::logic_error("SetMLPoly: stored zero coefficient");
            if (!field_->canonical(c)) throw std::logic_error("SetMLPoly: non-canonical coefficient");
            if (m.d() != profile_->d()) throw std::logic_error("SetMLPoly: monomial arity mismatch");
            if (m.support_mask() != support_)
                throw std::logic_error("SetMLPoly: monomial support differs from polynomial support");
            for (u32 j = 1; j <= profile_->d(); ++j)
                if (m.var(j) > profile_->size(j))
                    throw std::logic_error("SetMLPoly: variable index outside profile set");
        }
    }

    friend bool operator==(const SetMLPoly& a, const SetMLPoly& b) {
        return *a.profile_ == *b.profile_ && a.field_->same(*b.field_) && a.support_ == b.support_ &&
               a.terms_ == b.terms_;
    }

private:
    ProfilePtr profile_;
    FieldPtr field_;
    u64 support_;
    TermMap terms_;
};

inline SetMLPoly poly_add(const SetMLPoly& f, const SetMLPoly& g) {
    require_same_profile(f.profile(), g.profile(), "poly_add");
    require_same_field(f.field(), g.field(), "poly_add");
    if (f.support_mask() != g.support_mask())
        throw std::invalid_argument("poly_add: operands have different supports");
    SetMLPoly r = f;
    for (const auto& [m, c] : g.terms()) r.add_term(m, c);
    return r;
}

inline SetMLPoly poly_mul(const SetMLPoly& f, const SetMLPoly& g) {
    require_same_profile(f.profile(), g.profile(), "poly_mul");
    require_same_field(f.field(), g.field(), "poly_mul");
    if (f.support_mask() & g.support_mask())
        throw std::invalid_argument("poly_mul: overlapping supports (product would not be set-multilinear)");
    SetMLPoly r(f.profile(), f.field(), f.support_mask() | g.support_mask());
    const auto& field = *f.field();
    for (const auto& [mf, cf] : f.terms())
        for (const auto& [mg, cg] : g.terms())
            r.add_term(SetMLMonomial::merge(mf, mg), field.mul(cf, cg));
    return r;
}

inline SetMLPoly poly_scale(const SetMLPoly& f, u64 c) {
    SetMLPoly r(f.profile(), f.field(), f.support_mask());
    for (const auto& [m, v] : f.terms()) r.add_term(m, f.field()->mul(v, c));
    return r;
}

// Constant polynomial (empty support); c = 0 gives the zero polynomial.
inline SetMLPoly poly_const(const ProfilePtr& profile, const FieldPtr& field, u64 c) {
    SetMLPoly r(profile, field, 0);
    if (c != 0) r.add_term(SetMLMonomial(profile->d()), c);
    return r;
}

inline SetMLPoly poly_var(const ProfilePtr& profile, const FieldPtr& field, u32 set, u16 var) {
    if (set < 1 || set > profile->d() || var < 1 || var > profile->size(set))
        throw std::invalid_argument("poly_var: variable outside profile");
    SetMLPoly r(profile, field, u64(1) << (set - 1));
    SetMLMonomial m(profile->d());
    m.set_var(set, var);
    r.add_term(m, 1);
    return r;
}

namespace detail {

// Number of set-multilinear monomials over the supported sets.
inline u64 monomial_space(const PartitionProfile& profile, u64 support_mask) {
    u128 space = 1;
    for (u32 j = 1; j <= profile.d(); ++j) {
        if (!(support_mask >> (j - 1) & 1)) continue;
        space *= profile.size(j);
        if (space > (u128(1) << 62)) throw std::overflow_error("monomial space exceeds 2^62");
    }
    return static_cast<u64>(space);
}

// Mixed-radix decode: sets ascending, first supported set most significant.
inline SetMLMonomial decode_monomial(const PartitionProfile& profile, u64 support_mask, u64 index) {
    SetMLMonomial m(profile.d());
    std::vector<u32> sets;
    for (u32 j = 1; j <= profile.d(); ++j)
        if (support_mask >> (j - 1) & 1) sets.push_back(j);
    for (auto it = sets.rbegin(); it != sets.rend(); ++it) {
        const u32 n = profile.size(*it);
        m.set_var(*it, static_cast<u16>(index % n + 1));
        index /= n;
    }
    return m;
}

} // namespace detail

// Deterministic random polynomial: exactly num_terms distinct monomials with
// nonzero coefficients, reproducible for a fixed seed. Monomials are drawn
// uniformly without replacement via a sparse Fisher-Yates over the
// mixed-radix index space.
inline SetMLPoly random_poly(const ProfilePtr& profile, u64 support_mask, u64 num_terms, const FieldPtr& field,
                             u64 seed) {
    const u64 space = detail::monomial_space(*profile, support_mask);
    if (num_terms > space)
        throw std::invalid_argument("random_poly: num_terms exceeds the monomial space");
    SetMLPoly r(profile, field, support_mask);
    SplitMix64 rng(derive_stream(seed, 0x52504f4c59));
    std::map<u64, u64> swaps;
    auto slot = [&](u64 i) {
        auto it = swaps.find(i);
        return it == swaps.end() ? i : it->second;
    };
    for (u64 t = 0; t < num_terms; ++t) {
        const u64 j = t + rng.bounded(space - t);
        const u64 pick = slot(j);
        swaps[j] = slot(t);
        const u64 c = 1 + rng.bounded(field->order() - 1);
        r.add_term(detail::decode_monomial(*profile, support_mask, pick), c);
    }
    return r;
}

} // namespace smrank
