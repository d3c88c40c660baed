#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "smrank/common.hpp"

namespace smrank {

// ---------------------------------------------------------------------------
// Exact arithmetic for GF(p), p an odd or even prime < 2^31, and GF(2^k),
// k <= 16. A Field is an immutable descriptor; raw element values are
// canonical uint64 representatives (integer mod p, or k-bit coefficient
// vector of the polynomial basis). All operations are pure.
// ---------------------------------------------------------------------------

enum class FieldKind { Prime, Binary };

namespace detail {

// GF(2)[x] helpers on bit-packed polynomials (bit i = coefficient of x^i).

inline int poly2_degree(u64 p) { return p == 0 ? -1 : 63 - std::countl_zero(p); }

inline u64 poly2_mulmod(u64 a, u64 b, u64 mod) {
    const int k = poly2_degree(mod);
    u64 r = 0;
    while (b) {
        if (b & 1) r ^= a;
        b >>= 1;
        a <<= 1;
        if (a >> k & 1) a ^= mod;
    }
    return r;
}

inline u64 poly2_mod(u64 a, u64 mod) {
    const int k = poly2_degree(mod);
    int da = poly2_degree(a);
    while (da >= k) {
        a ^= mod << (da - k);
        da = poly2_degree(a);
    }
    return a;
}

inline bool poly2_irreducible(u64 mod) {
    const int k = poly2_degree(mod);
    if (k < 1) return false;
    if (k == 1) return true;
    for (u64 div = 2; poly2_degree(div) <= k / 2; ++div) {
        if (poly2_mod(mod, div) == 0) return false;
    }
    return true;
}

// One canonical irreducible modulus per extension degree, so monomial
// enumeration is reproducible across runs and platforms. Entry k-1 has
// degree k. Verified irreducible by the unit tests via poly2_irreducible.
inline constexpr u64 kBuiltinModuli[16] = {
    0x3,     // x + 1
    0x7,     // x^2 + x + 1
    0xB,     // x^3 + x + 1
    0x13,    // x^4 + x + 1
    0x25,    // x^5 + x^2 + 1
    0x43,    // x^6 + x + 1
    0x83,    // x^7 + x + 1
    0x11B,   // x^8 + x^4 + x^3 + x + 1
    0x211,   // x^9 + x^4 + 1
    0x409,   // x^10 + x^3 + 1
    0x805,   // x^11 + x^2 + 1
    0x1053,  // x^12 + x^6 + x^4 + x + 1
    0x201B,  // x^13 + x^4 + x^3 + x + 1
    0x4443,  // x^14 + x^10 + x^6 + x + 1
    0x8003,  // x^15 + x + 1
    0x1100B, // x^16 + x^12 + x^3 + x + 1
};

inline bool is_prime_u64(u64 p) {
    if (p < 2) return false;
    if (p % 2 == 0) return p == 2;
    for (u64 f = 3; f * f <= p; f += 2)
        if (p % f == 0) return false;
    return true;
}

} // namespace detail

class Field;
using FieldPtr = std::shared_ptr<const Field>;

class Field {
public:
    static FieldPtr prime(u64 p) {
        if (p < 2 || p >= (u64(1) << 31)) throw std::invalid_argument("Field::prime: need 2 <= p < 2^31");
        if (!detail::is_prime_u64(p)) throw std::invalid_argument("Field::prime: " + std::to_string(p) + " is not prime");
        return FieldPtr(new Field(FieldKind::Prime, p, p, 0, 0));
    }

    static FieldPtr gf2k(unsigned k) {
        if (k < 1 || k > 16) throw std::invalid_argument("Field::gf2k: need 1 <= k <= 16");
        return gf2k(k, detail::kBuiltinModuli[k - 1]);
    }

    static FieldPtr gf2k(unsigned k, u64 modulus) {
        if (k < 1 || k > 16) throw std::invalid_argument("Field::gf2k: need 1 <= k <= 16");
        if (detail::poly2_degree(modulus) != static_cast<int>(k))
            throw std::invalid_argument("Field::gf2k: modulus degree must equal k");
        if (!detail::poly2_irreducible(modulus))
            throw std::invalid_argument("Field::gf2k: modulus is reducible over GF(2)");
        return FieldPtr(new Field(FieldKind::Binary, u64(1) << k, 2, k, modulus));
    }

    static FieldPtr gf2() { return gf2k(1); }

    FieldKind kind() const { return kind_; }
    u64 order() const { return order_; }
    u64 characteristic() const { return char_; }
    unsigned ext_degree() const { return k_; }
    u64 modulus() const { return modulus_; }

    bool same(const Field& o) const {
        return kind_ == o.kind_ && order_ == o.order_ && modulus_ == o.modulus_;
    }

    bool canonical(u64 v) const { return v < order_; }

    u64 add(u64 a, u64 b) const {
        if (kind_ == FieldKind::Binary) return a ^ b;
        u64 s = a + b;
        return s >= order_ ? s - order_ : s;
    }

    u64 neg(u64 a) const {
        if (kind_ == FieldKind::Binary) return a;
        return a == 0 ? 0 : order_ - a;
    }

    u64 sub(u64 a, u64 b) const { return add(a, neg(b)); }

    u64 mul(u64 a, u64 b) const {
        if (kind_ == FieldKind::Binary) return detail::poly2_mulmod(a, b, modulus_);
        return (a * b) % order_; // p < 2^31, product fits u64
    }

    u64 pow(u64 a, u64 e) const {
        u64 r = 1, x = a;
        while (e) {
            if (e & 1) r = mul(r, x);
            x = mul(x, x);
            e >>= 1;
        }
        return r;
    }

    u64 inv(u64 a) const {
        if (a == 0) throw std::domain_error("Field::inv: zero is not invertible");
        return pow(a, order_ - 2);
    }

    // Reduces an arbitrary integer into the field: mod p for prime fields,
    // mod 2^k (bit truncation) for binary fields. Used by deserialization
    // and cross-field reinterpretation of 0/1 matrices.
    u64 from_integer(u64 v) const {
        if (kind_ == FieldKind::Binary) return v & (order_ - 1);
        return v % order_;
    }

    std::string describe() const {
        if (kind_ == FieldKind::Prime) return "GF(" + std::to_string(order_) + ")";
        std::ostringstream os;
        os << "GF(2^" << k_ << "), modulus 0x" << std::hex << modulus_;
        return os.str();
    }

private:
    Field(FieldKind kind, u64 order, u64 ch, unsigned k, u64 modulus)
        : kind_(kind), order_(order), char_(ch), k_(k), modulus_(modulus) {}

    FieldKind kind_;
    u64 order_;
    u64 char_;
    unsigned k_;
    u64 modulus_;
};

inline void require_same_field(const FieldPtr& a, const FieldPtr& b, const char* where) {
    if (!a || !b || !a->same(*b))
        throw std::invalid_argument(std::string(where) + ": mismatched field descriptors");
}

// Typed element wrapper; arithmetic verifies descriptor compatibility.
struct FieldElement {
    FieldPtr field;
    u64 v = 0;

    FieldElement() = default;
    FieldElement(FieldPtr f, u64 value) : field(std::move(f)), v(value) {
        if (!field->canonical(v)) throw std::invalid_argument("FieldElement: value outside canonical range");
    }

    friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
        require_same_field(a.field, b.field, "FieldElement::operator+");
        return {a.field, a.field->add(a.v, b.v)};
    }
    friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
        require_same_field(a.field, b.field, "FieldElement::operator-");
        return {a.field, a.field->sub(a.v, b.v)};
    }
    friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
        require_same_field(a.field, b.field, "FieldElement::operator*");
        return {a.field, a.field->mul(a.v, b.v)};
    }
    FieldElement operator-() const { return {field, field->neg(v)}; }
    FieldElement inv() const { return {field, field->inv(v)}; }

    friend bool operator==(const FieldElement& a, const FieldElement& b) {
        return a.field->same(*b.field) && a.v == b.v;
    }
};

// ---------------------------------------------------------------------------
// Univariate polynomials, lowest degree first, trailing zeros stripped.
// ---------------------------------------------------------------------------

class UniPoly {
public:
    UniPoly(FieldPtr field, std::vector<u64> coeffs) : field_(std::move(field)), coeffs_(std::move(coeffs)) {
        for (u64 c : coeffs_)
            if (!field_->canonical(c)) throw std::invalid_argument("UniPoly: coefficient outside canonical range");
        normalize();
    }

    static UniPoly zero(FieldPtr field) { return UniPoly(std::move(field), {}); }

    const FieldPtr& field() const { return field_; }
    const std::vector<u64>& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }
    long degree() const { return static_cast<long>(coeffs_.size()) - 1; }

    u64 evaluate(u64 x) const {
        u64 acc = 0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
            acc = field_->add(field_->mul(acc, x), *it);
        return acc;
    }

    friend bool operator==(const UniPoly& a, const UniPoly& b) {
        return a.field_->same(*b.field_) && a.coeffs_ == b.coeffs_;
    }

private:
    void normalize() {
        while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
    }

    FieldPtr field_;
    std::vector<u64> coeffs_;
};

// Lagrange interpolation: the unique polynomial of degree < #points through
// the given points. Points are (x, y) raw values over `field`.
inline UniPoly interpolate(const FieldPtr& field, const std::vector<std::pair<u64, u64>>& points) {
    if (points.empty()) throw std::invalid_argument("interpolate: need at least one point");
    const size_t m = points.size();
    for (size_t i = 0; i < m; ++i)
        for (size_t j = i + 1; j < m; ++j)
            if (points[i].first == points[j].first)
                throw std::invalid_argument("interpolate: duplicate x value");

    // Full product N(z) = prod (z - x_j), then per-point synthetic division.
    std::vector<u64> master(m + 1, 0);
    master[0] = 1;
    size_t len = 1;
    for (const auto& [x, y] : points) {
        (void)y;
        const u64 negx = field->neg(x);
        master[len] = 0;
        for (size_t t = len; t > 0; --t)
            master[t] = field->add(master[t - 1], field->mul(master[t], negx));
        master[0] = field->mul(master[0], negx);
        ++len;
    }

    std::vector<u64> result(m, 0);
    std::vector<u64> basis(m, 0);
    for (const auto& [xi, yi] : points) {
        // basis = N(z) / (z - xi), by synthetic division.
        u64 carry = 0;
        for (size_t t = m; t-- > 0;) {
            carry = field->add(master[t + 1], field->mul(carry, xi));
            basis[t] = carry;
        }
        // scale = yi / basis(xi)
        u64 denom = 0;
        for (size_t t = m; t-- > 0;) denom = field->add(field->mul(denom, xi), basis[t]);
        const u64 scale = field->mul(yi, field->inv(denom));
        for (size_t t = 0; t < m; ++t)
            result[t] = field->add(result[t], field->mul(scale, basis[t]));
    }
    return UniPoly(field, std::move(result));
}

// Streams all order^num_coeffs polynomials with degree < num_coeffs, in
// lexicographic order of coefficient vectors (c_0 least significant digit).
class PolyEnumerator {
public:
    PolyEnumerator(FieldPtr field, u64 num_coeffs)
        : field_(std::move(field)), num_coeffs_(num_coeffs), total_(checked_pow(field_->order(), num_coeffs)) {}

    u64 total() const { return total_; }

    std::optional<UniPoly> next() {
        if (index_ >= total_) return std::nullopt;
        u64 rem = index_++;
        std::vector<u64> coeffs(num_coeffs_);
        for (u64 t = 0; t < num_coeffs_; ++t) {
            coeffs[t] = rem % field_->order();
            rem /= field_->order();
        }
        return UniPoly(field_, std::move(coeffs));
    }

    void reset() { index_ = 0; }

private:
    FieldPtr field_;
    u64 num_coeffs_;
    u64 total_;
    u64 index_ = 0;
};

} // namespace smrank
