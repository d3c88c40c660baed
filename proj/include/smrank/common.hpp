#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace smrank {

using u8 = std::uint8_t;
using u16 = std::uint16_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

inline bool is_pow2(u64 x) { return x != 0 && (x & (x - 1)) == 0; }

// Exact log2 for powers of two only.
inline int log2_exact(u64 x) {
    if (!is_pow2(x)) throw std::invalid_argument("log2_exact: not a power of two");
    return std::countr_zero(x);
}

// Checked integer power; throws on overflow past 2^62.
inline u64 checked_pow(u64 base, u64 exp) {
    u128 r = 1;
    for (u64 i = 0; i < exp; ++i) {
        r *= base;
        if (r > (u128(1) << 62)) throw std::overflow_error("checked_pow: result exceeds 2^62");
    }
    return static_cast<u64>(r);
}

// ---------------------------------------------------------------------------
// Deterministic RNG. All randomness in the library flows through SplitMix64
// so results are identical across platforms and standard-library versions.
// ---------------------------------------------------------------------------

class SplitMix64 {
public:
    explicit SplitMix64(u64 seed) : state_(seed) {}

    u64 next() {
        u64 z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform value in [0, n) via 128-bit multiply (no modulo bias worth
    // caring about at 64-bit state width, and fully deterministic).
    u64 bounded(u64 n) {
        if (n == 0) throw std::invalid_argument("bounded: n must be positive");
        return static_cast<u64>((u128(next()) * n) >> 64);
    }

    bool coin() { return (next() >> 63) != 0; }

private:
    u64 state_;
};

// Derives an independent per-sample stream from a master seed, so parallel
// schedules cannot reorder randomness.
inline u64 derive_stream(u64 master_seed, u64 index) {
    SplitMix64 g(master_seed ^ (0x6a09e667f3bcc909ULL + index * 0x9e3779b97f4a7c15ULL));
    g.next();
    return g.next();
}

// ---------------------------------------------------------------------------
// Small exact rational on int64, used for degree-window and block-size
// comparisons. Cross multiplications go through 128-bit intermediates.
// ---------------------------------------------------------------------------

struct Rational {
    i64 num = 0;
    i64 den = 1;

    Rational() = default;
    Rational(i64 n) : num(n), den(1) {}
    Rational(i64 n, i64 d) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        i64 g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator<(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return a == b || a < b; }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }

    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num * b.num, a.den * b.den);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num == 0) throw std::domain_error("Rational: division by zero");
        return Rational(a.num * b.den, a.den * b.num);
    }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }
};

// ---------------------------------------------------------------------------
// Deterministic fork/join loop: results land in slot i regardless of the
// worker count, so aggregation order never depends on scheduling.
// ---------------------------------------------------------------------------

inline void parallel_for(u64 count, unsigned jobs, const std::function<void(u64)>& body) {
    if (jobs <= 1 || count < 2) {
        for (u64 i = 0; i < count; ++i) body(i);
        return;
    }
    unsigned workers = jobs;
    if (workers > count) workers = static_cast<unsigned>(count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr first_error;
    std::mutex err_mu;
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (u64 i = t; i < count; i += workers) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace smrank
