#include <gtest/gtest.h>

#include <set>

#include "smrank/ff.hpp"

using namespace smrank;

TEST(Field, PrimeBasics) {
    auto f5 = Field::prime(5);
    EXPECT_EQ(f5->order(), 5u);
    EXPECT_EQ(f5->add(3, 4), 2u); // 3 + 4 = 2 mod 5
    EXPECT_EQ(f5->mul(3, 4), 2u);
    EXPECT_EQ(f5->neg(2), 3u);
    EXPECT_EQ(f5->sub(1, 3), 3u);
}

TEST(Field, RejectsBadParameters) {
    EXPECT_THROW(Field::prime(1), std::invalid_argument);
    EXPECT_THROW(Field::prime(6), std::invalid_argument);
    EXPECT_THROW(Field::gf2k(0), std::invalid_argument);
    EXPECT_THROW(Field::gf2k(17), std::invalid_argument);
    EXPECT_THROW(Field::gf2k(2, 0x5), std::invalid_argument); // x^2 + 1 = (x+1)^2
}

TEST(Field, Gf4MulReducesModulus) {
    // GF(4) with modulus z^2 + z + 1: z * (z + 1) = z^2 + z = 1.
    auto f4 = Field::gf2k(2);
    const u64 z = 0b10, z1 = 0b11;
    EXPECT_EQ(f4->mul(z, z1), 1u);
}

TEST(Field, BuiltinModuliAreIrreducible) {
    for (unsigned k = 1; k <= 16; ++k) {
        auto f = Field::gf2k(k);
        EXPECT_EQ(f->order(), u64(1) << k);
        EXPECT_TRUE(detail::poly2_irreducible(f->modulus())) << "k = " << k;
        EXPECT_EQ(detail::poly2_degree(f->modulus()), int(k)) << "k = " << k;
    }
}

TEST(Field, InverseAxiom) {
    for (auto field : {Field::prime(7), Field::prime(65521), Field::gf2k(4), Field::gf2k(8)}) {
        SplitMix64 rng(11);
        for (int t = 0; t < 200; ++t) {
            const u64 a = 1 + rng.bounded(field->order() - 1);
            EXPECT_EQ(field->mul(a, field->inv(a)), 1u);
        }
        EXPECT_THROW(field->inv(0), std::domain_error);
    }
}

// Exhaustive field-axiom verification for every descriptor of order <= 16.
TEST(Field, ExhaustiveAxiomsSmallOrders) {
    std::vector<FieldPtr> fields = {Field::prime(2),  Field::prime(3),  Field::prime(5),  Field::prime(7),
                                    Field::prime(11), Field::prime(13), Field::gf2k(1),   Field::gf2k(2),
                                    Field::gf2k(3),   Field::gf2k(4)};
    for (const auto& f : fields) {
        const u64 q = f->order();
        for (u64 a = 0; a < q; ++a) {
            for (u64 b = 0; b < q; ++b) {
                EXPECT_EQ(f->add(a, b), f->add(b, a));
                EXPECT_EQ(f->mul(a, b), f->mul(b, a));
                for (u64 c = 0; c < q; ++c) {
                    EXPECT_EQ(f->add(f->add(a, b), c), f->add(a, f->add(b, c)));
                    EXPECT_EQ(f->mul(f->mul(a, b), c), f->mul(a, f->mul(b, c)));
                    EXPECT_EQ(f->mul(a, f->add(b, c)), f->add(f->mul(a, b), f->mul(a, c)));
                }
            }
            // unique additive and multiplicative inverses
            u64 add_inv_count = 0, mul_inv_count = 0;
            for (u64 b = 0; b < q; ++b) {
                add_inv_count += (f->add(a, b) == 0);
                mul_inv_count += (f->mul(a, b) == 1);
            }
            EXPECT_EQ(add_inv_count, 1u);
            EXPECT_EQ(mul_inv_count, a == 0 ? 0u : 1u);
        }
    }
}

TEST(FieldElement, MismatchedDescriptorsThrow) {
    FieldElement a{Field::prime(5), 3};
    FieldElement b{Field::prime(7), 3};
    EXPECT_THROW(a + b, std::invalid_argument);
    FieldElement c{Field::gf2k(2), 3};
    EXPECT_THROW(a * c, std::invalid_argument);
}

TEST(UniPoly, NormalizesTrailingZeros) {
    auto f = Field::prime(5);
    UniPoly p(f, {1, 2, 0, 0});
    EXPECT_EQ(p.degree(), 1);
    EXPECT_TRUE(UniPoly(f, {0, 0}).is_zero());
}

TEST(Interpolate, IdentityLineOverGf4) {
    auto f4 = Field::gf2k(2);
    const UniPoly p = interpolate(f4, {{0, 0}, {1, 1}});
    EXPECT_EQ(p, UniPoly(f4, {0, 1})); // f(z) = z
}

TEST(Interpolate, EqualValuesForceConstant) {
    auto f4 = Field::gf2k(2);
    const u64 omega = 0b10;
    const UniPoly p = interpolate(f4, {{0, omega}, {1, omega}});
    EXPECT_EQ(p, UniPoly(f4, {omega}));
}

TEST(Interpolate, RoundTripRandomPointsGf8) {
    auto f8 = Field::gf2k(3);
    SplitMix64 rng(3);
    for (int t = 0; t < 50; ++t) {
        // 3 random points with distinct x
        std::set<u64> xs;
        while (xs.size() < 3) xs.insert(rng.bounded(8));
        std::vector<std::pair<u64, u64>> pts;
        for (u64 x : xs) pts.emplace_back(x, rng.bounded(8));
        const UniPoly p = interpolate(f8, pts);
        EXPECT_LE(p.degree(), 2);
        for (const auto& [x, y] : pts) EXPECT_EQ(p.evaluate(x), y);
    }
}

TEST(Interpolate, InterpolateEvaluateRoundTrip) {
    // interpolating m samples of a random polynomial of degree < m returns
    // exactly that polynomial
    for (auto field : {Field::prime(13), Field::gf2k(4)}) {
        SplitMix64 rng(17);
        for (int t = 0; t < 40; ++t) {
            const u64 m = 1 + rng.bounded(field->order() - 1);
            std::vector<u64> coeffs(m);
            for (auto& c : coeffs) c = rng.bounded(field->order());
            const UniPoly g(field, coeffs);
            std::vector<std::pair<u64, u64>> samples;
            for (u64 x = 0; x < m; ++x) samples.emplace_back(x, g.evaluate(x));
            EXPECT_EQ(interpolate(field, samples), g);
        }
    }
}

TEST(Interpolate, RejectsBadInput) {
    auto f = Field::prime(5);
    EXPECT_THROW(interpolate(f, {}), std::invalid_argument);
    EXPECT_THROW(interpolate(f, {{1, 2}, {1, 3}}), std::invalid_argument);
}

TEST(EnumeratePolys, Gf2OneCoefficient) {
    PolyEnumerator en(Field::gf2(), 1);
    EXPECT_EQ(en.total(), 2u);
    auto p0 = en.next(), p1 = en.next();
    ASSERT_TRUE(p0 && p1);
    EXPECT_TRUE(p0->is_zero());
    EXPECT_EQ(*p1, UniPoly(Field::gf2(), {1}));
    EXPECT_FALSE(en.next().has_value());
}

TEST(EnumeratePolys, CountsAndDistinctness) {
    { // GF(4), 2 coefficients -> 16 polynomials
        PolyEnumerator en(Field::gf2k(2), 2);
        EXPECT_EQ(en.total(), 16u);
    }
    { // GF(8), 3 coefficients -> 512 distinct polynomials, degree < 3
        PolyEnumerator en(Field::gf2k(3), 3);
        EXPECT_EQ(en.total(), 512u);
        std::set<std::vector<u64>> seen;
        while (auto p = en.next()) {
            EXPECT_LT(p->degree(), 3);
            seen.insert(p->coeffs());
        }
        EXPECT_EQ(seen.size(), 512u);
    }
}

TEST(EnumeratePolys, ZeroCoefficients) {
    PolyEnumerator en(Field::prime(7), 0);
    EXPECT_EQ(en.total(), 1u);
    auto p = en.next();
    ASSERT_TRUE(p);
    EXPECT_TRUE(p->is_zero());
}
