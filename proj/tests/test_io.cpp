#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "smrank/families.hpp"
#include "smrank/io.hpp"

using namespace smrank;

namespace {
const FieldPtr kF = Field::prime(65521);
}

TEST(FieldJson, RoundTrip) {
    for (auto f : {Field::prime(2), Field::prime(65521), Field::gf2k(3), Field::gf2k(8)}) {
        const FieldPtr g = field_from_json(field_to_json(*f));
        EXPECT_TRUE(f->same(*g));
    }
}

TEST(ParseField, Syntax) {
    EXPECT_EQ(parse_field("gf2")->order(), 2u);
    EXPECT_EQ(parse_field("gf2k:3")->order(), 8u);
    EXPECT_EQ(parse_field("p:65521")->order(), 65521u);
    EXPECT_THROW(parse_field("wat"), std::invalid_argument);
    EXPECT_THROW(parse_field("p:6"), std::invalid_argument);
}

TEST(ParseWord, Syntax) {
    const Word w = parse_word("+3,+3,-3,-3");
    EXPECT_EQ(w.d(), 4u);
    EXPECT_EQ(w.size(1), 8u);
    EXPECT_EQ(w.sign(3), -1);
    EXPECT_TRUE(w.is_balanced());
    EXPECT_EQ(w.str(), "+3,+3,-3,-3");
    EXPECT_THROW(parse_word(""), std::invalid_argument);
    EXPECT_THROW(parse_word("+3,,"), std::invalid_argument);
}

TEST(WordJson, RoundTrip) {
    const Word w({{1, 4}, {-1, 2}, {1, 1}});
    EXPECT_EQ(word_from_json(word_to_json(w)), w);
}

TEST(PolyJson, RoundTripEquality) {
    for (const SetMLPoly& p : {nw(4, 4, kF), imm(2, 3, Field::gf2k(4)),
                               random_poly(make_profile({3, 5, 2}), 0b101, 6, Field::gf2(), 42)}) {
        const SetMLPoly q = poly_from_json(poly_to_json(p));
        EXPECT_EQ(p, q);
        // serialized form is stable
        EXPECT_EQ(poly_to_json(p).dump(), poly_to_json(q).dump());
    }
}

TEST(PolyJson, RejectsBadVersion) {
    Json j = poly_to_json(nw(2, 2, kF));
    j["format_version"] = 99;
    EXPECT_THROW(poly_from_json(j), std::invalid_argument);
}

TEST(FormulaJson, RoundTripExpansion) {
    const Formula f = build_imm_formula(2, 4, 2, kF);
    const Formula g = formula_from_json(formula_to_json(f));
    EXPECT_EQ(expand(f), expand(g));
    EXPECT_EQ(f.node_count(), g.node_count());
    EXPECT_EQ(f.product_depth(), g.product_depth());

    const Formula wp = build_word_poly_formula(make_symmetric_word({1, -1, 1, -1}, 2), kF);
    EXPECT_EQ(expand(formula_from_json(formula_to_json(wp))), expand(wp));
}

TEST(FormulaJson, RandomTreesSurviveRoundTrip) {
    SplitMix64 rng(400);
    for (int t = 0; t < 25; ++t) {
        auto profile = uniform_profile(2 + rng.bounded(6), 2 + rng.bounded(2));
        const Formula f = random_formula(profile, 1 + rng.bounded(3), 200, rng.next(), kF);
        const Formula g = formula_from_json(formula_to_json(f));
        EXPECT_EQ(formula_to_json(f).dump(), formula_to_json(g).dump());
        EXPECT_EQ(expand(f), expand(g));
    }
}

TEST(MatrixMarket, CoordinateFormat) {
    SetMLPoly p = nw(2, 2, kF);
    const PDMatrix M = pd_matrix(p, make_symmetric_word({1, -1}, 1));
    const std::string mm = pdmatrix_to_matrix_market(M);
    EXPECT_NE(mm.find("%%MatrixMarket matrix coordinate integer general"), std::string::npos);
    EXPECT_NE(mm.find("2 2 2"), std::string::npos); // dims + nnz
    EXPECT_NE(mm.find("1 1 1"), std::string::npos); // 1-based identity entries
    EXPECT_NE(mm.find("2 2 1"), std::string::npos);
}

TEST(Files, WriteReadRoundTrip) {
    const auto dir = std::filesystem::temp_directory_path() / "smrank_io_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "poly.json").string();
    const SetMLPoly p = nw(4, 2, kF);
    write_json_file(path, poly_to_json(p));
    EXPECT_EQ(poly_from_json(read_json_file(path)), p);
    std::filesystem::remove_all(dir);
}
