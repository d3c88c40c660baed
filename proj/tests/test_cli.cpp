// End-to-end checks of the smrank binary: exit codes, file outputs, and
// byte-identical reruns. The binary path comes from the build system.
#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "smrank/io.hpp"

using namespace smrank;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(SMRANK_BIN) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    EXPECT_NE(pipe, nullptr);
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "smrank_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST(Cli, HelpExitsZero) {
    const auto r = run("--help");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("smrank"), std::string::npos);
}

TEST(Cli, NwPermAllPasses) {
    const auto r = run("exp nw-perm --n 4 --d 4 --all");
    EXPECT_EQ(r.exit_code, 0);
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j.at("aggregates").at("words").get<u64>(), 6u);
    EXPECT_TRUE(j.at("aggregates").at("all_pass").get<bool>());
}

TEST(Cli, OddDegreeIsUsageError) {
    const auto r = run("exp nw-perm --n 4 --d 3 --all");
    EXPECT_EQ(r.exit_code, 2);
}

TEST(Cli, UnknownFlagIsUsageError) {
    const auto r = run("exp nw-perm --n 4 --d 4 --frobnicate");
    EXPECT_EQ(r.exit_code, 2);
}

TEST(Cli, FamiliesRoundTripThroughMeasure) {
    const auto dir = temp_dir();
    const std::string poly = (dir / "nw.json").string();
    const auto fam = run("families nw --n 8 --d 6 --out " + poly);
    ASSERT_EQ(fam.exit_code, 0);
    const SetMLPoly p = poly_from_json(read_json_file(poly));
    EXPECT_EQ(p.num_terms(), 512u);

    const auto meas = run("measure relrank --poly " + poly + " --word +3,+3,+3,-3,-3,-3");
    ASSERT_EQ(meas.exit_code, 0);
    const Json j = Json::parse(meas.out);
    EXPECT_EQ(j.at("rank").get<u64>(), 512u);
    EXPECT_EQ(j.at("twice_log2_relrank").get<i64>(), 0);
}

TEST(Cli, MeasureFieldOverride) {
    const auto dir = temp_dir();
    const std::string poly = (dir / "nw44.json").string();
    ASSERT_EQ(run("families nw --n 4 --d 4 --out " + poly).exit_code, 0);
    const auto r = run("measure relrank --poly " + poly + " --word +2,-2,+2,-2 --field gf2");
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_EQ(Json::parse(r.out).at("rank").get<u64>(), 16u);
}

TEST(Cli, TruncationPolicyFlag) {
    const auto dir = temp_dir();
    const std::string poly = (dir / "nw44b.json").string();
    ASSERT_EQ(run("families nw --n 4 --d 4 --out " + poly).exit_code, 0);
    // truncating each set to 2 variables keeps different monomial subsets
    // under the two policies, but both produce a valid report
    const auto lo = run("measure relrank --poly " + poly + " --word +1,-1,+1,-1 --trunc keep-lowest");
    const auto hi = run("measure relrank --poly " + poly + " --word +1,-1,+1,-1 --trunc keep-highest");
    ASSERT_EQ(lo.exit_code, 0);
    ASSERT_EQ(hi.exit_code, 0);
    EXPECT_EQ(Json::parse(lo.out).at("rows").get<u64>(), 4u);
    EXPECT_EQ(Json::parse(hi.out).at("rows").get<u64>(), 4u);
    EXPECT_EQ(run("measure relrank --poly " + poly + " --word +1,-1,+1,-1 --trunc sideways").exit_code, 2);
}

TEST(Cli, MatrixMarketExport) {
    const auto dir = temp_dir();
    const std::string poly = (dir / "nw22.json").string();
    const std::string mtx = (dir / "m.mtx").string();
    ASSERT_EQ(run("families nw --n 2 --d 2 --out " + poly).exit_code, 0);
    ASSERT_EQ(run("measure relrank --poly " + poly + " --word +1,-1 --export-matrix " + mtx).exit_code, 0);
    EXPECT_NE(read_text_file(mtx).find("%%MatrixMarket"), std::string::npos);
}

TEST(Cli, FormulaPipelineExpandDecompose) {
    const auto dir = temp_dir();
    const std::string formula = (dir / "imm.json").string();
    ASSERT_EQ(run("formula imm --n 2 --d 4 --depth 2 --out " + formula).exit_code, 0);

    const auto expand_run = run("formula expand --in " + formula);
    ASSERT_EQ(expand_run.exit_code, 0);
    EXPECT_EQ(poly_from_json(Json::parse(expand_run.out)).num_terms(), 8u); // n^{d-1}

    const auto dec = run("formula decompose --in " + formula + " --check");
    ASSERT_EQ(dec.exit_code, 0);
    const Json j = Json::parse(dec.out);
    EXPECT_TRUE(j.at("check").at("equality").get<bool>());
    EXPECT_TRUE(j.at("check").at("term_bound").get<bool>());
}

TEST(Cli, WordPolyFamilyAndFormulaAgree) {
    const auto a = run("families wordpoly --word +2,+2,-2,-2");
    ASSERT_EQ(a.exit_code, 0);
    const auto b = run("formula wordpoly --word +2,+2,-2,-2");
    ASSERT_EQ(b.exit_code, 0);
    const SetMLPoly pa = poly_from_json(Json::parse(a.out));
    const SetMLPoly pb = expand(formula_from_json(Json::parse(b.out)));
    EXPECT_EQ(pa, pb);
    EXPECT_EQ(pa.num_terms(), 16u); // n^{d/2} = 4^2
}

TEST(Cli, RelrankRejectsPartialSupportPolynomial) {
    const auto dir = temp_dir();
    const std::string path = (dir / "partial.json").string();
    // a polynomial supported on set 1 only, inside a d=2 profile
    const SetMLPoly p = poly_var(make_profile({2, 2}), Field::prime(5), 1, 1);
    write_json_file(path, poly_to_json(p));
    const auto r = run("measure relrank --poly " + path + " --word +1,-1");
    EXPECT_EQ(r.exit_code, 2);
}

TEST(Cli, SurveyFormulaTargetAutofillsBounds) {
    const auto dir = temp_dir();
    const std::string formula = (dir / "f.json").string();
    ASSERT_EQ(run("formula imm --n 2 --d 4 --depth 2 --out " + formula).exit_code, 0);
    const std::string cfg = (dir / "cfg.json").string();
    Json j;
    j["target"] = Json{{"kind", "formula-file"}, {"path", formula}};
    j["word_mode"] = "uniform";
    j["samples"] = 5;
    j["k"] = 1;
    write_json_file(cfg, j);
    const auto r = run("exp rank-survey --config " + cfg);
    ASSERT_EQ(r.exit_code, 0);
    const Json rep = Json::parse(r.out);
    EXPECT_TRUE(rep.at("bounds").contains("bounded_depth"));
    EXPECT_EQ(rep.at("bounds").at("bounded_depth").at("delta").get<u32>(), 2u);
    EXPECT_TRUE(rep.at("bounds").contains("general_depth"));
}

TEST(Cli, RankSurveyFromConfig) {
    const auto dir = temp_dir();
    const std::string cfg = (dir / "survey.json").string();
    Json j;
    j["target"] = Json{{"kind", "family"}, {"family", "nw"}, {"n", 8}, {"d", 6}, {"coeff_field", "p:65521"}};
    j["word_mode"] = "balanced";
    j["samples"] = 12;
    j["seed"] = 3;
    j["k"] = 3;
    write_json_file(cfg, j);

    const auto r = run("exp rank-survey --config " + cfg);
    ASSERT_EQ(r.exit_code, 0);
    const Json rep = Json::parse(r.out);
    EXPECT_EQ(rep.at("records").size(), 12u);
    for (const auto& rec : rep.at("records")) EXPECT_EQ(rec.at("twice_log2_relrank").get<i64>(), 0);

    const auto csv = run("--format csv exp rank-survey --config " + cfg);
    ASSERT_EQ(csv.exit_code, 0);
    EXPECT_NE(csv.out.find("word,rank,rows,cols"), std::string::npos);
}

TEST(Cli, PartitionExhaustive) {
    const auto r = run("exp partition --blocks 2,2 --threshold 1 --exhaustive");
    ASSERT_EQ(r.exit_code, 0);
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j.at("favorable").get<u64>(), 4u);
    EXPECT_EQ(j.at("total").get<u64>(), 16u);
}

TEST(Cli, StirlingPasses) {
    const auto r = run("exp stirling --max 40");
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_TRUE(Json::parse(r.out).at("aggregates").at("all_ok").get<bool>());
}

TEST(Cli, ReproducibleAcrossJobsAndSeedsViaEnv) {
    const auto r1 = run("--seed 7 --jobs 1 exp nw-perm --n 8 --d 4 --sample 10");
    const auto r8 = run("--seed 7 --jobs 8 exp nw-perm --n 8 --d 4 --sample 10");
    ASSERT_EQ(r1.exit_code, 0);
    ASSERT_EQ(r8.exit_code, 0);
    EXPECT_EQ(r1.out, r8.out);
    // SMRANK_SEED is the fallback seed
    RunResult enved;
    {
        const std::string cmd = std::string("SMRANK_SEED=7 ") + SMRANK_BIN + " exp nw-perm --n 8 --d 4 --sample 10 2>/dev/null";
        std::array<char, 4096> buf{};
        std::string out;
        FILE* pipe = popen(cmd.c_str(), "r");
        ASSERT_NE(pipe, nullptr);
        size_t got;
        while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
        enved = {WEXITSTATUS(pclose(pipe)), out};
    }
    EXPECT_EQ(enved.exit_code, 0);
    EXPECT_EQ(enved.out, r1.out);
}

TEST(Cli, PipelineTextFormat) {
    const auto r = run("--format text exp pipeline --n 16 --d 16 --delta 2");
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_NE(r.out.find("bounded depth"), std::string::npos);
}
