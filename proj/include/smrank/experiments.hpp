#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "smrank/decompose.hpp"
#include "smrank/families.hpp"
#include "smrank/io.hpp"
#include "smrank/measure.hpp"
#include "smrank/word.hpp"

namespace smrank {

inline constexpr const char* kToolVersion = "1.0.0";

// Reports are assembled deterministically: per-record slots are preassigned
// by index, so output bytes do not depend on the worker count, and no wall
// clock data enters the report (timings go to stderr at the CLI layer).
inline Json provenance_json(u64 seed, Json config) {
    Json p;
    p["tool"] = "smrank";
    p["version"] = kToolVersion;
    p["seed"] = seed;
    p["config"] = std::move(config);
    return p;
}

// ---------------------------------------------------------------------------
// Permutation-matrix verification for NW.
// ---------------------------------------------------------------------------

struct NwPermRecord {
    Word word;
    u64 rows = 0, cols = 0, rank = 0;
    bool permutation = false;
    bool relrank_one = false; // twice_log2_relrank == 0

    bool pass() const { return permutation && relrank_one; }
};

struct NwPermReport {
    u32 n = 0, d = 0;
    bool exhaustive = true;
    std::vector<NwPermRecord> records;
    u64 seed = 0;

    bool all_pass() const {
        for (const auto& r : records)
            if (!r.pass()) return false;
        return !records.empty();
    }

    Json to_json() const {
        Json recs = Json::array();
        for (const auto& r : records) {
            recs.push_back(Json{{"word", r.word.str()},
                                {"rows", r.rows},
                                {"cols", r.cols},
                                {"rank", r.rank},
                                {"permutation", r.permutation},
                                {"relrank_one", r.relrank_one},
                                {"pass", r.pass()}});
        }
        Json j;
        j["records"] = recs;
        j["aggregates"] = Json{{"words", records.size()},
                               {"passes", std::count_if(records.begin(), records.end(),
                                                        [](const NwPermRecord& r) { return r.pass(); })},
                               {"all_pass", all_pass()}};
        j["bounds"] = Json::object();
        j["provenance"] = provenance_json(
            seed, Json{{"op", "nw-perm"}, {"n", n}, {"d", d}, {"exhaustive", exhaustive}});
        return j;
    }

    std::string to_csv() const {
        std::string s = "word,rows,cols,rank,permutation,relrank_one,pass\n";
        for (const auto& r : records) {
            s += "\"" + r.word.str() + "\"," + std::to_string(r.rows) + "," + std::to_string(r.cols) + "," +
                 std::to_string(r.rank) + "," + std::to_string(r.permutation) + "," +
                 std::to_string(r.relrank_one) + "," + std::to_string(r.pass()) + "\n";
        }
        return s;
    }
};

// Checks that M_w(NW_{n,d}) is a permutation matrix with relative rank one
// for every balanced symmetric word (or a seeded sample of them).
inline NwPermReport verify_nw_permutation(u32 n, u32 d, const FieldPtr& coeff_field,
                                          std::optional<u64> sample_count = std::nullopt, u64 seed = 0,
                                          unsigned jobs = 1) {
    if (d % 2 != 0) throw std::invalid_argument("verify_nw_permutation: d must be even");
    const unsigned k = static_cast<unsigned>(log2_exact(n));
    const SetMLPoly P = nw(n, d, coeff_field);

    std::vector<Word> words;
    if (sample_count) {
        words.reserve(*sample_count);
        for (u64 i = 0; i < *sample_count; ++i) words.push_back(sample_word(d, k, WordMode::Balanced, derive_stream(seed, i)));
    } else {
        words = balanced_words(d, k);
    }

    NwPermReport report;
    report.n = n;
    report.d = d;
    report.exhaustive = !sample_count;
    report.seed = seed;
    report.records.reserve(words.size());
    for (const Word& w : words) report.records.push_back(NwPermRecord{w, 0, 0, 0, false, false});
    parallel_for(words.size(), jobs, [&](u64 i) {
        NwPermRecord& rec = report.records[i];
        const PDMatrix M = pd_matrix(P, words[i]);
        rec.rows = M.rows();
        rec.cols = M.cols();
        rec.permutation = is_permutation_matrix(M);
        const LogRank lr = log_rank_of_matrix(M);
        rec.rank = lr.rank;
        rec.relrank_one = lr.has_exact_log() && lr.twice_log2_relrank() == 0;
    });
    return report;
}

// ---------------------------------------------------------------------------
// Rank survey: distribution of log2 rk_w over sampled or exhausted words,
// with the lemma threshold curves reported alongside. The bounded-depth
// curve uses the node count for s ("size is the number of nodes"); the
// general-depth curve uses the leaf count (its proof routes through the
// product decomposition, which is stated in leaves).
// ---------------------------------------------------------------------------

enum class SurveyWordMode { Uniform, Balanced, Exhaustive };

inline const char* survey_word_mode_name(SurveyWordMode m) {
    switch (m) {
    case SurveyWordMode::Uniform: return "uniform";
    case SurveyWordMode::Balanced: return "balanced";
    case SurveyWordMode::Exhaustive: return "exhaustive";
    }
    return "?";
}

struct SurveyConfig {
    SurveyWordMode mode = SurveyWordMode::Uniform;
    u64 samples = 100;
    u64 seed = 0;
    std::optional<u64> s_nodes;   // formula size, when the target came from a formula
    std::optional<u64> s_leaves;  // formula leaf count
    std::optional<u32> delta;     // product-depth
    FieldPtr rank_field;          // null = the polynomial's own field
    unsigned jobs = 1;
};

struct SurveyRecord {
    Word word;
    u64 rank = 0, rows = 0, cols = 0;
    double log2_relrank = 0;
    std::optional<i64> twice_log2_relrank; // exact when rank is a power of two
    std::optional<bool> exceeds_bounded;
    std::optional<bool> exceeds_general;
};

struct SurveyReport {
    std::vector<SurveyRecord> records;
    Json bounds = Json::object();
    u64 seed = 0;
    SurveyWordMode mode = SurveyWordMode::Uniform;
    u32 d = 0;
    unsigned k = 0;

    Json to_json() const {
        Json recs = Json::array();
        u64 exceed_b = 0, exceed_g = 0;
        double mn = std::numeric_limits<double>::infinity(), mx = -std::numeric_limits<double>::infinity(), sum = 0;
        u64 finite = 0;
        for (const auto& r : records) {
            Json e{{"word", r.word.str()},
                   {"rank", r.rank},
                   {"rows", r.rows},
                   {"cols", r.cols},
                   {"log2_relrank", r.log2_relrank}};
            if (r.twice_log2_relrank) e["twice_log2_relrank"] = *r.twice_log2_relrank;
            if (r.exceeds_bounded) {
                e["exceeds_bounded"] = *r.exceeds_bounded;
                exceed_b += *r.exceeds_bounded;
            }
            if (r.exceeds_general) {
                e["exceeds_general"] = *r.exceeds_general;
                exceed_g += *r.exceeds_general;
            }
            recs.push_back(std::move(e));
            if (std::isfinite(r.log2_relrank)) {
                mn = std::min(mn, r.log2_relrank);
                mx = std::max(mx, r.log2_relrank);
                sum += r.log2_relrank;
                ++finite;
            }
        }
        Json agg;
        agg["words"] = records.size();
        agg["finite_records"] = finite;
        if (finite > 0) {
            agg["min_log2_relrank"] = mn;
            agg["max_log2_relrank"] = mx;
            agg["mean_log2_relrank"] = sum / double(finite);
        }
        if (!bounds.empty()) {
            agg["exceed_bounded_count"] = exceed_b;
            agg["exceed_general_count"] = exceed_g;
        }
        Json j;
        j["records"] = recs;
        j["aggregates"] = agg;
        j["bounds"] = bounds;
        j["provenance"] = provenance_json(
            seed, Json{{"op", "rank-survey"}, {"mode", survey_word_mode_name(mode)}, {"d", d}, {"k", k}});
        return j;
    }

    std::string to_csv() const {
        std::ostringstream os;
        os << "word,rank,rows,cols,log2_relrank,twice_log2_relrank,exceeds_bounded,exceeds_general\n";
        for (const auto& r : records) {
            os << '"' << r.word.str() << "\"," << r.rank << "," << r.rows << "," << r.cols << ",";
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.10g", r.log2_relrank);
            os << buf << ",";
            if (r.twice_log2_relrank) os << *r.twice_log2_relrank;
            os << ",";
            if (r.exceeds_bounded) os << (*r.exceeds_bounded ? 1 : 0);
            os << ",";
            if (r.exceeds_general) os << (*r.exceeds_general ? 1 : 0);
            os << "\n";
        }
        return os.str();
    }
};

inline SurveyReport rank_survey(const SetMLPoly& target, unsigned k, const SurveyConfig& cfg) {
    const u32 d = target.profile()->d();
    std::vector<Word> words;
    if (cfg.mode == SurveyWordMode::Exhaustive) {
        if (d > 24) throw std::invalid_argument("rank_survey: exhaustive mode requires d <= 24");
        const u64 total = u64(1) << d;
        words.reserve(total);
        for (u64 bits = 0; bits < total; ++bits) {
            std::vector<int> signs(d);
            for (u32 i = 0; i < d; ++i) signs[i] = (bits >> i & 1) ? 1 : -1;
            words.push_back(make_symmetric_word(signs, k));
        }
    } else {
        if (cfg.samples < 1) throw std::invalid_argument("rank_survey: sample count must be >= 1");
        const WordMode m = cfg.mode == SurveyWordMode::Uniform ? WordMode::Uniform : WordMode::Balanced;
        words.reserve(cfg.samples);
        for (u64 i = 0; i < cfg.samples; ++i) words.push_back(sample_word(d, k, m, derive_stream(cfg.seed, i)));
    }

    // Threshold curves in log2 space.
    std::optional<double> bounded_curve, general_curve;
    SurveyReport report;
    if (cfg.s_nodes && cfg.delta && *cfg.delta >= 1) {
        const double droot = std::pow(double(d), 1.0 / double(*cfg.delta));
        bounded_curve = std::log2(double(*cfg.s_nodes)) - double(k) * droot / 20.0;
        report.bounds["bounded_depth"] =
            Json{{"size_metric", "nodes"},
                 {"s", *cfg.s_nodes},
                 {"delta", *cfg.delta},
                 {"log2_threshold", *bounded_curve},
                 {"log2_failure_probability",
                  std::log2(double(*cfg.s_nodes)) - droot / (12.0 * double(*cfg.delta)) * std::log2(double(d))}};
    }
    if (cfg.s_leaves) {
        general_curve = std::log2(double(*cfg.s_leaves)) - double(k) * std::log2(double(d)) / 20.0;
        report.bounds["general_depth"] =
            Json{{"size_metric", "leaves"},
                 {"s", *cfg.s_leaves},
                 {"log2_threshold", *general_curve},
                 {"log2_failure_probability",
                  std::log2(double(*cfg.s_leaves)) - std::log2(double(d)) / 60.0 * std::log2(double(d))}};
    }

    report.seed = cfg.seed;
    report.mode = cfg.mode;
    report.d = d;
    report.k = k;
    report.records.reserve(words.size());
    for (const Word& w : words) report.records.push_back(SurveyRecord{w, 0, 0, 0, 0.0, {}, {}, {}});
    parallel_for(words.size(), cfg.jobs, [&](u64 i) {
        SurveyRecord& rec = report.records[i];
        const LogRank lr = relative_rank(target, words[i], cfg.rank_field);
        rec.rank = lr.rank;
        rec.rows = lr.nrows;
        rec.cols = lr.ncols;
        rec.log2_relrank = lr.log2_relrank();
        if (lr.has_exact_log()) rec.twice_log2_relrank = lr.twice_log2_relrank();
        if (bounded_curve) rec.exceeds_bounded = rec.log2_relrank > *bounded_curve;
        if (general_curve) rec.exceeds_general = rec.log2_relrank > *general_curve;
    });
    return report;
}

// ---------------------------------------------------------------------------
// Partition probabilities: Pr_{w ~ {-1,1}^d} [ sum_j |w_{S_j}| < threshold ].
// Exhaustive mode counts exactly; Monte-Carlo mode reports a Wilson interval.
// ---------------------------------------------------------------------------

struct PartitionProbResult {
    bool exhaustive = true;
    u64 favorable = 0; // exhaustive numerator
    u64 total = 0;     // 2^d or sample count
    double p_hat = 0;
    double wilson_low = 0, wilson_high = 0; // MC only (z = 3)
    Json bounds = Json::object();

    Json to_json() const {
        Json j;
        j["exhaustive"] = exhaustive;
        if (exhaustive) {
            j["favorable"] = favorable;
            j["total"] = total;
        } else {
            j["hits"] = favorable;
            j["samples"] = total;
            j["wilson_low"] = wilson_low;
            j["wilson_high"] = wilson_high;
        }
        j["probability"] = p_hat;
        j["bounds"] = bounds;
        return j;
    }
};

namespace detail {

inline std::pair<double, double> wilson_interval(u64 hits, u64 n, double z) {
    const double p = double(hits) / double(n);
    const double z2 = z * z;
    const double denom = 1.0 + z2 / double(n);
    const double center = (p + z2 / (2.0 * double(n))) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / double(n) + z2 / (4.0 * double(n) * double(n))) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

} // namespace detail

struct PartitionProbMode {
    bool exhaustive = true;
    u64 samples = 0;
    u64 seed = 0;

    static PartitionProbMode Exhaustive() { return {true, 0, 0}; }
    static PartitionProbMode MonteCarlo(u64 samples, u64 seed) { return {false, samples, seed}; }
};

inline PartitionProbResult partition_probability(const DegreePartition& P, const Rational& threshold,
                                                 const PartitionProbMode& mode, std::optional<u32> delta = std::nullopt) {
    PartitionProbResult result;
    result.exhaustive = mode.exhaustive;
    const u32 d = P.d;
    const std::vector<u64> masks = partition_block_masks(P);
    if (mode.exhaustive) {
        if (d > 24) throw std::invalid_argument("partition_probability: exhaustive mode requires d <= 24");
        const u64 total = u64(1) << d;
        u64 count = 0;
        for (u64 bits = 0; bits < total; ++bits)
            if (Rational(i64(partition_sign_sum(masks, bits))) < threshold) ++count;
        result.favorable = count;
        result.total = total;
        result.p_hat = double(count) / double(total);
    } else {
        if (mode.samples < 1) throw std::invalid_argument("partition_probability: need >= 1 sample");
        u64 hits = 0;
        for (u64 i = 0; i < mode.samples; ++i) {
            SplitMix64 rng(derive_stream(mode.seed, i));
            u64 bits = 0;
            for (u32 b = 0; b < d; ++b) bits |= u64(rng.coin()) << b;
            if (Rational(i64(partition_sign_sum(masks, bits))) < threshold) ++hits;
        }
        result.favorable = hits;
        result.total = mode.samples;
        result.p_hat = double(hits) / double(mode.samples);
        std::tie(result.wilson_low, result.wilson_high) = detail::wilson_interval(hits, mode.samples, 3.0);
    }

    // Reference failure-probability bounds, reported (never asserted).
    if (delta && *delta >= 1) {
        const double e = std::pow(double(d), 1.0 / double(*delta + 1)) / 12.0;
        result.bounds["log2_bounded_depth_bound"] = -e * std::log2(double(d));
    }
    result.bounds["log2_general_depth_bound"] = -std::log2(double(d)) / 60.0 * std::log2(double(d));
    return result;
}

// ---------------------------------------------------------------------------
// Stirling check: exact central binomial probability vs sqrt(2/(pi s)).
// ---------------------------------------------------------------------------

struct StirlingRow {
    u32 s = 0;
    u64 central_binomial = 0;
    double exact_probability = 0; // C(s, s/2) / 2^s
    double bound = 0;             // sqrt(2 / (pi s))
    bool ok = false;
};

struct StirlingReport {
    std::vector<StirlingRow> rows;
    bool all_ok() const {
        for (const auto& r : rows)
            if (!r.ok) return false;
        return !rows.empty();
    }
    Json to_json() const {
        Json rs = Json::array();
        for (const auto& r : rows)
            rs.push_back(Json{{"s", r.s},
                              {"central_binomial", r.central_binomial},
                              {"exact_probability", r.exact_probability},
                              {"bound", r.bound},
                              {"ok", r.ok}});
        return Json{{"records", rs}, {"aggregates", Json{{"all_ok", all_ok()}}}};
    }
};

inline u64 binomial_u64(u32 n, u32 k) {
    if (k > n) return 0;
    std::vector<u64> row(n + 1, 0);
    row[0] = 1;
    for (u32 i = 1; i <= n; ++i)
        for (u32 j = std::min(i, u32(row.size() - 1)); j > 0; --j) row[j] += row[j - 1];
    return row[k];
}

inline StirlingReport stirling_bound_check(u32 max_even_size) {
    if (max_even_size > 40) throw std::invalid_argument("stirling_bound_check: sizes above 40 overflow the exact count");
    StirlingReport report;
    for (u32 s = 2; s <= max_even_size; s += 2) {
        StirlingRow row;
        row.s = s;
        row.central_binomial = binomial_u64(s, s / 2);
        row.exact_probability = double(row.central_binomial) / std::ldexp(1.0, int(s));
        row.bound = std::sqrt(2.0 / (std::acos(-1.0) * double(s)));
        row.ok = row.exact_probability <= row.bound;
        report.rows.push_back(row);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Numeric trace of the contradiction chain in the size lower-bound proofs:
// evaluated thresholds and the probability-gap direction, as an illustration
// rather than a proof check.
// ---------------------------------------------------------------------------

struct PipelineReport {
    std::vector<std::string> lines;
    Json values = Json::object();

    Json to_json() const { return Json{{"lines", lines}, {"values", values}}; }

    std::string text() const {
        std::string s;
        for (const auto& l : lines) s += l + "\n";
        return s;
    }
};

inline PipelineReport theorem_pipeline(u32 n, u32 d, u32 delta) {
    if (!is_pow2(n)) throw std::invalid_argument("theorem_pipeline: n must be a power of two");
    if (d > n) throw std::invalid_argument("theorem_pipeline: need d <= n");
    if (delta < 1) throw std::invalid_argument("theorem_pipeline: delta must be >= 1");
    const unsigned k = static_cast<unsigned>(log2_exact(n));
    const double log2d = std::log2(double(d));
    const double droot = std::pow(double(d), 1.0 / double(delta));

    PipelineReport r;
    char buf[256];
    auto line = [&](const char* fmt, auto... args) {
        if constexpr (sizeof...(args) == 0) {
            r.lines.emplace_back(fmt);
        } else {
            std::snprintf(buf, sizeof(buf), fmt, args...);
            r.lines.emplace_back(buf);
        }
    };

    line("parameters: n = %u (k = %u), d = %u, delta = %u", n, k, d, delta);
    const bool trivial = double(delta) >= log2d;
    if (trivial)
        line("note: delta >= log2 d, so d^(1/delta) = O(1) and every threshold below is O(1) (trivial regime)");

    // Bounded-depth chain.
    const double s_thresh_log2 = droot / (24.0 * double(delta)) * log2d;
    const double rank_bound_log2 = double(k) * droot / 20.0;
    const double fail_log2 = -droot / (24.0 * double(delta)) * log2d;
    const double balanced_log2 = -0.5 * log2d;
    line("bounded depth: assume size s < d^(d^(1/delta)/(24 delta)), i.e. log2 s < %.6g", s_thresh_log2);
    r.lines.emplace_back(
        "  lemma: rk_w <= s * 2^(-k d^(1/delta)/20) with failure probability <= s * d^(-d^(1/delta)/(12 delta))");
    line("  conditioning: Pr[w_[d] = 0] ~ Theta(1/sqrt(d)), log2 = %.6g vs log2 failure = %.6g (%s)", balanced_log2,
         fail_log2, balanced_log2 > fail_log2 ? "gap holds" : "gap FAILS at these parameters");
    line("  contradiction with rk_w(NW) = 1 forces log2 s >= k d^(1/delta)/20 = %.6g (i.e. s >= n^(d^(1/delta)/20))",
         rank_bound_log2);
    line("  conclusion: log2 s >= %.6g (s >= d^(d^(1/delta)/(24 delta)))", s_thresh_log2);

    // General-depth chain.
    const double s_thresh_gen_log2 = log2d / 120.0 * log2d;
    const double rank_bound_gen_log2 = double(k) * log2d / 20.0;
    const double fail_gen_log2 = -log2d / 120.0 * log2d;
    line("general depth: assume size s < d^(log2 d/120), i.e. log2 s < %.6g", s_thresh_gen_log2);
    r.lines.emplace_back("  lemma: rk_w <= s * 2^(-k log2 d/20) with failure probability <= s * d^(-log2 d/60)");
    line("  conditioning: log2 Pr[w_[d] = 0] = %.6g vs log2 failure = %.6g (%s)", balanced_log2, fail_gen_log2,
         balanced_log2 > fail_gen_log2 ? "gap holds" : "gap FAILS at these parameters");
    line("  contradiction forces log2 s >= k log2 d/20 = %.6g (i.e. s >= n^(log2 d/20))", rank_bound_gen_log2);
    line("  conclusion: log2 s >= %.6g (s >= d^(log2 d/120))", s_thresh_gen_log2);

    if (d % 2 == 0 && d <= 40) {
        const double exact = double(binomial_u64(d, d / 2)) / std::ldexp(1.0, int(d));
        line("exact conditioning probability: C(%u, %u)/2^%u = %.6g", d, d / 2, d, exact);
        r.values["exact_balanced_probability"] = exact;
    }

    r.values["trivial_regime"] = trivial;
    r.values["log2_size_threshold_bounded"] = s_thresh_log2;
    r.values["log2_rank_bound_bounded"] = rank_bound_log2;
    r.values["log2_failure_bounded"] = fail_log2;
    r.values["log2_balanced_probability_asymptotic"] = balanced_log2;
    r.values["log2_size_threshold_general"] = s_thresh_gen_log2;
    r.values["log2_rank_bound_general"] = rank_bound_gen_log2;
    r.values["log2_failure_general"] = fail_gen_log2;
    return r;
}

} // namespace smrank
