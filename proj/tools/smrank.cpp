// smrank: exact-arithmetic laboratory for set-multilinear polynomials,
// partial derivative matrix ranks, and the associated verification
// experiments. One binary, verb subcommands; data goes to stdout or --out,
// logs to stderr. Exit codes: 0 success, 1 asserted-property failure,
// 2 usage error.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include "CLI11.hpp"

#include "smrank/experiments.hpp"
#include "smrank/io.hpp"

using namespace smrank;

namespace {

struct GlobalOpts {
    u64 seed = 0;
    unsigned jobs = 0; // 0 = hardware concurrency
    std::string out;
    std::string format = "json"; // json | csv | text
    int verbosity = 0;
};

unsigned effective_jobs(const GlobalOpts& g) {
    if (g.jobs > 0) return g.jobs;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

void emit(const GlobalOpts& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
    } else {
        write_text_file(g.out, text);
    }
}

void emit_json(const GlobalOpts& g, const Json& j) { emit(g, j.dump(2) + "\n"); }

u64 default_seed_from_env() {
    if (const char* env = std::getenv("SMRANK_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw CLI::ValidationError("SMRANK_SEED", "SMRANK_SEED must be an unsigned integer");
        }
    }
    return 0;
}

SetMLPoly load_poly(const std::string& path) { return poly_from_json(read_json_file(path)); }

struct PropertyFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"smrank: set-multilinear rank measure laboratory"};
    app.require_subcommand(1);

    GlobalOpts g;
    try {
        g.seed = default_seed_from_env();
    } catch (const CLI::Error& e) {
        return app.exit(e); // exit 2 family
    }
    app.add_option("--seed", g.seed, "Master seed (fallback: SMRANK_SEED, then 0)");
    app.add_option("--jobs", g.jobs, "Worker threads for experiments (default: available cores)");
    app.add_option("--out", g.out, "Write output to a file instead of stdout");
    app.add_option("--format", g.format, "Output format: json, csv or text")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_flag("-v,--verbose", g.verbosity, "Increase stderr logging");

    // families ---------------------------------------------------------------
    auto* families = app.add_subcommand("families", "Construct the explicit polynomial families");
    families->require_subcommand(1);
    u32 fam_n = 4, fam_d = 4;
    std::string fam_field = "p:65521";
    std::string fam_word;

    auto* fam_nw = families->add_subcommand("nw", "Interpolation design polynomial NW_{n,d}");
    fam_nw->add_option("--n", fam_n, "Variables per set (power of two)")->required();
    fam_nw->add_option("--d", fam_d, "Degree / number of sets")->required();
    fam_nw->add_option("--coeff-field", fam_field, "Coefficient field (gf2 | gf2k:<k> | p:<prime>)");

    auto* fam_imm = families->add_subcommand("imm", "Iterated matrix multiplication polynomial IMM_{n,d}");
    fam_imm->add_option("--n", fam_n, "Matrix dimension")->required();
    fam_imm->add_option("--d", fam_d, "Chain length")->required();
    fam_imm->add_option("--coeff-field", fam_field, "Coefficient field");

    auto* fam_wp = families->add_subcommand("wordpoly", "Prefix-matching word polynomial P_w");
    fam_wp->add_option("--word", fam_word, "Word, e.g. +3,+3,-3,-3")->required();
    fam_wp->add_option("--coeff-field", fam_field, "Coefficient field");

    // measure ----------------------------------------------------------------
    auto* measure = app.add_subcommand("measure", "Partial derivative matrix measure");
    measure->require_subcommand(1);
    std::string meas_poly_path, meas_word, meas_field, meas_matrix_out, meas_trunc = "keep-lowest";
    auto* meas_rel = measure->add_subcommand("relrank", "Relative rank of a polynomial for a word");
    meas_rel->add_option("--poly", meas_poly_path, "Polynomial JSON file")->required();
    meas_rel->add_option("--word", meas_word, "Word, e.g. +3,+3,+3,-3,-3,-3")->required();
    meas_rel->add_option("--field", meas_field, "Rank field override (gf2 | gf2k:<k> | p:<prime>)");
    meas_rel->add_option("--export-matrix", meas_matrix_out, "Also write the matrix in Matrix Market format");
    meas_rel->add_option("--trunc", meas_trunc, "Truncation policy: which variables each set keeps")
        ->check(CLI::IsMember({"keep-lowest", "keep-highest"}));

    // formula ----------------------------------------------------------------
    auto* formula = app.add_subcommand("formula", "Formula IR operations");
    formula->require_subcommand(1);
    std::string form_in, form_word;
    u32 form_n = 2, form_d = 4, form_depth = 2;
    bool decomp_check = false;

    auto* form_expand = formula->add_subcommand("expand", "Expand a formula file to a polynomial");
    form_expand->add_option("--in", form_in, "Formula JSON file")->required();

    auto* form_decomp = formula->add_subcommand("decompose", "Product decomposition of a formula file");
    form_decomp->add_option("--in", form_in, "Formula JSON file")->required();
    form_decomp->add_flag("--check", decomp_check, "Verify the decomposition contract (exit 1 on violation)");

    auto* form_imm = formula->add_subcommand("imm", "Divide-and-conquer formula for IMM");
    form_imm->add_option("--n", form_n, "Matrix dimension")->required();
    form_imm->add_option("--d", form_d, "Chain length")->required();
    form_imm->add_option("--depth", form_depth, "Product-depth budget")->required();
    form_imm->add_option("--coeff-field", fam_field, "Coefficient field");

    auto* form_wp = formula->add_subcommand("wordpoly", "Depth-3 formula for a balanced symmetric word polynomial");
    form_wp->add_option("--word", form_word, "Word, e.g. +2,-2")->required();
    form_wp->add_option("--coeff-field", fam_field, "Coefficient field");

    // exp --------------------------------------------------------------------
    auto* exp = app.add_subcommand("exp", "Verification experiments");
    exp->require_subcommand(1);
    u32 exp_n = 8, exp_d = 6, exp_delta = 1, exp_max = 40;
    bool exp_all = false, exp_exhaustive = false;
    u64 exp_samples = 0, exp_mc = 0;
    std::string exp_blocks, exp_threshold = "1", exp_config;

    auto* exp_perm = exp->add_subcommand("nw-perm", "Verify the permutation-matrix property of NW");
    exp_perm->add_option("--n", exp_n, "Variables per set (power of two)")->required();
    exp_perm->add_option("--d", exp_d, "Degree (even)")->required();
    exp_perm->add_flag("--all", exp_all, "All balanced words (default: sample)");
    exp_perm->add_option("--sample", exp_samples, "Number of sampled balanced words");
    exp_perm->add_option("--coeff-field", fam_field, "Coefficient field");

    auto* exp_survey = exp->add_subcommand("rank-survey", "Distribution of log2 relrank over words");
    exp_survey->add_option("--config", exp_config, "Survey config JSON file")->required();

    std::string exp_club;
    auto* exp_part = exp->add_subcommand("partition", "Partition probability Pr[sum |w_S| < threshold]");
    exp_part->add_option("--blocks", exp_blocks, "Block sizes, e.g. 2,2,8 (positions assigned in order)")->required();
    exp_part->add_option("--threshold", exp_threshold, "Threshold (integer or rational a/b)");
    exp_part->add_flag("--exhaustive", exp_exhaustive, "Exhaustive enumeration over all 2^d words");
    exp_part->add_option("--mc", exp_mc, "Monte-Carlo sample count");
    exp_part->add_option("--delta", exp_delta, "Product-depth for the reported bound");
    exp_part->add_option("--club", exp_club,
                         "Also club the partition with this threshold T and report the clubbed probability");

    auto* exp_stirling = exp->add_subcommand("stirling", "Exact central-binomial check of the Stirling bound");
    exp_stirling->add_option("--max", exp_max, "Largest even block size (<= 40)");

    auto* exp_pipe = exp->add_subcommand("pipeline", "Numeric trace of the lower-bound contradiction chain");
    exp_pipe->add_option("--n", exp_n, "n (power of two)")->required();
    exp_pipe->add_option("--d", exp_d, "degree")->required();
    exp_pipe->add_option("--delta", exp_delta, "product-depth");

    // Global flags are accepted after the subcommand as well.
    for (CLI::App* s : {families, fam_nw, fam_imm, fam_wp, measure, meas_rel, formula, form_expand, form_decomp,
                        form_imm, form_wp, exp, exp_perm, exp_survey, exp_part, exp_stirling, exp_pipe})
        s->fallthrough();

    // Experiment verbs are accepted at the top level as a convenience:
    // `smrank nw-perm ...` behaves like `smrank exp nw-perm ...`.
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    {
        static const std::set<std::string> exp_verbs = {"nw-perm", "rank-survey", "partition", "stirling",
                                                        "pipeline"};
        if (!args.empty() && exp_verbs.count(args.front())) args.insert(args.begin(), "exp");
    }

    try {
        std::reverse(args.begin(), args.end()); // CLI11 parses back to front
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e); // prints help or the offending flag
        return code == 0 ? 0 : 2;
    }

    const auto t0 = std::chrono::steady_clock::now();
    try {
        const FieldPtr coeff_field = parse_field(fam_field);
        const unsigned jobs = effective_jobs(g);

        if (fam_nw->parsed()) {
            emit_json(g, poly_to_json(nw(fam_n, fam_d, coeff_field)));
        } else if (fam_imm->parsed()) {
            emit_json(g, poly_to_json(imm(fam_n, fam_d, coeff_field)));
        } else if (fam_wp->parsed()) {
            emit_json(g, poly_to_json(word_poly(parse_word(fam_word), coeff_field)));
        } else if (meas_rel->parsed()) {
            const SetMLPoly f = load_poly(meas_poly_path);
            if (f.support_mask() != f.profile()->full_mask())
                throw CLI::ValidationError("--poly", "relrank requires a polynomial with full support [d]");
            const Word w = parse_word(meas_word);
            if (!w.fits_profile(*f.profile()))
                throw CLI::ValidationError("--word", "word does not fit the polynomial's profile");
            const FieldPtr rank_field = meas_field.empty() ? nullptr : parse_field(meas_field);
            const TruncationPolicy policy =
                meas_trunc == "keep-highest" ? TruncationPolicy::KeepHighest : TruncationPolicy::KeepLowest;
            if (!meas_matrix_out.empty())
                write_text_file(meas_matrix_out, pdmatrix_to_matrix_market(pd_matrix(f, w, policy)));
            const LogRank lr = relative_rank(f, w, rank_field, policy);
            Json j;
            j["word"] = w.str();
            j["rows"] = lr.nrows;
            j["cols"] = lr.ncols;
            j["rank"] = lr.rank;
            j["log2_relrank"] = lr.log2_relrank();
            if (lr.has_exact_log()) j["twice_log2_relrank"] = lr.twice_log2_relrank();
            j["rank_field"] = field_to_json(rank_field ? *rank_field : *f.field());
            emit_json(g, j);
        } else if (form_expand->parsed()) {
            emit_json(g, poly_to_json(expand(formula_from_json(read_json_file(form_in)))));
        } else if (form_decomp->parsed()) {
            const Formula f = formula_from_json(read_json_file(form_in));
            const auto terms = product_decompose(f);
            Json j;
            j["terms"] = Json::array();
            for (const auto& t : terms) {
                Json factors = Json::array();
                for (const auto& fac : t.factors)
                    factors.push_back(Json{{"degree", fac.degree()}, {"root", formula_to_json(fac)["root"]}});
                j["terms"].push_back(factors);
            }
            j["term_count"] = terms.size();
            j["leaf_count"] = f.leaf_count();
            if (decomp_check) {
                const ProductLemmaCheck chk = check_product_lemma(f, terms);
                j["check"] = Json{{"equality", chk.equality},
                                  {"term_bound", chk.term_bound},
                                  {"degree_windows", chk.windows_ok},
                                  {"chain_length", chk.chain_length_ok},
                                  {"last_degree_one", chk.last_degree_ok}};
                emit_json(g, j);
                if (!chk.all_ok()) throw PropertyFailure("product decomposition contract violated");
            } else {
                emit_json(g, j);
            }
        } else if (form_imm->parsed()) {
            const Formula f = build_imm_formula(form_n, form_d, form_depth, coeff_field);
            Json j = formula_to_json(f);
            j["attributes"] = Json{{"product_depth", f.product_depth()},
                                   {"node_count", f.node_count()},
                                   {"leaf_count", f.leaf_count()},
                                   {"predicted_node_count", imm_formula_node_count(form_n, form_d, form_depth)}};
            emit_json(g, j);
        } else if (form_wp->parsed()) {
            emit_json(g, formula_to_json(build_word_poly_formula(parse_word(form_word), coeff_field)));
        } else if (exp_perm->parsed()) {
            if (exp_d % 2 != 0) throw CLI::ValidationError("--d", "d must be even");
            if (!is_pow2(exp_n)) throw CLI::ValidationError("--n", "n must be a power of two");
            if (exp_d > exp_n) throw CLI::ValidationError("--d", "d must be at most n");
            std::optional<u64> sample;
            if (!exp_all) sample = exp_samples > 0 ? exp_samples : 20;
            const NwPermReport rep = verify_nw_permutation(exp_n, exp_d, coeff_field, sample, g.seed, jobs);
            if (g.format == "csv") emit(g, rep.to_csv());
            else emit_json(g, rep.to_json());
            if (!rep.all_pass()) throw PropertyFailure("NW permutation property failed");
        } else if (exp_survey->parsed()) {
            const Json cfgj = read_json_file(exp_config);
            std::optional<u64> auto_nodes, auto_leaves;
            std::optional<u32> auto_delta;
            SetMLPoly target = [&]() -> SetMLPoly {
                const Json& t = cfgj.at("target");
                const std::string kind = t.at("kind").get<std::string>();
                if (kind == "poly-file") return load_poly(t.at("path").get<std::string>());
                if (kind == "formula-file") {
                    const Formula f = formula_from_json(read_json_file(t.at("path").get<std::string>()));
                    auto_nodes = f.node_count();
                    auto_leaves = f.leaf_count();
                    auto_delta = f.product_depth();
                    return expand(f);
                }
                if (kind == "family") {
                    const std::string fam = t.at("family").get<std::string>();
                    const FieldPtr cf = t.contains("coeff_field") ? parse_field(t.at("coeff_field").get<std::string>())
                                                                  : coeff_field;
                    if (fam == "nw") return nw(t.at("n").get<u32>(), t.at("d").get<u32>(), cf);
                    if (fam == "imm") return imm(t.at("n").get<u32>(), t.at("d").get<u32>(), cf);
                    if (fam == "wordpoly") return word_poly(parse_word(t.at("word").get<std::string>()), cf);
                    throw CLI::ValidationError("--config", "unknown family '" + fam + "'");
                }
                throw CLI::ValidationError("--config", "unknown target kind '" + kind + "'");
            }();
            SurveyConfig sc;
            const std::string mode = cfgj.value("word_mode", std::string("uniform"));
            if (mode == "uniform") sc.mode = SurveyWordMode::Uniform;
            else if (mode == "balanced") sc.mode = SurveyWordMode::Balanced;
            else if (mode == "exhaustive") sc.mode = SurveyWordMode::Exhaustive;
            else throw CLI::ValidationError("--config", "unknown word_mode '" + mode + "'");
            sc.samples = cfgj.value("samples", u64(100));
            sc.seed = cfgj.value("seed", g.seed);
            // formula targets supply their own size and depth unless overridden
            sc.s_nodes = auto_nodes;
            sc.s_leaves = auto_leaves;
            sc.delta = auto_delta;
            if (cfgj.contains("s_nodes")) sc.s_nodes = cfgj.at("s_nodes").get<u64>();
            if (cfgj.contains("s_leaves")) sc.s_leaves = cfgj.at("s_leaves").get<u64>();
            if (cfgj.contains("delta")) sc.delta = cfgj.at("delta").get<u32>();
            if (cfgj.contains("rank_field")) sc.rank_field = parse_field(cfgj.at("rank_field").get<std::string>());
            sc.jobs = jobs;
            unsigned k = 0;
            if (cfgj.contains("k")) k = cfgj.at("k").get<unsigned>();
            else {
                // default: untruncated symmetric words need uniform power-of-two set sizes
                const u32 n0 = target.profile()->size(1);
                if (!is_pow2(n0))
                    throw CLI::ValidationError("--config", "set sizes are not powers of two; specify k explicitly");
                k = static_cast<unsigned>(log2_exact(n0));
            }
            const SurveyReport rep = rank_survey(target, k, sc);
            if (g.format == "csv") emit(g, rep.to_csv());
            else emit_json(g, rep.to_json());
        } else if (exp_part->parsed()) {
            std::vector<u32> sizes;
            {
                std::stringstream ss(exp_blocks);
                std::string tok;
                while (std::getline(ss, tok, ',')) sizes.push_back(static_cast<u32>(std::stoul(tok)));
            }
            u32 d = 0;
            std::vector<std::vector<u32>> blocks;
            for (u32 s : sizes) {
                std::vector<u32> b;
                for (u32 i = 0; i < s; ++i) b.push_back(++d);
                blocks.push_back(std::move(b));
            }
            const DegreePartition P(d, blocks);
            Rational threshold(0);
            if (const auto slash = exp_threshold.find('/'); slash != std::string::npos)
                threshold = Rational(std::stoll(exp_threshold.substr(0, slash)),
                                     std::stoll(exp_threshold.substr(slash + 1)));
            else threshold = Rational(std::stoll(exp_threshold));
            if (!exp_exhaustive && exp_mc == 0)
                throw CLI::ValidationError("--exhaustive/--mc", "choose exhaustive mode or a Monte-Carlo sample count");
            const auto mode = exp_exhaustive ? PartitionProbMode::Exhaustive()
                                             : PartitionProbMode::MonteCarlo(exp_mc, g.seed);
            auto res = partition_probability(P, threshold, mode,
                                             exp_part->count("--delta") ? std::optional<u32>(exp_delta) : std::nullopt);
            Json j = res.to_json();
            if (!exp_club.empty()) {
                // reported alongside, never asserted: per-word sum monotonicity
                // under clubbing implies the probability can only grow
                Rational T(0);
                if (const auto slash = exp_club.find('/'); slash != std::string::npos)
                    T = Rational(std::stoll(exp_club.substr(0, slash)), std::stoll(exp_club.substr(slash + 1)));
                else T = Rational(std::stoll(exp_club));
                const DegreePartition clubbed = club_partition(P, T);
                Json cb = partition_probability(clubbed, threshold, mode).to_json();
                Json cb_sizes = Json::array();
                for (const auto& b : clubbed.blocks) cb_sizes.push_back(b.size());
                cb["block_sizes"] = cb_sizes;
                j["clubbed"] = cb;
            }
            j["provenance"] = provenance_json(
                g.seed, Json{{"op", "partition"}, {"blocks", sizes}, {"threshold", threshold.str()}});
            emit_json(g, j);
        } else if (exp_stirling->parsed()) {
            const StirlingReport rep = stirling_bound_check(exp_max);
            emit_json(g, rep.to_json());
            if (!rep.all_ok()) throw PropertyFailure("Stirling bound violated");
        } else if (exp_pipe->parsed()) {
            const PipelineReport rep = theorem_pipeline(exp_n, exp_d, exp_delta);
            if (g.format == "json") emit_json(g, rep.to_json());
            else emit(g, rep.text());
        } else {
            std::cerr << "error: no subcommand selected\n";
            return 2;
        }
    } catch (const PropertyFailure& e) {
        std::cerr << "property failure: " << e.what() << "\n";
        return 1;
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    if (g.verbosity > 0) {
        const auto ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
        std::cerr << "done in " << ms << " ms\n";
    }
    return 0;
}
