#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "smrank/decompose.hpp"
#include "smrank/families.hpp"
#include "smrank/formula.hpp"
#include "smrank/measure.hpp"
#include "smrank/smpoly.hpp"
#include "smrank/word.hpp"

namespace smrank {

// All file formats are JSON with insertion-ordered keys and carry
// format_version 1. Coefficients serialize as canonical integers (prime
// fields) or bit-vector integers (binary fields).

using Json = nlohmann::ordered_json;
inline constexpr int kFormatVersion = 1;

// ----------------------------- fields -------------------------------------

inline Json field_to_json(const Field& f) {
    Json j;
    if (f.kind() == FieldKind::Prime) {
        j["kind"] = "prime";
        j["p"] = f.order();
    } else {
        j["kind"] = "gf2k";
        j["k"] = f.ext_degree();
        j["modulus"] = f.modulus();
    }
    j["order"] = f.order();
    return j;
}

inline FieldPtr field_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "prime") return Field::prime(j.at("p").get<u64>());
    if (kind == "gf2k") {
        const unsigned k = j.at("k").get<unsigned>();
        if (j.contains("modulus")) return Field::gf2k(k, j.at("modulus").get<u64>());
        return Field::gf2k(k);
    }
    throw std::invalid_argument("field_from_json: unknown kind '" + kind + "'");
}

// Parses CLI field syntax: "gf2", "gf2k:3", "p:65521".
inline FieldPtr parse_field(const std::string& s) {
    if (s == "gf2") return Field::gf2();
    const auto colon = s.find(':');
    if (colon != std::string::npos) {
        const std::string head = s.substr(0, colon), tail = s.substr(colon + 1);
        if (head == "p" || head == "prime") return Field::prime(std::stoull(tail));
        if (head == "gf2k") return Field::gf2k(static_cast<unsigned>(std::stoul(tail)));
    }
    throw std::invalid_argument("parse_field: expected 'gf2', 'gf2k:<k>' or 'p:<prime>', got '" + s + "'");
}

// ----------------------------- words --------------------------------------

// Parses "+3,+3,-3,-3": each entry is a signed |w_i|, i.e. size 2^{|w_i|}.
inline Word parse_word(const std::string& s) {
    std::vector<Word::Entry> entries;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) throw std::invalid_argument("parse_word: empty entry");
        int sign = 1;
        size_t at = 0;
        if (tok[0] == '+') at = 1;
        else if (tok[0] == '-') {
            sign = -1;
            at = 1;
        }
        const unsigned k = static_cast<unsigned>(std::stoul(tok.substr(at)));
        if (k > 30) throw std::invalid_argument("parse_word: |w_i| too large");
        entries.push_back({sign, u32(1) << k});
    }
    return Word(std::move(entries));
}

inline Json word_to_json(const Word& w) {
    Json entries = Json::array();
    for (u32 i = 1; i <= w.d(); ++i) entries.push_back(Json{{"sign", w.sign(i)}, {"size", w.size(i)}});
    return entries;
}

inline Word word_from_json(const Json& j) {
    std::vector<Word::Entry> entries;
    for (const auto& e : j) entries.push_back({e.at("sign").get<int>(), e.at("size").get<u32>()});
    return Word(std::move(entries));
}

// --------------------------- polynomials ----------------------------------

inline Json poly_to_json(const SetMLPoly& f) {
    Json j;
    j["format_version"] = kFormatVersion;
    j["profile"] = Json{{"d", f.profile()->d()}, {"sizes", f.profile()->sizes()}};
    j["field"] = field_to_json(*f.field());
    Json support = Json::array();
    for (u32 s = 1; s <= f.profile()->d(); ++s)
        if (f.support_mask() >> (s - 1) & 1) support.push_back(s);
    j["support"] = support;
    Json terms = Json::array();
    for (const auto& [m, c] : f.terms()) {
        Json vars = Json::array();
        for (u32 s = 1; s <= f.profile()->d(); ++s)
            if (m.var(s) != 0) vars.push_back(Json::array({s, m.var(s)}));
        terms.push_back(Json{{"vars", vars}, {"coeff", c}});
    }
    j["terms"] = terms;
    return j;
}

inline SetMLPoly poly_from_json(const Json& j) {
    if (j.at("format_version").get<int>() != kFormatVersion)
        throw std::invalid_argument("poly_from_json: unsupported format_version");
    const auto sizes = j.at("profile").at("sizes").get<std::vector<u32>>();
    ProfilePtr profile = make_profile(sizes);
    if (j.at("profile").at("d").get<u32>() != profile->d())
        throw std::invalid_argument("poly_from_json: profile d/sizes mismatch");
    FieldPtr field = field_from_json(j.at("field"));
    u64 support = 0;
    for (const auto& s : j.at("support")) support |= u64(1) << (s.get<u32>() - 1);
    SetMLPoly f(profile, field, support);
    for (const auto& t : j.at("terms")) {
        SetMLMonomial m(profile->d());
        for (const auto& v : t.at("vars")) m.set_var(v.at(0).get<u32>(), v.at(1).get<u16>());
        f.add_term(m, t.at("coeff").get<u64>());
    }
    f.validate();
    return f;
}

// ----------------------------- formulas -----------------------------------

namespace detail {

inline Json node_to_json(const FormulaNode& n) {
    switch (n.kind) {
    case NodeKind::Var: return Json{{"kind", "var"}, {"set", n.set}, {"index", n.var}};
    case NodeKind::Const: return Json{{"kind", "const"}, {"value", n.cval}};
    case NodeKind::Sum:
    case NodeKind::Product: {
        Json kids = Json::array();
        for (const auto& c : n.children) kids.push_back(node_to_json(*c));
        return Json{{"kind", n.kind == NodeKind::Sum ? "sum" : "product"}, {"children", kids}};
    }
    }
    throw std::logic_error("node_to_json: unreachable");
}

inline NodePtr node_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "var") return f_var(j.at("set").get<u32>(), j.at("index").get<u16>());
    if (kind == "const") return f_const(j.at("value").get<u64>());
    std::vector<NodePtr> kids;
    for (const auto& c : j.at("children")) kids.push_back(node_from_json(c));
    if (kind == "sum") return f_sum(std::move(kids));
    if (kind == "product") return f_product(std::move(kids));
    throw std::invalid_argument("node_from_json: unknown kind '" + kind + "'");
}

} // namespace detail

inline Json formula_to_json(const Formula& f) {
    Json j;
    j["format_version"] = kFormatVersion;
    j["profile"] = Json{{"d", f.profile()->d()}, {"sizes", f.profile()->sizes()}};
    j["field"] = field_to_json(*f.field());
    j["root"] = detail::node_to_json(*f.root());
    return j;
}

inline Formula formula_from_json(const Json& j) {
    if (j.at("format_version").get<int>() != kFormatVersion)
        throw std::invalid_argument("formula_from_json: unsupported format_version");
    ProfilePtr profile = make_profile(j.at("profile").at("sizes").get<std::vector<u32>>());
    FieldPtr field = field_from_json(j.at("field"));
    return Formula(profile, field, detail::node_from_json(j.at("root")));
}

// ------------------------------ files -------------------------------------

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

inline Json read_json_file(const std::string& path) { return Json::parse(read_text_file(path)); }

// Matrix Market coordinate text export (1-based indices) for external
// cross-checks of the partial derivative matrices.
inline std::string pdmatrix_to_matrix_market(const PDMatrix& M) {
    std::ostringstream os;
    os << "%%MatrixMarket matrix coordinate integer general\n";
    os << "% partial derivative matrix, entries are canonical field values over " << M.field()->describe() << "\n";
    os << M.rows() << " " << M.cols() << " " << M.nnz() << "\n";
    for (const auto& e : M.entries()) os << (e.row + 1) << " " << (e.col + 1) << " " << e.value << "\n";
    return os.str();
}

} // namespace smrank
