/**
 * @file io.hpp
 * @brief JSON file formats: frameworks, certificates and verdict reports.
 *
 * Files use 1-based vertex numbers. Syntax errors carry line/column
 * positions; schema errors carry the JSON path of the offending value.
 */
#pragma once

#include "unirigid/certificate.hpp"
#include "unirigid/framework.hpp"
#include "unirigid/reduction.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace unirigid {

inline constexpr const char* kToolName = "unirigid";
inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

/// Malformed file: JSON syntax (line/column known) or schema violation (path known).
class ParseError : public InputError {
public:
    ParseError(const std::string& what, int line, int column) : InputError(what), line_(line), column_(column) {}
    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] int column() const { return column_; }

private:
    int line_;
    int column_;
};

namespace detail {

inline std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline Json parse_text(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte);
        throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON syntax error", line,
                         col);
    }
}

[[noreturn]] inline void schema_error(const std::string& path, const std::string& what) {
    throw ParseError(path + ": " + what, 0, 0);
}

inline const Json& require(const Json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) schema_error(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) schema_error(path, std::string("missing key \"") + key + "\"");
    return *it;
}

inline int require_int(const Json& v, const std::string& path) {
    if (!v.is_number_integer()) schema_error(path, "expected an integer");
    return v.get<int>();
}

inline double require_number(const Json& v, const std::string& path) {
    if (!v.is_number()) schema_error(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) schema_error(path, "expected a finite number");
    return x;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InputError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace detail

inline Framework framework_from_json(const Json& doc) {
    const int dim = detail::require_int(detail::require(doc, "dim", "$"), "$.dim");
    if (dim < 1) detail::schema_error("$.dim", "must be >= 1");
    const Json& verts = detail::require(doc, "vertices", "$");
    if (!verts.is_array()) detail::schema_error("$.vertices", "expected an array");
    const auto n = static_cast<int>(verts.size());
    Matrix p(dim, n);
    for (int i = 0; i < n; ++i) {
        const std::string path = "$.vertices[" + std::to_string(i) + "]";
        const Json& v = verts[static_cast<std::size_t>(i)];
        if (!v.is_array() || static_cast<int>(v.size()) != dim) {
            detail::schema_error(path, "expected " + std::to_string(dim) + " coordinates");
        }
        for (int c = 0; c < dim; ++c) {
            p(c, i) = detail::require_number(v[static_cast<std::size_t>(c)], path + "[" + std::to_string(c) + "]");
        }
    }
    const Json& mem = detail::require(doc, "members", "$");
    if (!mem.is_array()) detail::schema_error("$.members", "expected an array");
    std::vector<Member> members;
    for (std::size_t k = 0; k < mem.size(); ++k) {
        const std::string path = "$.members[" + std::to_string(k) + "]";
        const int i = detail::require_int(detail::require(mem[k], "i", path), path + ".i");
        const int j = detail::require_int(detail::require(mem[k], "j", path), path + ".j");
        MemberKind kind = MemberKind::Bar;
        if (const auto it = mem[k].find("kind"); it != mem[k].end()) {
            if (!it->is_string()) detail::schema_error(path + ".kind", "expected a string");
            const auto parsed = member_kind_from_string(it->get<std::string>());
            if (!parsed) detail::schema_error(path + ".kind", "expected \"bar\", \"cable\" or \"strut\"");
            kind = *parsed;
        }
        if (i < 1 || i > n || j < 1 || j > n) detail::schema_error(path, "vertex index out of range 1.." + std::to_string(n));
        members.push_back(Member{i - 1, j - 1, kind});
    }
    try {
        return Framework(Graph(n, std::move(members)), Configuration(std::move(p)));
    } catch (const ParseError&) {
        throw;
    } catch (const InputError& e) {
        detail::schema_error("$", e.what());
    }
}

inline Framework parse_framework(const std::string& text, const std::string& source = "<input>") {
    return framework_from_json(detail::parse_text(text, source));
}

inline Framework load_framework(const std::filesystem::path& p) {
    return parse_framework(detail::read_file(p), p.string());
}

inline Json framework_to_json(const Framework& fw) {
    Json doc;
    doc["dim"] = fw.config.dim();
    Json verts = Json::array();
    for (int i = 0; i < fw.n(); ++i) {
        Json pt = Json::array();
        for (int c = 0; c < fw.config.dim(); ++c) pt.push_back(fw.config.matrix()(c, i));
        verts.push_back(pt);
    }
    doc["vertices"] = verts;
    Json mem = Json::array();
    for (const Member& e : fw.graph.members()) {
        mem.push_back(Json{{"i", e.i + 1}, {"j", e.j + 1}, {"kind", to_string(e.kind)}});
    }
    doc["members"] = mem;
    return doc;
}

inline Certificate certificate_from_json(const Json& doc, const Graph& g) {
    Certificate cert;
    const Json& levels = detail::require(doc, "levels", "$");
    if (!levels.is_array()) detail::schema_error("$.levels", "expected an array");
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const std::string path = "$.levels[" + std::to_string(l) + "]";
        const Json& entries = detail::require(levels[l], "stress", path);
        if (!entries.is_array()) detail::schema_error(path + ".stress", "expected an array");
        StressVector w = StressVector::Zero(g.member_count());
        for (std::size_t e = 0; e < entries.size(); ++e) {
            const std::string ep = path + ".stress[" + std::to_string(e) + "]";
            const int i = detail::require_int(detail::require(entries[e], "i", ep), ep + ".i");
            const int j = detail::require_int(detail::require(entries[e], "j", ep), ep + ".j");
            const double val = detail::require_number(detail::require(entries[e], "w", ep), ep + ".w");
            const auto k = g.find_member(i - 1, j - 1);
            if (!k) detail::schema_error(ep, "{" + std::to_string(i) + "," + std::to_string(j) + "} is not a member");
            w[*k] += val;
        }
        cert.levels.push_back(std::move(w));
    }
    if (const auto it = doc.find("declared_ranks"); it != doc.end() && !it->is_null()) {
        if (!it->is_array()) detail::schema_error("$.declared_ranks", "expected an array");
        std::vector<int> ranks;
        for (std::size_t r = 0; r < it->size(); ++r) {
            ranks.push_back(detail::require_int((*it)[r], "$.declared_ranks[" + std::to_string(r) + "]"));
        }
        cert.declared_ranks = std::move(ranks);
    }
    return cert;
}

inline Certificate parse_certificate(const std::string& text, const Graph& g, const std::string& source = "<input>") {
    return certificate_from_json(detail::parse_text(text, source), g);
}

inline Certificate load_certificate(const std::filesystem::path& p, const Graph& g) {
    return parse_certificate(detail::read_file(p), g, p.string());
}

/// Entries that are zero relative to the level's largest entry are omitted.
inline Json certificate_to_json(const Certificate& cert, const Graph& g, const TolerancePolicy& tol = {}) {
    Json doc;
    Json levels = Json::array();
    for (const StressVector& w : cert.levels) {
        Json entries = Json::array();
        for (int k = 0; k < g.member_count(); ++k) {
            if (is_numerically_zero_entry(w, k, tol)) continue;
            const Member& e = g.member(k);
            entries.push_back(Json{{"i", e.i + 1}, {"j", e.j + 1}, {"w", w[k]}});
        }
        levels.push_back(Json{{"stress", entries}});
    }
    doc["levels"] = levels;
    if (cert.declared_ranks) doc["declared_ranks"] = *cert.declared_ranks;
    return doc;
}

inline Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

inline Matrix matrix_from_json(const Json& doc, const std::string& path = "$") {
    if (!doc.is_array() || doc.empty()) detail::schema_error(path, "expected a non-empty array of rows");
    const std::size_t cols = doc[0].is_array() ? doc[0].size() : 0;
    Matrix m(static_cast<Eigen::Index>(doc.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < doc.size(); ++r) {
        const std::string rp = path + "[" + std::to_string(r) + "]";
        if (!doc[r].is_array() || doc[r].size() != cols) detail::schema_error(rp, "rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                detail::require_number(doc[r][c], rp + "[" + std::to_string(c) + "]");
        }
    }
    return m;
}

/// CLI exit codes, one per verdict class.
enum ExitCode : int {
    kExitUniversallyRigid = 0,
    kExitInputError = 2,
    kExitExceptionalHyperplane = 3,
    kExitDimensionallyRigid = 10,
    kExitRefuted = 20,
    kExitInconclusive = 30,
};

inline int exit_code(const Verdict& v) {
    if (v.failure) return kExitRefuted;
    if (v.dimensionally_rigid == TriState::Yes) {
        return v.universally_rigid == TriState::Yes ? kExitUniversallyRigid : kExitDimensionallyRigid;
    }
    if (v.dimensionally_rigid == TriState::No) return kExitRefuted;
    return kExitInconclusive;
}

struct ReportContext {
    std::string command;
    TolerancePolicy tol;
    std::optional<std::string> mode;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> outcome;
    std::optional<std::string> diagnostic;
    bool embed_matrices = false;
};

inline Json verdict_to_json(const Verdict& v, const ReportContext& ctx) {
    Json doc;
    doc["tool"] = kToolName;
    doc["version"] = kToolVersion;
    doc["command"] = ctx.command;
    doc["tolerances"] = Json{{"rank_rel_tol", ctx.tol.rank_rel_tol},
                             {"psd_rel_tol", ctx.tol.psd_rel_tol},
                             {"zero_abs_tol", ctx.tol.zero_abs_tol}};
    if (ctx.mode) doc["mode"] = *ctx.mode;
    if (ctx.seed) doc["seed"] = *ctx.seed;
    if (ctx.outcome) doc["outcome"] = *ctx.outcome;
    doc["n"] = v.n;
    doc["d"] = v.d;
    doc["final_affine_dim"] = v.final_affine_dim;
    doc["dimensionally_rigid"] = to_string(v.dimensionally_rigid);
    doc["universally_rigid"] = to_string(v.universally_rigid);
    doc["ranks"] = v.ranks();
    doc["rank_sum"] = v.rank_sum;
    doc["expected_rank_sum"] = v.expected_rank_sum;
    Json levels = Json::array();
    for (const LevelReport& l : v.levels) {
        Json j{{"level", l.level},
               {"psd", to_string(l.psd.kind)},
               {"rank", l.rank},
               {"min_eig", l.psd.min_eig},
               {"max_eig", l.psd.max_eig},
               {"residual", l.residual},
               {"proper", l.proper},
               {"completion", l.completion}};
        if (ctx.embed_matrices) j["omega_star"] = matrix_to_json(l.omega_star);
        levels.push_back(j);
    }
    doc["levels"] = levels;
    doc["conic"] = v.conic ? matrix_to_json(v.conic->a) : Json(nullptr);
    doc["failure"] = v.failure ? Json(*v.failure) : Json(nullptr);
    if (ctx.diagnostic && !ctx.diagnostic->empty()) doc["diagnostic"] = *ctx.diagnostic;
    auto one_based = [](const std::vector<int>& idx) {
        std::vector<int> out;
        for (int k : idx) out.push_back(k + 1);
        return out;
    };
    doc["unstressed_members"] = one_based(v.unstressed_members);
    doc["skipped_members"] = one_based(v.skipped_members);
    doc["exit_code"] = exit_code(v);
    return doc;
}

/// Stable text form: two-space indentation, trailing newline.
inline std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw InputError("cannot write " + p.string());
    out << text;
}

} // namespace unirigid
