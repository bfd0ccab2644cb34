// unirigid: command-line front end for dimensional / universal rigidity certificates.
//
//   unirigid analyze FRAMEWORK [--mode random|exact1d|user] [--cert FILE] [--seed N] ...
//   unirigid verify FRAMEWORK CERTIFICATE
//   unirigid conic FRAMEWORK
//   unirigid stress-space FRAMEWORK
//   unirigid transform FRAMEWORK CERTIFICATE --map '[[...],...]' --out-framework F --out-cert C
//
// Exit codes: 0 universally rigid, 10 dimensionally rigid only, 20 refuted,
// 30 inconclusive, 2 bad input, 3 vertex on the exceptional hyperplane.

#include "unirigid.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace unirigid;

struct Common {
    double tol = 0.0; // 0 = library defaults
    std::string json_out;
    bool embed = false;

    [[nodiscard]] TolerancePolicy policy() const { return tol > 0.0 ? TolerancePolicy{}.with_relative(tol) : TolerancePolicy{}; }
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--tol", c.tol, "Relative rank/PSD tolerance (default 1e-9)")->check(CLI::PositiveNumber);
    cmd->add_option("--json-out", c.json_out, "Write the JSON report here ('-' for stdout)");
    cmd->add_flag("--embed-matrices", c.embed, "Embed restricted stress matrices in the report");
}

void emit(const Json& doc, const std::string& path) {
    if (path.empty()) return;
    if (path == "-") {
        std::cout << dump(doc);
    } else {
        write_file(path, dump(doc));
    }
}

std::string join_ranks(const std::vector<int>& r) {
    std::string s = "[";
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + std::to_string(r[i]);
    return s + "]";
}

void print_summary(const Verdict& v, std::ostream& os) {
    os << "n = " << v.n << ", d = " << v.d << ", final affine dim = " << v.final_affine_dim << "\n";
    os << "ranks " << join_ranks(v.ranks()) << " (sum " << v.rank_sum << ", n-d-1 = " << v.expected_rank_sum << ")\n";
    os << "dimensionally rigid: " << to_string(v.dimensionally_rigid) << "\n";
    os << "universally rigid:   " << to_string(v.universally_rigid) << "\n";
    if (v.failure) os << "rejected: " << *v.failure << "\n";
    if (v.conic) {
        Eigen::IOFormat fmt(Eigen::StreamPrecision, Eigen::DontAlignCols, ", ", ", ", "[", "]", "[", "]");
        os << "conic at infinity: " << v.conic->a.format(fmt) << "\n";
    }
    if (!v.unstressed_members.empty()) os << "unstressed cables/struts: " << v.unstressed_members.size() << "\n";
}

std::string default_cert_path(const std::string& json_out) {
    if (json_out.empty() || json_out == "-") return {};
    std::filesystem::path p(json_out);
    return (p.parent_path() / (p.stem().string() + ".cert.json")).string();
}

int cmd_analyze(const std::string& fw_path, const std::string& mode, std::uint64_t seed, int samples, int refine,
                const std::string& cert_path, std::string cert_out, const Common& c) {
    const Framework fw = load_framework(fw_path);
    const TolerancePolicy tol = c.policy();
    SearchMode sm;
    ReportContext ctx{"analyze", tol, mode, std::nullopt, std::nullopt, std::nullopt, c.embed};
    if (mode == "exact1d") {
        sm = Exact1D{};
    } else if (mode == "random") {
        sm = RandomizedMaxRank{seed, samples, refine};
        ctx.seed = seed;
    } else {
        if (cert_path.empty()) throw InputError("--mode user requires --cert");
        sm = UserSupplied{load_certificate(cert_path, fw.graph).levels};
    }
    const ReductionResult r = run_reduction(fw, sm, tol);
    const Verdict v = verdict_from_reduction(fw, r, tol);
    ctx.outcome = to_string(r.outcome);
    ctx.diagnostic = r.diagnostic;
    std::cout << "outcome: " << to_string(r.outcome) << "\n";
    if (r.outcome != ReductionOutcome::Certificate && !r.diagnostic.empty()) std::cout << "note: " << r.diagnostic << "\n";
    print_summary(v, std::cout);
    emit(verdict_to_json(v, ctx), c.json_out);
    if (cert_out.empty()) cert_out = default_cert_path(c.json_out);
    if (!cert_out.empty() && r.outcome == ReductionOutcome::Certificate) {
        write_file(cert_out, dump(certificate_to_json(r.certificate(), fw.graph, tol)));
    }
    return exit_code(v);
}

int cmd_verify(const std::string& fw_path, const std::string& cert_path, const Common& c) {
    const Framework fw = load_framework(fw_path);
    const Certificate cert = load_certificate(cert_path, fw.graph);
    const TolerancePolicy tol = c.policy();
    const Verdict v = decide_universal(fw, cert, tol);
    print_summary(v, std::cout);
    emit(verdict_to_json(v, ReportContext{"verify", tol, std::nullopt, std::nullopt, std::nullopt, std::nullopt, c.embed}),
         c.json_out);
    return exit_code(v);
}

int cmd_conic(const std::string& fw_path, const Common& c) {
    const Framework fw = load_framework(fw_path);
    const TolerancePolicy tol = c.policy();
    const SpanInfo span = affine_span(fw.config, tol);
    Json doc{{"tool", kToolName}, {"version", kToolVersion}, {"command", "conic"}, {"d", span.d}};
    if (span.d == 0) {
        std::cout << "none\n";
        doc["conic"] = nullptr;
        emit(doc, c.json_out);
        return 0;
    }
    const MemberDirections dirs = member_directions(fw, all_members(fw), span, tol);
    const std::optional<ConicForm> conic =
        dirs.directions.empty() ? std::optional<ConicForm>(ConicForm{Matrix::Identity(span.d, span.d)})
                                : conic_at_infinity(dirs.directions, tol);
    if (conic) {
        Eigen::IOFormat fmt(Eigen::StreamPrecision, Eigen::DontAlignCols, ",", ",", "[", "]", "[", "]");
        std::cout << conic->a.format(fmt) << "\n";
        doc["conic"] = matrix_to_json(conic->a);
    } else {
        std::cout << "none\n";
        doc["conic"] = nullptr;
    }
    emit(doc, c.json_out);
    return 0;
}

int cmd_stress_space(const std::string& fw_path, const Common& c) {
    const Framework fw = load_framework(fw_path);
    const TolerancePolicy tol = c.policy();
    const Matrix s = equilibrium_stress_space(fw, tol);
    std::cout << "dimension " << s.cols() << "\n";
    Json basis = Json::array();
    for (Eigen::Index k = 0; k < s.cols(); ++k) {
        const StressVector w = detail::normalized_stress(s.col(k));
        Json entries = Json::array();
        std::cout << "  basis " << k + 1 << ":";
        for (int e = 0; e < fw.m(); ++e) {
            if (is_numerically_zero_entry(w, e, tol)) continue;
            const Member& mem = fw.graph.member(e);
            entries.push_back(Json{{"i", mem.i + 1}, {"j", mem.j + 1}, {"w", w[e]}});
            std::cout << " " << mem.i + 1 << "-" << mem.j + 1 << "=" << w[e];
        }
        std::cout << "\n";
        basis.push_back(Json{{"stress", entries}});
    }
    emit(Json{{"tool", kToolName}, {"version", kToolVersion}, {"command", "stress-space"},
              {"dimension", s.cols()}, {"basis", basis}},
         c.json_out);
    return 0;
}

int cmd_transform(const std::string& fw_path, const std::string& cert_path, const std::string& map_text,
                  const std::string& out_fw, const std::string& out_cert, const Common& c) {
    const Framework fw = load_framework(fw_path);
    const Certificate cert = load_certificate(cert_path, fw.graph);
    const TolerancePolicy tol = c.policy();
    const Matrix h = matrix_from_json(detail::parse_text(map_text, "--map"), "--map");
    const ProjectiveResult r = projective_transform(fw, cert, h, tol);
    std::cout << "flipped members: " << r.flipped_members.size() << "\n";
    if (!out_fw.empty()) write_file(out_fw, dump(framework_to_json(r.framework)));
    if (!out_cert.empty()) write_file(out_cert, dump(certificate_to_json(r.certificate, r.framework.graph, tol)));
    const Verdict v = verify_certificate(r.framework, r.certificate, tol);
    std::cout << "transformed certificate: dimensionally rigid " << to_string(v.dimensionally_rigid) << "\n";
    std::vector<int> flipped;
    for (int k : r.flipped_members) flipped.push_back(k + 1);
    Json doc{{"tool", kToolName}, {"version", kToolVersion}, {"command", "transform"},
             {"flipped_members", flipped}, {"dimensionally_rigid", to_string(v.dimensionally_rigid)}};
    emit(doc, c.json_out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dimensional and universal rigidity of bar and tensegrity frameworks"};
    app.set_version_flag("--version", std::string(unirigid::kToolVersion));
    app.require_subcommand(1);

    Common common;
    std::string fw_path;
    std::string cert_path;

    auto* analyze = app.add_subcommand("analyze", "Search for an iterated PSD stress certificate");
    std::string mode = "random";
    std::uint64_t seed = 1;
    int samples = 2000;
    int refine = 400;
    std::string cert_out;
    analyze->add_option("framework", fw_path, "Framework JSON")->required();
    analyze->add_option("--mode", mode, "Stress search mode")->check(CLI::IsMember({"exact1d", "random", "user"}));
    analyze->add_option("--seed", seed, "Seed for the randomized search");
    analyze->add_option("--samples", samples, "Random samples per level")->check(CLI::PositiveNumber);
    analyze->add_option("--refine", refine, "Alternating-projection iterations (0 disables)")->check(CLI::NonNegativeNumber);
    analyze->add_option("--cert", cert_path, "Certificate supplying the stresses (--mode user)");
    analyze->add_option("--cert-out", cert_out, "Write the found certificate here");
    add_common(analyze, common);

    auto* verify = app.add_subcommand("verify", "Strictly verify a certificate");
    verify->add_option("framework", fw_path, "Framework JSON")->required();
    verify->add_option("certificate", cert_path, "Certificate JSON")->required();
    add_common(verify, common);

    auto* conic = app.add_subcommand("conic", "Conic at infinity through all member directions");
    conic->add_option("framework", fw_path, "Framework JSON")->required();
    add_common(conic, common);

    auto* space = app.add_subcommand("stress-space", "Equilibrium stress space");
    space->add_option("framework", fw_path, "Framework JSON")->required();
    add_common(space, common);

    auto* transform = app.add_subcommand("transform", "Apply a projective map to a framework and its certificate");
    std::string map_text;
    std::string out_fw;
    std::string out_cert;
    transform->add_option("framework", fw_path, "Framework JSON")->required();
    transform->add_option("certificate", cert_path, "Certificate JSON")->required();
    transform->add_option("--map", map_text, "(d+1)x(d+1) homogeneous matrix as JSON rows")->required();
    transform->add_option("--out-framework", out_fw, "Write the transformed framework here");
    transform->add_option("--out-cert", out_cert, "Write the transformed certificate here");
    add_common(transform, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : unirigid::kExitInputError;
    }

    try {
        if (*analyze) return cmd_analyze(fw_path, mode, seed, samples, refine, cert_path, cert_out, common);
        if (*verify) return cmd_verify(fw_path, cert_path, common);
        if (*conic) return cmd_conic(fw_path, common);
        if (*space) return cmd_stress_space(fw_path, common);
        if (*transform) return cmd_transform(fw_path, cert_path, map_text, out_fw, out_cert, common);
    } catch (const unirigid::ExceptionalHyperplaneError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return unirigid::kExitExceptionalHyperplane;
    } catch (const unirigid::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return unirigid::kExitInputError;
    }
    return unirigid::kExitInputError;
}
