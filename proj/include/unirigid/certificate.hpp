/**
 * @file certificate.hpp
 * @brief Strict certificate verification, the conic at infinity, universal
 *        rigidity decisions and projective transforms of certificates.
 */
#pragma once

#include "unirigid/framework.hpp"
#include "unirigid/numerics.hpp"
#include "unirigid/reduction.hpp"
#include "unirigid/stress.hpp"

#include <optional>
#include <string>
#include <vector>

namespace unirigid {

/// Nonzero symmetric d x d matrix A with v^t A v = 0 on every tested direction.
struct ConicForm {
    Matrix a;
};

enum class TriState { Yes, No, Inconclusive };

inline const char* to_string(TriState t) {
    switch (t) {
    case TriState::Yes: return "yes";
    case TriState::No: return "no";
    case TriState::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct LevelReport {
    int level = 0; ///< 1-based
    PsdClass psd;
    int rank = 0;
    double residual = 0.0;
    bool proper = true;
    bool completion = false;
    Matrix omega_star;
};

struct Verdict {
    TriState dimensionally_rigid = TriState::Inconclusive;
    TriState universally_rigid = TriState::Inconclusive;
    int n = 0;
    int d = 0;
    int final_affine_dim = 0;
    int rank_sum = 0;
    int expected_rank_sum = 0; ///< n - d - 1
    std::vector<LevelReport> levels;
    std::optional<ConicForm> conic;
    std::optional<std::string> failure; ///< why a supplied certificate was rejected
    std::vector<int> unstressed_members; ///< cables/struts with zero stress at every level
    std::vector<int> conic_members;      ///< members whose directions entered the conic test
    std::vector<int> skipped_members;    ///< zero-length members left out of the conic test

    [[nodiscard]] std::vector<int> ranks() const {
        std::vector<int> r;
        for (const LevelReport& l : levels) {
            if (!l.completion) r.push_back(l.rank);
        }
        return r;
    }
};

/**
 * Replays the reduction with the supplied stresses. Every level must be in
 * restricted equilibrium and have a nonzero PSD restricted stress matrix (no
 * automatic negation); tensegrity stresses must be proper. Once d_k = d,
 * further levels are accepted as completion levels (their restricted matrix
 * is necessarily zero). Accepts iff the ranks sum to n - d - 1.
 */
inline Verdict verify_certificate(const Framework& fw, const Certificate& cert, const TolerancePolicy& tol = {}) {
    tol.validate();
    const ReductionState start = initial_state(fw, tol);
    Verdict v;
    v.n = fw.n();
    v.d = start.d();
    v.expected_rank_sum = v.n - v.d - 1;
    Matrix b = start.basis.matrix();
    const bool tensegrity = fw.graph.is_tensegrity();

    auto reject = [&](std::string why) {
        v.failure = std::move(why);
        v.dimensionally_rigid = TriState::No;
        v.final_affine_dim = static_cast<int>(b.rows()) - 1;
        return v;
    };

    for (std::size_t idx = 0; idx < cert.levels.size(); ++idx) {
        const StressVector& w = cert.levels[idx];
        check_stress_size(fw.graph, w);
        const int lvl = static_cast<int>(idx) + 1;
        const std::string at = " at level " + std::to_string(lvl);
        LevelReport rep;
        rep.level = lvl;
        const StressMatrix om = stress_matrix_from_vector(fw.graph, w);
        rep.omega_star = restricted_stress_matrix(b, om.matrix());
        rep.psd = psd_classify(rep.omega_star, tol);
        rep.residual = restricted_equilibrium_residual(fw, b, w);
        rep.proper = is_proper(w, fw.graph, tol);
        const bool done = b.rows() == v.d + 1;
        rep.completion = done;
        v.levels.push_back(rep);

        if (rep.residual > 10.0 * tol.rank_rel_tol) return reject("restricted equilibrium violated" + at);
        if (tensegrity && !rep.proper) return reject("improper stress" + at);
        if (done) {
            // Affine set already minimal: only completion stresses are possible here.
            continue;
        }
        switch (rep.psd.kind) {
        case PsdKind::Zero: return reject("zero restricted stress matrix" + at);
        case PsdKind::NSD: return reject("NSD" + at);
        case PsdKind::Indefinite: return reject("indefinite" + at);
        case PsdKind::PSD: break;
        }
        v.levels.back().rank = rep.psd.rank;
        v.rank_sum += rep.psd.rank;
        const Matrix k = symmetric_kernel(rep.omega_star, tol);
        b = canonicalize_basis(k.transpose() * b, tol).matrix();
    }
    v.final_affine_dim = static_cast<int>(b.rows()) - 1;

    if (cert.declared_ranks) {
        const std::vector<int> got = v.ranks();
        const std::vector<int>& want = *cert.declared_ranks;
        for (std::size_t i = 0; i < want.size(); ++i) {
            if (i >= got.size() || got[i] != want[i]) {
                return reject("declared rank mismatch at level " + std::to_string(i + 1));
            }
        }
    }
    if (v.rank_sum != v.expected_rank_sum) {
        return reject("rank sum " + std::to_string(v.rank_sum) + " != n-d-1 = " + std::to_string(v.expected_rank_sum));
    }
    v.dimensionally_rigid = TriState::Yes;

    std::vector<bool> stressed(static_cast<std::size_t>(fw.m()), false);
    for (const StressVector& w : cert.levels) {
        for (int k = 0; k < fw.m(); ++k) {
            if (!is_numerically_zero_entry(w, k, tol)) stressed[static_cast<std::size_t>(k)] = true;
        }
    }
    for (int k = 0; k < fw.m(); ++k) {
        if (fw.graph.member(k).kind != MemberKind::Bar && !stressed[static_cast<std::size_t>(k)]) {
            v.unstressed_members.push_back(k);
        }
    }
    return v;
}

/**
 * Nonzero symmetric A with v^t A v = 0 for all @p directions, if one exists.
 *
 * Unknowns are the d(d+1)/2 upper-triangular entries. Directions are
 * normalized first (only their projective class matters). A kernel vector is
 * accepted only if max |v^t A v| <= rank_rel_tol * ||A||.
 */
inline std::optional<ConicForm> conic_at_infinity(const std::vector<Vector>& directions, const TolerancePolicy& tol = {}) {
    if (directions.empty()) throw InputError("conic_at_infinity: no directions");
    const Eigen::Index d = directions.front().size();
    if (d < 1) throw InputError("conic_at_infinity: directions must have dimension >= 1");
    const Eigen::Index unknowns = d * (d + 1) / 2;
    Matrix sys(static_cast<Eigen::Index>(directions.size()), unknowns);
    std::vector<Vector> unit;
    for (std::size_t r = 0; r < directions.size(); ++r) {
        const Vector& v = directions[r];
        if (v.size() != d) throw InputError("conic_at_infinity: directions differ in dimension");
        const double nv = v.norm();
        if (!(nv > tol.zero_abs_tol)) throw InputError("conic_at_infinity: zero direction");
        const Vector u = v / nv;
        unit.push_back(u);
        Eigen::Index c = 0;
        for (Eigen::Index a = 0; a < d; ++a) {
            for (Eigen::Index b = a; b < d; ++b) sys(static_cast<Eigen::Index>(r), c++) = (a == b ? 1.0 : 2.0) * u[a] * u[b];
        }
    }
    const Matrix ker = homogeneous_solution_space(sys, tol);
    if (ker.cols() == 0) return std::nullopt;

    Matrix a(d, d);
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i; j < d; ++j) {
            a(i, j) = ker(c, 0);
            a(j, i) = ker(c, 0);
            ++c;
        }
    }
    Eigen::Index mr = 0;
    Eigen::Index mc = 0;
    a.cwiseAbs().maxCoeff(&mr, &mc);
    a /= a(mr, mc);
    double worst = 0.0;
    for (const Vector& u : unit) worst = std::max(worst, std::abs(u.dot(a * u)));
    if (worst > tol.rank_rel_tol * a.norm()) return std::nullopt;
    // Snap roundoff-level entries so reports are stable.
    a = a.unaryExpr([&](double x) { return std::abs(x) <= tol.rank_rel_tol ? 0.0 : x; });
    return ConicForm{a};
}

/**
 * Verifies, then runs the conic test. Bar frameworks test every member
 * direction; tensegrities test bars plus cables/struts stressed at some
 * level. Dimensionally rigid with no conic means universally rigid.
 */
inline Verdict decide_universal(const Framework& fw, const Certificate& cert, const TolerancePolicy& tol = {}) {
    Verdict v = verify_certificate(fw, cert, tol);
    if (v.dimensionally_rigid != TriState::Yes) {
        v.universally_rigid = v.failure ? TriState::Inconclusive : TriState::No;
        return v;
    }
    const SpanInfo span = affine_span(fw.config, tol);
    if (span.d == 0) {
        v.universally_rigid = TriState::Yes;
        return v;
    }
    std::vector<int> subset;
    for (int k = 0; k < fw.m(); ++k) {
        const bool unstressed = std::find(v.unstressed_members.begin(), v.unstressed_members.end(), k) !=
                                v.unstressed_members.end();
        if (!unstressed) subset.push_back(k);
    }
    const MemberDirections dirs = member_directions(fw, subset, span, tol);
    v.conic_members = dirs.members;
    v.skipped_members = dirs.skipped;
    v.conic = dirs.directions.empty() ? std::optional<ConicForm>(ConicForm{Matrix::Identity(span.d, span.d)})
                                      : conic_at_infinity(dirs.directions, tol);
    if (!v.conic) {
        v.universally_rigid = TriState::Yes;
        return v;
    }
    if (v.unstressed_members.empty()) {
        v.universally_rigid = TriState::No;
        return v;
    }
    // A conic through every member direction gives an affine flex preserving all lengths.
    const MemberDirections every = member_directions(fw, all_members(fw), span, tol);
    const bool all_on_conic = every.directions.empty() || conic_at_infinity(every.directions, tol).has_value();
    v.universally_rigid = all_on_conic ? TriState::No : TriState::Inconclusive;
    return v;
}

/// Maps a reduction result to a verdict (certificates are re-verified strictly).
inline Verdict verdict_from_reduction(const Framework& fw, const ReductionResult& r, const TolerancePolicy& tol = {}) {
    if (r.outcome == ReductionOutcome::Certificate) return decide_universal(fw, r.certificate(), tol);
    Verdict v;
    v.n = fw.n();
    v.d = r.d;
    v.expected_rank_sum = v.n - v.d - 1;
    v.final_affine_dim = r.final_affine_dim;
    Matrix b = Matrix::Identity(fw.n(), fw.n());
    for (std::size_t i = 0; i < r.levels.size(); ++i) {
        const LevelRecord& l = r.levels[i];
        LevelReport rep;
        rep.level = static_cast<int>(i) + 1;
        rep.psd = l.psd;
        rep.rank = l.rank;
        rep.residual = l.residual;
        rep.proper = is_proper(l.stress, fw.graph, tol);
        rep.completion = l.completion;
        rep.omega_star = restricted_stress_matrix(b, stress_matrix_from_vector(fw.graph, l.stress).matrix());
        v.rank_sum += l.rank;
        v.levels.push_back(rep);
        if (!l.completion) b = canonicalize_basis(symmetric_kernel(rep.omega_star, tol).transpose() * b, tol).matrix();
    }
    if (r.outcome == ReductionOutcome::MaxAffineDim) {
        v.dimensionally_rigid = TriState::No;
        v.universally_rigid = TriState::No;
    } else if (!r.searches.empty() && r.searches.back().status == SearchStatus::Rejected) {
        v.failure = r.searches.back().diagnostic;
        v.dimensionally_rigid = TriState::No;
    }
    return v;
}

/// Thrown when a vertex lies on the hyperplane sent to infinity.
class ExceptionalHyperplaneError : public InputError {
public:
    explicit ExceptionalHyperplaneError(const std::string& what) : InputError(what) {}
};

struct ProjectiveResult {
    Framework framework;
    Certificate certificate;
    Vector weights;                       ///< t_i: homogeneous coordinate of each image point
    std::vector<int> flipped_members;     ///< cables/struts whose segment crosses the exceptional hyperplane
    std::vector<Matrix> restricted_before; ///< B_{i-1} Omega_i B_{i-1}^t
    std::vector<Matrix> restricted_after;  ///< (B_{i-1} D^-1) Omega'_i (B_{i-1} D^-1)^t
};

/**
 * Applies the projective map x -> (H [x;1])_top / (H [x;1])_last to the
 * configuration and carries the certificate along.
 *
 * Stresses are reweighted by t_i t_j (Omega -> D Omega D, D = diag(t)). At
 * levels past the first that product is generally not a stress matrix in
 * restricted equilibrium, so the minimum-norm correction solving
 * P' Omega(w') B'^t = 0 and B' Omega(w') B'^t = B Omega B^t (B' = B D^-1) is
 * added. Restricted stress matrices are therefore preserved exactly.
 */
inline ProjectiveResult projective_transform(const Framework& fw, const Certificate& cert, const Matrix& h,
                                             const TolerancePolicy& tol = {}) {
    const int dim = fw.config.dim();
    if (h.rows() != dim + 1 || h.cols() != dim + 1) {
        throw InputError("projective map must be " + std::to_string(dim + 1) + "x" + std::to_string(dim + 1));
    }
    if (!h.allFinite() || numerical_rank(h, tol) != dim + 1) throw InputError("projective map is singular");

    const int n = fw.n();
    Vector t(n);
    Matrix q(dim, n);
    const double hnorm = h.norm();
    for (int i = 0; i < n; ++i) {
        Vector hp(dim + 1);
        hp.head(dim) = fw.config.point(i);
        hp[dim] = 1.0;
        const Vector img = h * hp;
        t[i] = img[dim];
        if (std::abs(t[i]) <= tol.rank_rel_tol * hnorm * hp.norm()) {
            throw ExceptionalHyperplaneError("vertex " + std::to_string(i + 1) + " lies on the exceptional hyperplane");
        }
        q.col(i) = img.head(dim) / t[i];
    }

    std::vector<Member> members = fw.graph.members();
    std::vector<int> flipped;
    for (int k = 0; k < fw.m(); ++k) {
        Member& e = members[static_cast<std::size_t>(k)];
        if (t[e.i] * t[e.j] < 0.0 && e.kind != MemberKind::Bar) {
            e.kind = e.kind == MemberKind::Cable ? MemberKind::Strut : MemberKind::Cable;
            flipped.push_back(k);
        }
    }
    ProjectiveResult out{Framework(Graph(n, members), Configuration(q)), Certificate{}, t, flipped, {}, {}};
    out.certificate.declared_ranks = cert.declared_ranks;
    const Framework& image = out.framework;

    const Vector tinv = t.cwiseInverse();
    Matrix b = Matrix::Identity(n, n);
    for (std::size_t idx = 0; idx < cert.levels.size(); ++idx) {
        const StressVector& w = cert.levels[idx];
        check_stress_size(fw.graph, w);
        StressVector w0(fw.m());
        for (int k = 0; k < fw.m(); ++k) {
            const Member& e = fw.graph.member(k);
            w0[k] = t[e.i] * t[e.j] * w[k];
        }
        const Matrix rstar = restricted_stress_matrix(b, stress_matrix_from_vector(fw.graph, w).matrix());
        const Matrix bt = b * tinv.asDiagonal();

        const Matrix eq = restricted_equilibrium_map(image, bt);
        const Matrix en = restricted_energy_map(image.graph, bt);
        Matrix sys(eq.rows() + en.rows(), fw.m());
        sys << eq, en;
        Vector target = Vector::Zero(sys.rows());
        target.tail(en.rows()) = Eigen::Map<const Vector>(rstar.data(), rstar.size());
        const Vector rhs = target - sys * w0;
        const Vector delta = sys.completeOrthogonalDecomposition().solve(rhs);
        const double miss = (sys * delta - rhs).norm();
        if (miss > 1e-8 * std::max(1.0, target.norm() + (sys * w0).norm())) {
            throw InputError("projective_transform: level " + std::to_string(idx + 1) +
                             " has no transformed stress with the same restricted matrix");
        }
        const StressVector w1 = w0 + delta;
        out.certificate.levels.push_back(w1);
        out.restricted_before.push_back(rstar);
        out.restricted_after.push_back(restricted_stress_matrix(bt, stress_matrix_from_vector(image.graph, w1).matrix()));

        const PsdClass c = psd_classify(rstar, tol);
        if (c.kind == PsdKind::PSD) {
            b = canonicalize_basis(symmetric_kernel(rstar, tol).transpose() * b, tol).matrix();
        } else if (c.kind != PsdKind::Zero) {
            throw InputError("projective_transform: level " + std::to_string(idx + 1) + " is not PSD");
        }
    }
    return out;
}

} // namespace unirigid
