/**
 * @file reduction.hpp
 * @brief Facial reduction over the measurement cone via iterated PSD stresses.
 *
 * The engine keeps a basis matrix B (rows span the coordinate functions of a
 * universal configuration of the current affine set, B_0 = I). Each level
 * looks for a stress w whose restricted stress matrix B Omega(w) B^t is a
 * nonzero PSD matrix and which is in restricted equilibrium, P Omega(w) B^t = 0.
 * The new basis is K^t B where K spans the kernel of the restricted matrix.
 * The loop stops once no such stress exists; the final row count d_k + 1
 * tells whether the framework is dimensionally rigid (d_k = d).
 */
#pragma once

#include "unirigid/framework.hpp"
#include "unirigid/numerics.hpp"
#include "unirigid/stress.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace unirigid {

/// (d+1) x n basis matrix of an affine set; canonical form has the all-ones vector as its last row.
class BasisMatrix {
public:
    explicit BasisMatrix(Matrix rows) : b_(std::move(rows)) {
        if (!b_.allFinite()) throw InputError("basis matrix has non-finite entries");
    }

    static BasisMatrix identity(int n) { return BasisMatrix(Matrix::Identity(n, n)); }

    [[nodiscard]] const Matrix& matrix() const { return b_; }
    [[nodiscard]] int rows() const { return static_cast<int>(b_.rows()); }
    [[nodiscard]] int cols() const { return static_cast<int>(b_.cols()); }
    /// d_i: dimension of the affine span of a universal configuration for this set.
    [[nodiscard]] int affine_dim() const { return rows() - 1; }

private:
    Matrix b_;
};

namespace detail {

/// Reduced row echelon form; pivots below cut are treated as zero. Returns the pivot count.
inline int rref_in_place(Matrix& a, double cut) {
    int row = 0;
    for (Eigen::Index col = 0; col < a.cols() && row < a.rows(); ++col) {
        Eigen::Index piv = 0;
        const double best = a.col(col).tail(a.rows() - row).cwiseAbs().maxCoeff(&piv);
        if (best <= cut) continue;
        piv += row;
        a.row(row).swap(a.row(piv));
        a.row(row) /= a(row, col);
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            if (r != row) a.row(r) -= a(r, col) * a.row(row);
        }
        a.col(col).setZero();
        a(row, col) = 1.0;
        ++row;
    }
    return row;
}

} // namespace detail

/**
 * Canonical representative of the row space of @p b, which must contain the
 * all-ones vector: the reduced row echelon form of the part orthogonal to the
 * all-ones vector, followed by the all-ones row.
 */
inline BasisMatrix canonicalize_basis(const Matrix& b, const TolerancePolicy& tol = {}) {
    const Eigen::Index n = b.cols();
    const Matrix centered = b.colwise() - b.rowwise().mean();
    const Matrix v = row_space_basis(centered, tol); // n x d
    const Eigen::Index d = v.cols();
    Matrix r = v.transpose();
    const int pivots = detail::rref_in_place(r, tol.rank_rel_tol * std::max(1.0, r.cwiseAbs().maxCoeff()));
    if (pivots < d) r = v.transpose(); // degenerate pivoting; keep the orthonormal rows
    Matrix out(d + 1, n);
    out.topRows(d) = r;
    out.row(d).setOnes();
    return BasisMatrix(std::move(out));
}

/// The paper-side certificate: ordered stresses, optionally with the ranks they are claimed to have.
struct Certificate {
    std::vector<StressVector> levels;
    std::optional<std::vector<int>> declared_ranks;
};

struct LevelRecord {
    StressVector stress;
    PsdClass psd;
    int rank = 0;
    double residual = 0.0;   ///< relative restricted-equilibrium residual
    bool completion = false; ///< Omega* = 0 level used only to stress extra tensegrity members
};

struct ReductionState {
    std::shared_ptr<const Framework> framework;
    TolerancePolicy tol;
    SpanInfo span;
    int level = 0;
    BasisMatrix basis = BasisMatrix::identity(2);
    std::vector<LevelRecord> history;

    [[nodiscard]] int d() const { return span.d; }
};

inline ReductionState initial_state(const Framework& fw, const TolerancePolicy& tol = {}) {
    tol.validate();
    ReductionState s;
    s.framework = std::make_shared<const Framework>(fw);
    s.tol = tol;
    s.span = affine_span(fw.config, tol);
    s.level = 0;
    s.basis = BasisMatrix::identity(fw.n());
    return s;
}

/// B Omega B^t, symmetrized. Omega need not have zero row sums (projective D Omega D is allowed).
inline Matrix restricted_stress_matrix(const Matrix& b, const Matrix& omega) {
    if (b.cols() != omega.rows() || omega.rows() != omega.cols()) {
        throw InputError("restricted_stress_matrix: dimension mismatch");
    }
    const Matrix r = b * omega * b.transpose();
    return 0.5 * (r + r.transpose());
}

inline Matrix restricted_stress_matrix(const BasisMatrix& b, const StressMatrix& om) {
    return restricted_stress_matrix(b.matrix(), om.matrix());
}

/// Column k is vec((p_i - p_j)(b_i - b_j)^t): the linear map w -> vec(P Omega(w) B^t).
inline Matrix restricted_equilibrium_map(const Framework& fw, const Matrix& b) {
    if (b.cols() != fw.n()) throw InputError("basis matrix has wrong column count");
    const Eigen::Index dim = fw.config.dim();
    const Eigen::Index r = b.rows();
    Matrix a(dim * r, fw.m());
    for (int k = 0; k < fw.m(); ++k) {
        const Member& e = fw.graph.member(k);
        const Vector dp = fw.member_vector(k);
        const Vector db = b.col(e.i) - b.col(e.j);
        const Matrix block = dp * db.transpose();
        a.col(k) = Eigen::Map<const Vector>(block.data(), block.size());
    }
    return a;
}

/// Column k is vec(delta delta^t) with delta = b_i - b_j: the linear map w -> vec(B Omega(w) B^t).
inline Matrix restricted_energy_map(const Graph& g, const Matrix& b) {
    const Eigen::Index r = b.rows();
    Matrix a(r * r, g.member_count());
    for (int k = 0; k < g.member_count(); ++k) {
        const Member& e = g.member(k);
        const Vector db = b.col(e.i) - b.col(e.j);
        const Matrix block = db * db.transpose();
        a.col(k) = Eigen::Map<const Vector>(block.data(), block.size());
    }
    return a;
}

/// Relative residual ||P Omega B^t|| / (||P|| ||Omega|| ||B||) with P centered.
inline double restricted_equilibrium_residual(const Framework& fw, const Matrix& b, const StressVector& w) {
    const StressMatrix om = stress_matrix_from_vector(fw.graph, w);
    const Matrix p = fw.config.centered();
    const double scale = p.norm() * om.matrix().norm() * b.norm();
    if (scale == 0.0) return 0.0;
    return (p * om.matrix() * b.transpose()).norm() / scale;
}

/// Orthonormal basis (columns) of {w : P Omega(w) B^t = 0}.
inline Matrix restricted_equilibrium_space(const Framework& fw, const BasisMatrix& b, const TolerancePolicy& tol = {}) {
    return kernel_basis(restricted_equilibrium_map(fw, b.matrix()), tol);
}

/// Restricted-equilibrium stresses split by whether their restricted stress matrix vanishes.
struct CandidateSpace {
    Matrix equilibrium; ///< m x s, all restricted-equilibrium stresses
    Matrix candidates;  ///< m x c, complement of the zero-Omega* part
    Matrix zero_energy; ///< m x z, stresses with B Omega B^t = 0
    Matrix energy_map;  ///< r^2 x m, w -> vec(B Omega(w) B^t)

    [[nodiscard]] int dim() const { return static_cast<int>(candidates.cols()); }
};

inline CandidateSpace candidate_space(const Framework& fw, const BasisMatrix& b, const TolerancePolicy& tol = {}) {
    CandidateSpace cs;
    cs.equilibrium = restricted_equilibrium_space(fw, b, tol);
    cs.energy_map = restricted_energy_map(fw.graph, b.matrix());
    const Eigen::Index m = fw.m();
    const Eigen::Index s = cs.equilibrium.cols();
    if (s == 0) {
        cs.candidates = Matrix(m, 0);
        cs.zero_energy = Matrix(m, 0);
        return cs;
    }
    const Matrix g = cs.energy_map * cs.equilibrium;
    Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeFullV);
    const int r = detail::count_above(svd.singularValues(), tol);
    cs.candidates = cs.equilibrium * svd.matrixV().leftCols(r);
    cs.zero_energy = cs.equilibrium * svd.matrixV().rightCols(s - r);
    return cs;
}

/// Exact decision on a one-dimensional candidate space.
struct Exact1D {};

/// Seeded random combinations of candidate stresses, keeping a PSD one of maximal rank;
/// falls back to alternating projections plus a face snap when no sample is PSD.
struct RandomizedMaxRank {
    std::uint64_t seed = 1;
    int samples = 2000;
    int refine_iterations = 400;
};

/// Stresses given level by level (e.g. read from a certificate file).
struct UserSupplied {
    std::vector<StressVector> stresses;
};

using SearchMode = std::variant<Exact1D, RandomizedMaxRank, UserSupplied>;

enum class SearchStatus { Found, ProvablyNone, SearchFailed, Rejected };

inline const char* to_string(SearchStatus s) {
    switch (s) {
    case SearchStatus::Found: return "found";
    case SearchStatus::ProvablyNone: return "provably-none";
    case SearchStatus::SearchFailed: return "search-failed";
    case SearchStatus::Rejected: return "rejected";
    }
    return "?";
}

struct StressSearch {
    SearchStatus status = SearchStatus::SearchFailed;
    std::optional<StressVector> stress;
    PsdClass psd;
    int candidate_dim = 0;
    int zero_energy_dim = 0;
    int samples_psd = 0;
    int samples_nsd = 0;
    int samples_indefinite = 0;
    bool refined = false; ///< found by alternating projections + face snap
    std::string diagnostic;
};

namespace detail {

inline Matrix unvec_square(const Vector& v) {
    const auto r = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    return Eigen::Map<const Matrix>(v.data(), r, r);
}

inline Matrix restricted_of(const CandidateSpace& cs, const StressVector& w) {
    const Matrix x = unvec_square(cs.energy_map * w);
    return 0.5 * (x + x.transpose());
}

/// Normalizes sign and scale so that the largest-magnitude entry is +1.
inline StressVector normalized_stress(const StressVector& w) {
    Eigen::Index k = 0;
    const double mx = w.cwiseAbs().maxCoeff(&k);
    if (mx == 0.0) return w;
    return w / mx;
}

/// Scales to unit max-norm without touching the sign.
inline StressVector unit_scaled(const StressVector& w) {
    const double mx = w.cwiseAbs().maxCoeff();
    return mx == 0.0 ? w : StressVector(w / mx);
}

inline std::uint64_t level_seed(std::uint64_t seed, int level) {
    return seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(level + 1));
}

struct Accepted {
    StressVector w;
    PsdClass psd;
};

/// PSD after optional negation and proper (for tensegrities).
inline std::optional<Accepted> accept_signed(const CandidateSpace& cs, const StressVector& w, const Graph& g,
                                             const TolerancePolicy& tol, bool allow_negation) {
    PsdClass c = psd_classify(restricted_of(cs, w), tol);
    StressVector v = w;
    if (c.kind == PsdKind::NSD && allow_negation) {
        v = -w;
        c = psd_classify(restricted_of(cs, v), tol);
    }
    if (c.kind != PsdKind::PSD) return std::nullopt;
    if (!is_proper(v, g, tol)) return std::nullopt;
    return Accepted{v, c};
}

/**
 * Alternating projections between the PSD cone and the affine slice
 * {sum x_k M_k : trace = 1} of candidate restricted matrices, followed by a
 * face snap: the near-kernel of the approximate PSD point is imposed as an
 * exact linear constraint and the (smaller) remaining space is searched.
 */
inline std::optional<Accepted> refine_by_projections(const CandidateSpace& cs, const Graph& g, const TolerancePolicy& tol,
                                                     int iterations, std::mt19937_64& rng) {
    const Eigen::Index c = cs.candidates.cols();
    const Matrix gc = cs.energy_map * cs.candidates; // r^2 x c
    const auto r = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(gc.rows()))));
    Vector traces(c);
    for (Eigen::Index k = 0; k < c; ++k) traces[k] = unvec_square(gc.col(k)).trace();
    if (traces.norm() < tol.zero_abs_tol * std::max(1.0, gc.norm())) return std::nullopt;

    // KKT system for min ||gc x - y|| subject to traces . x = 1.
    Matrix kkt = Matrix::Zero(c + 1, c + 1);
    kkt.topLeftCorner(c, c) = gc.transpose() * gc;
    kkt.topRightCorner(c, 1) = traces;
    kkt.bottomLeftCorner(1, c) = traces.transpose();
    const Eigen::CompleteOrthogonalDecomposition<Matrix> solver(kkt);
    auto project_affine = [&](const Matrix& y) {
        Vector rhs(c + 1);
        rhs.head(c) = gc.transpose() * Eigen::Map<const Vector>(y.data(), y.size());
        rhs[c] = 1.0;
        return Vector(solver.solve(rhs).head(c));
    };

    Vector x = project_affine(Matrix::Identity(r, r) / static_cast<double>(r));
    Matrix y;
    for (int it = 0; it < iterations; ++it) {
        const Matrix xm = unvec_square(gc * x);
        y = psd_projection(xm);
        const Vector xn = project_affine(y);
        const double step = (xn - x).norm();
        x = xn;
        if (step < 1e-14 * std::max(1.0, x.norm())) break;
    }
    if (y.size() == 0) return std::nullopt;

    Eigen::SelfAdjointEigenSolver<Matrix> es(y);
    const Vector& ev = es.eigenvalues();
    const double emax = ev.cwiseAbs().maxCoeff();
    if (emax <= 0.0) return std::nullopt;
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double rel : {1e-2, 1e-4, 1e-6, 1e-8}) {
        std::vector<Eigen::Index> ker;
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (ev[i] <= rel * emax) ker.push_back(i);
        }
        if (ker.empty() || static_cast<Eigen::Index>(ker.size()) == r) continue;
        Matrix kmat(r, static_cast<Eigen::Index>(ker.size()));
        for (std::size_t i = 0; i < ker.size(); ++i) kmat.col(static_cast<Eigen::Index>(i)) = es.eigenvectors().col(ker[i]);
        // Linear constraints M(x) K = 0.
        Matrix cons(r * kmat.cols(), c);
        for (Eigen::Index k = 0; k < c; ++k) {
            const Matrix mk = unvec_square(gc.col(k)) * kmat;
            cons.col(k) = Eigen::Map<const Vector>(mk.data(), mk.size());
        }
        const Matrix face = kernel_basis(cons, tol);
        if (face.cols() == 0) continue;
        const Matrix fw_basis = cs.candidates * face;
        if (face.cols() == 1) {
            if (auto a = accept_signed(cs, fw_basis.col(0), g, tol, true)) return a;
            continue;
        }
        std::optional<Accepted> best;
        for (int s = 0; s < 200; ++s) {
            Vector coeff(face.cols());
            for (Eigen::Index k = 0; k < coeff.size(); ++k) coeff[k] = gauss(rng);
            if (auto a = accept_signed(cs, fw_basis * coeff, g, tol, true)) {
                if (!best || a->psd.rank > best->psd.rank) best = a;
            }
        }
        if (best) return best;
    }
    return std::nullopt;
}

} // namespace detail

/**
 * Looks for the next stress of the iteration.
 *
 * ProvablyNone is reported only when no nonzero PSD restricted matrix can
 * exist: an empty candidate space, a one-dimensional indefinite one, or
 * traceless candidates. Anything else that comes back empty is SearchFailed.
 */
inline StressSearch find_next_stress(const ReductionState& state, const SearchMode& mode) {
    const Framework& fw = *state.framework;
    const TolerancePolicy& tol = state.tol;
    const CandidateSpace cs = candidate_space(fw, state.basis, tol);
    StressSearch out;
    out.candidate_dim = cs.dim();
    out.zero_energy_dim = static_cast<int>(cs.zero_energy.cols());
    const bool tensegrity = fw.graph.is_tensegrity();

    if (const auto* user = std::get_if<UserSupplied>(&mode)) {
        const auto idx = static_cast<std::size_t>(state.level);
        if (idx >= user->stresses.size()) {
            out.status = cs.dim() == 0 ? SearchStatus::ProvablyNone : SearchStatus::SearchFailed;
            out.diagnostic = "no user-supplied stress for level " + std::to_string(state.level + 1);
            return out;
        }
        const StressVector& w = user->stresses[idx];
        check_stress_size(fw.graph, w);
        const double res = restricted_equilibrium_residual(fw, state.basis.matrix(), w);
        const std::string lvl = " at level " + std::to_string(state.level + 1);
        if (res > 10.0 * tol.rank_rel_tol) {
            out.status = SearchStatus::Rejected;
            out.diagnostic = "restricted equilibrium violated" + lvl;
            return out;
        }
        out.psd = psd_classify(restricted_stress_matrix(state.basis, stress_matrix_from_vector(fw.graph, w)), tol);
        if (out.psd.kind != PsdKind::PSD) {
            out.status = SearchStatus::Rejected;
            out.diagnostic = std::string(out.psd.kind == PsdKind::Zero ? "zero restricted stress matrix"
                                                                       : to_string(out.psd.kind)) + lvl;
            if (out.psd.kind == PsdKind::NSD) out.diagnostic = "NSD" + lvl;
            return out;
        }
        if (!is_proper(w, fw.graph, tol)) {
            out.status = SearchStatus::Rejected;
            out.diagnostic = "improper stress" + lvl;
            return out;
        }
        out.status = SearchStatus::Found;
        out.stress = w;
        return out;
    }

    if (cs.dim() == 0) {
        out.status = SearchStatus::ProvablyNone;
        out.diagnostic = "no restricted-equilibrium stress with nonzero restricted matrix";
        return out;
    }

    if (cs.dim() == 1) {
        const StressVector w = cs.candidates.col(0);
        const PsdClass c = psd_classify(detail::restricted_of(cs, w), tol);
        if (c.kind == PsdKind::Indefinite) {
            out.status = SearchStatus::ProvablyNone;
            out.psd = c;
            out.samples_indefinite = 1;
            out.diagnostic = "one-dimensional candidate space is indefinite";
            return out;
        }
        const StressVector signed_w = c.kind == PsdKind::NSD ? StressVector(-w) : w;
        if (is_proper(signed_w, fw.graph, tol)) {
            out.status = SearchStatus::Found;
            out.stress = detail::unit_scaled(signed_w);
            out.psd = psd_classify(detail::restricted_of(cs, signed_w), tol);
            return out;
        }
        if (out.zero_energy_dim == 0 || std::holds_alternative<Exact1D>(mode)) {
            out.status = out.zero_energy_dim == 0 ? SearchStatus::ProvablyNone : SearchStatus::SearchFailed;
            out.diagnostic = "semidefinite candidate violates cable/strut signs";
            return out;
        }
        // Try to repair the signs with zero-energy directions below.
    } else if (std::holds_alternative<Exact1D>(mode)) {
        out.status = SearchStatus::SearchFailed;
        out.diagnostic = "candidate space has dimension " + std::to_string(cs.dim()) + "; exact1d needs dimension 1";
        return out;
    }

    {
        // A nonzero PSD matrix has positive trace.
        Vector traces(cs.dim());
        for (int k = 0; k < cs.dim(); ++k) traces[k] = detail::restricted_of(cs, cs.candidates.col(k)).trace();
        if (traces.cwiseAbs().maxCoeff() <= tol.rank_rel_tol * std::max(1.0, cs.energy_map.norm())) {
            out.status = SearchStatus::ProvablyNone;
            out.diagnostic = "all candidate restricted matrices are traceless";
            return out;
        }
    }

    const auto& rnd = std::get<RandomizedMaxRank>(mode);
    std::mt19937_64 rng(detail::level_seed(rnd.seed, state.level));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int max_rank = state.basis.rows() - (state.d() + 1);
    const Eigen::Index zc = cs.zero_energy.cols();
    std::optional<detail::Accepted> best;
    for (int s = 0; s < rnd.samples; ++s) {
        Vector coeff(cs.dim());
        for (Eigen::Index k = 0; k < coeff.size(); ++k) coeff[k] = gauss(rng);
        StressVector w = cs.candidates * coeff;
        PsdClass c = psd_classify(detail::restricted_of(cs, w), tol);
        if (c.kind == PsdKind::PSD) ++out.samples_psd;
        else if (c.kind == PsdKind::NSD) ++out.samples_nsd;
        else if (c.kind == PsdKind::Indefinite) ++out.samples_indefinite;
        if (c.kind == PsdKind::NSD) {
            w = -w;
            c.kind = PsdKind::PSD;
        }
        if (c.kind != PsdKind::PSD) continue;
        if (tensegrity && !is_proper(w, fw.graph, tol) && zc > 0) {
            // Zero-energy directions leave B Omega B^t unchanged; use them to chase proper signs.
            for (int t = 0; t < 20 && !is_proper(w, fw.graph, tol); ++t) {
                Vector z(zc);
                for (Eigen::Index k = 0; k < zc; ++k) z[k] = gauss(rng);
                const StressVector trial = w + (w.norm() / std::max(1e-300, z.norm())) * (cs.zero_energy * z);
                if (is_proper(trial, fw.graph, tol)) w = trial;
            }
        }
        if (!is_proper(w, fw.graph, tol)) continue;
        c = psd_classify(detail::restricted_of(cs, w), tol);
        if (!best || c.rank > best->psd.rank) best = detail::Accepted{w, c};
        if (best->psd.rank >= max_rank) break;
    }
    if (!best && rnd.refine_iterations > 0) {
        best = detail::refine_by_projections(cs, fw.graph, tol, rnd.refine_iterations, rng);
        out.refined = best.has_value();
    }
    if (best) {
        out.status = SearchStatus::Found;
        out.stress = detail::unit_scaled(best->w);
        out.psd = best->psd;
        return out;
    }
    out.status = SearchStatus::SearchFailed;
    out.diagnostic = "no PSD candidate among " + std::to_string(rnd.samples) + " samples (candidate dimension " +
                     std::to_string(cs.dim()) + ")";
    return out;
}

/// Replaces B by K^t B, K spanning the kernel of the (nonzero PSD) restricted stress matrix.
inline ReductionState update_basis(const ReductionState& state, const StressVector& w) {
    const Framework& fw = *state.framework;
    const Matrix rstar = restricted_stress_matrix(state.basis, stress_matrix_from_vector(fw.graph, w));
    const PsdClass c = psd_classify(rstar, state.tol);
    if (c.kind == PsdKind::Zero) throw InputError("update_basis: restricted stress matrix is zero");
    if (c.kind != PsdKind::PSD) throw InputError("update_basis: restricted stress matrix is not PSD");
    const Matrix k = symmetric_kernel(rstar, state.tol);
    ReductionState next = state;
    next.basis = canonicalize_basis(k.transpose() * state.basis.matrix(), state.tol);
    next.level = state.level + 1;
    LevelRecord rec;
    rec.stress = w;
    rec.psd = c;
    rec.rank = c.rank;
    rec.residual = restricted_equilibrium_residual(fw, state.basis.matrix(), w);
    next.history.push_back(std::move(rec));
    if (next.basis.rows() != state.basis.rows() - c.rank) {
        throw std::logic_error("update_basis: dimension accounting failed");
    }
    return next;
}

enum class ReductionOutcome { Certificate, MaxAffineDim, Inconclusive };

inline const char* to_string(ReductionOutcome o) {
    switch (o) {
    case ReductionOutcome::Certificate: return "certificate";
    case ReductionOutcome::MaxAffineDim: return "max-affine-dim";
    case ReductionOutcome::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct ReductionResult {
    ReductionOutcome outcome = ReductionOutcome::Inconclusive;
    int d = 0;                 ///< affine span dimension of p
    int final_affine_dim = 0;  ///< d_k
    BasisMatrix final_basis = BasisMatrix::identity(2);
    std::vector<LevelRecord> levels;
    std::vector<StressSearch> searches;
    std::string diagnostic;

    [[nodiscard]] Certificate certificate() const {
        Certificate c;
        std::vector<int> ranks;
        for (const LevelRecord& l : levels) {
            c.levels.push_back(l.stress);
            if (!l.completion) ranks.push_back(l.rank);
        }
        c.declared_ranks = ranks;
        return c;
    }

    [[nodiscard]] std::vector<int> ranks() const {
        std::vector<int> r;
        for (const LevelRecord& l : levels) {
            if (!l.completion) r.push_back(l.rank);
        }
        return r;
    }
};

namespace detail {

/**
 * After dimensional rigidity is established for a tensegrity, every
 * restricted-equilibrium stress has zero restricted matrix. Searches that
 * space for a proper stress carrying cables/struts still unstressed.
 */
inline std::optional<StressVector> completion_stress(const ReductionState& state, std::uint64_t seed, int samples) {
    const Framework& fw = *state.framework;
    const TolerancePolicy& tol = state.tol;
    std::vector<bool> stressed(static_cast<std::size_t>(fw.m()), false);
    for (const LevelRecord& l : state.history) {
        for (int k = 0; k < fw.m(); ++k) {
            if (!is_numerically_zero_entry(l.stress, k, tol)) stressed[static_cast<std::size_t>(k)] = true;
        }
    }
    auto missing = [&](const StressVector& w) {
        int cnt = 0;
        for (int k = 0; k < fw.m(); ++k) {
            if (fw.graph.member(k).kind == MemberKind::Bar || stressed[static_cast<std::size_t>(k)]) continue;
            if (!is_numerically_zero_entry(w, k, tol)) ++cnt;
        }
        return cnt;
    };
    int need = 0;
    for (int k = 0; k < fw.m(); ++k) {
        if (fw.graph.member(k).kind != MemberKind::Bar && !stressed[static_cast<std::size_t>(k)]) ++need;
    }
    if (need == 0) return std::nullopt;

    const Matrix space = restricted_equilibrium_space(fw, state.basis, tol);
    if (space.cols() == 0) return std::nullopt;
    std::mt19937_64 rng(level_seed(seed, state.level + 1000));
    std::normal_distribution<double> gauss(0.0, 1.0);
    StressVector prior = StressVector::Zero(fw.m());
    for (const LevelRecord& l : state.history) prior += unit_scaled(l.stress);

    // The proper stresses form a convex cone, so summing proper samples only grows the support.
    StressVector acc = StressVector::Zero(fw.m());
    for (int s = 0; s < samples && missing(acc) < need; ++s) {
        Vector coeff(space.cols());
        for (Eigen::Index k = 0; k < coeff.size(); ++k) coeff[k] = gauss(rng);
        const StressVector base = unit_scaled(space * coeff);
        for (double t : {0.0, 1.0, 4.0}) {
            const StressVector w = base + t * prior;
            if (is_proper(w, fw.graph, tol) && missing(w) > 0) {
                acc += unit_scaled(w);
                break;
            }
        }
    }
    if (missing(acc) == 0) return std::nullopt;
    return unit_scaled(acc);
}

} // namespace detail

/**
 * Runs find_next_stress / update_basis until no stress is found.
 *
 * Certificate when d_k = d, MaxAffineDim when the last candidate space is
 * provably free of nonzero PSD matrices while d_k > d, Inconclusive when the
 * search gave up. Tensegrities get an extra completion level when needed to
 * put stress on cables/struts for the conic test.
 */
inline ReductionResult run_reduction(const Framework& fw, const SearchMode& mode, const TolerancePolicy& tol = {}) {
    ReductionState state = initial_state(fw, tol);
    ReductionResult out;
    out.d = state.d();
    SearchStatus last = SearchStatus::ProvablyNone;
    for (int guard = 0; guard <= fw.n(); ++guard) {
        if (state.basis.affine_dim() == state.d()) {
            // Nothing left to reduce: a nonzero PSD restricted matrix would shrink the span below d.
            last = SearchStatus::ProvablyNone;
            break;
        }
        StressSearch s = find_next_stress(state, mode);
        out.searches.push_back(s);
        last = s.status;
        if (s.status != SearchStatus::Found) {
            out.diagnostic = s.diagnostic;
            break;
        }
        state = update_basis(state, *s.stress);
    }
    out.final_affine_dim = state.basis.affine_dim();
    if (last == SearchStatus::ProvablyNone) {
        out.outcome = out.final_affine_dim == out.d ? ReductionOutcome::Certificate : ReductionOutcome::MaxAffineDim;
    } else {
        out.outcome = ReductionOutcome::Inconclusive;
    }

    auto completion_level = [&](const StressVector& w) {
        LevelRecord rec;
        rec.stress = w;
        rec.psd = psd_classify(restricted_stress_matrix(state.basis, stress_matrix_from_vector(fw.graph, w)), tol);
        rec.rank = 0;
        rec.residual = restricted_equilibrium_residual(fw, state.basis.matrix(), w);
        rec.completion = true;
        return rec;
    };
    if (out.outcome == ReductionOutcome::Certificate) {
        if (const auto* user = std::get_if<UserSupplied>(&mode)) {
            // Supplied stresses past d_k = d are completion levels; they must still be valid.
            for (auto idx = static_cast<std::size_t>(state.level); idx < user->stresses.size(); ++idx) {
                const StressVector& w = user->stresses[idx];
                check_stress_size(fw.graph, w);
                LevelRecord rec = completion_level(w);
                const std::string at = " at level " + std::to_string(idx + 1);
                std::string why;
                if (rec.residual > 10.0 * tol.rank_rel_tol) why = "restricted equilibrium violated" + at;
                else if (fw.graph.is_tensegrity() && !is_proper(w, fw.graph, tol)) why = "improper stress" + at;
                if (!why.empty()) {
                    StressSearch rejected;
                    rejected.status = SearchStatus::Rejected;
                    rejected.diagnostic = why;
                    out.searches.push_back(rejected);
                    out.diagnostic = why;
                    out.outcome = ReductionOutcome::Inconclusive;
                    break;
                }
                state.history.push_back(std::move(rec));
            }
        } else if (fw.graph.is_tensegrity()) {
            const auto* rnd = std::get_if<RandomizedMaxRank>(&mode);
            if (const auto extra = detail::completion_stress(state, rnd ? rnd->seed : 1, rnd ? rnd->samples : 2000)) {
                state.history.push_back(completion_level(*extra));
            }
        }
    }
    out.levels = state.history;
    out.final_basis = state.basis;
    return out;
}

} // namespace unirigid
