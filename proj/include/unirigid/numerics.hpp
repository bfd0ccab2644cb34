/**
 * @file numerics.hpp
 * @brief Tolerance-aware dense linear algebra used by every other module.
 *
 * Rank and kernel decisions go through the SVD, sign classification through
 * a symmetric eigendecomposition. All thresholds are relative to the largest
 * singular value / eigenvalue magnitude so that decisions are scale invariant;
 * an absolute floor only decides whether a matrix is zero altogether.
 */
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace unirigid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised for malformed inputs: non-finite entries, size mismatches, broken invariants.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

struct TolerancePolicy {
    double rank_rel_tol = 1e-9;  ///< singular values <= rank_rel_tol * sigma_max count as zero
    double psd_rel_tol = 1e-9;   ///< eigenvalues >= -psd_rel_tol * |lambda|_max count as nonnegative
    double zero_abs_tol = 1e-12; ///< below this sigma_max the matrix is treated as zero

    void validate() const {
        if (!(rank_rel_tol > 0.0) || !(psd_rel_tol > 0.0) || !(zero_abs_tol > 0.0)) {
            throw InputError("tolerances must be strictly positive");
        }
    }

    /// Same policy with both relative tolerances replaced (the CLI's --tol).
    [[nodiscard]] TolerancePolicy with_relative(double rel) const {
        TolerancePolicy t = *this;
        t.rank_rel_tol = rel;
        t.psd_rel_tol = rel;
        t.validate();
        return t;
    }
};

enum class PsdKind { Zero, PSD, NSD, Indefinite };

inline const char* to_string(PsdKind k) {
    switch (k) {
    case PsdKind::Zero: return "zero";
    case PsdKind::PSD: return "psd";
    case PsdKind::NSD: return "nsd";
    case PsdKind::Indefinite: return "indefinite";
    }
    return "?";
}

struct PsdClass {
    PsdKind kind = PsdKind::Zero;
    int rank = 0;
    double min_eig = 0.0;
    double max_eig = 0.0;
};

namespace detail {

inline void require_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) {
        throw InputError(std::string(what) + ": matrix has non-finite entries");
    }
}

inline int count_above(const Vector& sv, const TolerancePolicy& tol) {
    if (sv.size() == 0) return 0;
    const double smax = sv.cwiseAbs().maxCoeff();
    if (smax < tol.zero_abs_tol) return 0;
    const double cut = tol.rank_rel_tol * smax;
    int r = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (std::abs(sv[k]) > cut) ++r;
    }
    return r;
}

} // namespace detail

/// Number of singular values above rank_rel_tol * sigma_max (0 for a numerically zero matrix).
inline int numerical_rank(const Matrix& m, const TolerancePolicy& tol = {}) {
    detail::require_finite(m, "numerical_rank");
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return detail::count_above(svd.singularValues(), tol);
}

/**
 * Orthonormal basis of the (numerical) kernel of @p m, one vector per column.
 *
 * The column count is always cols(m) - numerical_rank(m). A matrix with no
 * rows has the whole space as kernel.
 */
inline Matrix kernel_basis(const Matrix& m, const TolerancePolicy& tol = {}) {
    detail::require_finite(m, "kernel_basis");
    const Eigen::Index n = m.cols();
    if (n == 0) return Matrix(0, 0);
    if (m.rows() == 0) return Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const int r = detail::count_above(svd.singularValues(), tol);
    // Singular values come sorted in decreasing order, so the trailing
    // right-singular vectors span the kernel.
    return svd.matrixV().rightCols(n - r);
}

/// Generic entry point for {x : A x = 0}; same contract as kernel_basis.
inline Matrix homogeneous_solution_space(const Matrix& a, const TolerancePolicy& tol = {}) {
    return kernel_basis(a, tol);
}

/// Orthonormal basis (columns) of the row space of @p m.
inline Matrix row_space_basis(const Matrix& m, const TolerancePolicy& tol = {}) {
    detail::require_finite(m, "row_space_basis");
    if (m.size() == 0) return Matrix(m.cols(), 0);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const int r = detail::count_above(svd.singularValues(), tol);
    return svd.matrixV().leftCols(r);
}

/// Symmetrized copy of @p s; throws if it is asymmetric beyond tolerance.
inline Matrix symmetrized(const Matrix& s, const TolerancePolicy& tol = {}) {
    detail::require_finite(s, "symmetrized");
    if (s.rows() != s.cols()) throw InputError("symmetric matrix expected, got non-square");
    if (s.size() == 0) return s;
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > tol.zero_abs_tol * scale) {
        throw InputError("matrix is not symmetric within tolerance");
    }
    return 0.5 * (s + s.transpose());
}

inline PsdClass psd_classify(const Matrix& s, const TolerancePolicy& tol = {}) {
    const Matrix sym = symmetrized(s, tol);
    PsdClass out;
    if (sym.size() == 0) return out;

    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    const Vector& ev = es.eigenvalues();
    out.min_eig = ev.minCoeff();
    out.max_eig = ev.maxCoeff();
    out.rank = detail::count_above(ev, tol);
    if (out.rank == 0) {
        out.kind = PsdKind::Zero;
        return out;
    }
    const double scale = std::max(std::abs(out.min_eig), std::abs(out.max_eig));
    const bool has_pos = out.max_eig > tol.psd_rel_tol * scale;
    const bool has_neg = out.min_eig < -tol.psd_rel_tol * scale;
    if (has_pos && has_neg) {
        out.kind = PsdKind::Indefinite;
    } else if (has_neg) {
        out.kind = PsdKind::NSD;
    } else if (has_pos) {
        out.kind = PsdKind::PSD;
    } else {
        // Only reachable when psd_rel_tol exceeds rank_rel_tol; the dominant sign decides.
        out.kind = std::abs(out.max_eig) >= std::abs(out.min_eig) ? PsdKind::PSD : PsdKind::NSD;
    }
    return out;
}

/// Orthonormal eigenvectors of a symmetric matrix whose eigenvalues are numerically zero.
inline Matrix symmetric_kernel(const Matrix& s, const TolerancePolicy& tol = {}) {
    const Matrix sym = symmetrized(s, tol);
    const Eigen::Index n = sym.rows();
    if (n == 0) return Matrix(0, 0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    const Vector& ev = es.eigenvalues();
    const double scale = ev.cwiseAbs().maxCoeff();
    if (scale < tol.zero_abs_tol) return Matrix::Identity(n, n);
    const double cut = tol.rank_rel_tol * scale;
    Matrix k(n, n);
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(ev[i]) <= cut) k.col(c++) = es.eigenvectors().col(i);
    }
    return k.leftCols(c);
}

/// Projection of a symmetric matrix onto the PSD cone (negative eigenvalues clipped).
inline Matrix psd_projection(const Matrix& s) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.transpose()));
    const Vector clipped = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
}

} // namespace unirigid
