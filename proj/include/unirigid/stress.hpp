/**
 * @file stress.hpp
 * @brief Stress vectors and matrices, stress energy, equilibrium and properness.
 */
#pragma once

#include "unirigid/framework.hpp"
#include "unirigid/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace unirigid {

/// One scalar per member in canonical member order; non-members are implicitly zero.
using StressVector = Vector;

/// n x n symmetric matrix with -w_ij off the diagonal and zero row sums.
class StressMatrix {
public:
    StressMatrix() = default;

    [[nodiscard]] const Matrix& matrix() const { return omega_; }
    [[nodiscard]] int size() const { return static_cast<int>(omega_.rows()); }

    friend StressMatrix stress_matrix_from_vector(const Graph& g, const StressVector& w);

private:
    explicit StressMatrix(Matrix m) : omega_(std::move(m)) {}
    Matrix omega_;
};

inline void check_stress_size(const Graph& g, const StressVector& w) {
    if (w.size() != g.member_count()) {
        throw InputError("stress has " + std::to_string(w.size()) + " entries, graph has " +
                         std::to_string(g.member_count()) + " members");
    }
    if (!w.allFinite()) throw InputError("stress has non-finite entries");
}

inline StressMatrix stress_matrix_from_vector(const Graph& g, const StressVector& w) {
    check_stress_size(g, w);
    Matrix om = Matrix::Zero(g.vertex_count(), g.vertex_count());
    for (int k = 0; k < g.member_count(); ++k) {
        const Member& e = g.member(k);
        om(e.i, e.j) -= w[k];
        om(e.j, e.i) -= w[k];
        om(e.i, e.i) += w[k];
        om(e.j, e.j) += w[k];
    }
    return StressMatrix(std::move(om));
}

/// Sum over members of w_ij |p_i - p_j|^2.
inline double stress_energy(const StressVector& w, const Framework& fw) {
    check_stress_size(fw.graph, w);
    double e = 0.0;
    for (int k = 0; k < fw.m(); ++k) e += w[k] * fw.member_vector(k).squaredNorm();
    return e;
}

/// Residual ||P Omega|| relative to ||P|| ||Omega|| (P centered, so the ratio is translation invariant).
inline double equilibrium_residual(const Matrix& omega, const Configuration& config) {
    if (omega.rows() != config.size()) throw InputError("stress matrix and configuration sizes differ");
    const Matrix p = config.centered();
    const double scale = p.norm() * omega.norm();
    if (scale == 0.0) return 0.0;
    return (p * omega).norm() / scale;
}

inline bool is_equilibrium(const StressMatrix& om, const Configuration& config, const TolerancePolicy& tol = {}) {
    if (om.matrix().cwiseAbs().maxCoeff() < tol.zero_abs_tol) return true;
    return equilibrium_residual(om.matrix(), config) <= 10.0 * tol.rank_rel_tol;
}

/// Orthonormal basis (columns) of {w : w R(p) = 0}.
inline Matrix equilibrium_stress_space(const Framework& fw, const TolerancePolicy& tol = {}) {
    return kernel_basis(rigidity_matrix(fw).transpose(), tol);
}

/// Cables carry w >= 0, struts w <= 0, bars anything; slack scales with the largest entry.
inline bool is_proper(const StressVector& w, const Graph& g, const TolerancePolicy& tol = {}) {
    check_stress_size(g, w);
    const double slack = std::max(tol.zero_abs_tol, tol.psd_rel_tol * (w.size() ? w.cwiseAbs().maxCoeff() : 0.0));
    for (int k = 0; k < g.member_count(); ++k) {
        const MemberKind kind = g.member(k).kind;
        if (kind == MemberKind::Cable && w[k] < -slack) return false;
        if (kind == MemberKind::Strut && w[k] > slack) return false;
    }
    return true;
}

/// Entries of @p w whose magnitude is numerically zero relative to its largest entry.
inline bool is_numerically_zero_entry(const StressVector& w, int k, const TolerancePolicy& tol = {}) {
    const double scale = w.size() ? w.cwiseAbs().maxCoeff() : 0.0;
    return std::abs(w[k]) <= std::max(tol.zero_abs_tol, tol.rank_rel_tol * scale);
}

} // namespace unirigid
