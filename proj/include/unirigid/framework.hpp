/**
 * @file framework.hpp
 * @brief Bar/tensegrity frameworks, the squared-length map and the rigidity matrix.
 *
 * Vertices are 0-based internally; the JSON layer converts from the 1-based
 * numbering used in files. Members keep their input order, which is the
 * canonical order of every measurement and stress vector.
 */
#pragma once

#include "unirigid/numerics.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace unirigid {

enum class MemberKind { Bar, Cable, Strut };

inline const char* to_string(MemberKind k) {
    switch (k) {
    case MemberKind::Bar: return "bar";
    case MemberKind::Cable: return "cable";
    case MemberKind::Strut: return "strut";
    }
    return "?";
}

inline std::optional<MemberKind> member_kind_from_string(const std::string& s) {
    if (s == "bar") return MemberKind::Bar;
    if (s == "cable") return MemberKind::Cable;
    if (s == "strut") return MemberKind::Strut;
    return std::nullopt;
}

struct Member {
    int i = 0;
    int j = 0;
    MemberKind kind = MemberKind::Bar;

    friend bool operator==(const Member&, const Member&) = default;
};

/// Simple graph on vertices 0..n-1: no loops, no repeated unordered pairs, at least one member.
class Graph {
public:
    Graph(int n, std::vector<Member> members) : n_(n), members_(std::move(members)) {
        if (n_ < 2) throw InputError("graph needs at least 2 vertices");
        if (members_.empty()) throw InputError("graph needs at least one member");
        std::set<std::pair<int, int>> seen;
        for (std::size_t k = 0; k < members_.size(); ++k) {
            const Member& e = members_[k];
            if (e.i < 0 || e.i >= n_ || e.j < 0 || e.j >= n_) {
                throw InputError("member " + std::to_string(k) + " references a vertex out of range");
            }
            if (e.i == e.j) throw InputError("member " + std::to_string(k) + " is a loop");
            if (!seen.emplace(std::min(e.i, e.j), std::max(e.i, e.j)).second) {
                throw InputError("member " + std::to_string(k) + " duplicates an earlier member");
            }
        }
    }

    [[nodiscard]] int vertex_count() const { return n_; }
    [[nodiscard]] int member_count() const { return static_cast<int>(members_.size()); }
    [[nodiscard]] const std::vector<Member>& members() const { return members_; }
    [[nodiscard]] const Member& member(int k) const { return members_.at(static_cast<std::size_t>(k)); }

    /// Index of member {i, j} in canonical order, if present.
    [[nodiscard]] std::optional<int> find_member(int i, int j) const {
        for (std::size_t k = 0; k < members_.size(); ++k) {
            const Member& e = members_[k];
            if ((e.i == i && e.j == j) || (e.i == j && e.j == i)) return static_cast<int>(k);
        }
        return std::nullopt;
    }

    [[nodiscard]] bool is_tensegrity() const {
        for (const Member& e : members_) {
            if (e.kind != MemberKind::Bar) return true;
        }
        return false;
    }

private:
    int n_;
    std::vector<Member> members_;
};

/// The configuration matrix: one column per vertex, one row per ambient coordinate.
class Configuration {
public:
    explicit Configuration(Matrix points) : p_(std::move(points)) {
        if (p_.cols() < 2) throw InputError("configuration needs at least 2 points");
        if (p_.rows() < 1) throw InputError("configuration needs ambient dimension >= 1");
        if (!p_.allFinite()) throw InputError("configuration has non-finite coordinates");
    }

    [[nodiscard]] int size() const { return static_cast<int>(p_.cols()); }
    [[nodiscard]] int dim() const { return static_cast<int>(p_.rows()); }
    [[nodiscard]] const Matrix& matrix() const { return p_; }
    [[nodiscard]] Vector point(int i) const { return p_.col(i); }

    [[nodiscard]] Vector centroid() const { return p_.rowwise().mean(); }
    [[nodiscard]] Matrix centered() const { return p_.colwise() - centroid(); }

private:
    Matrix p_;
};

struct Framework {
    Graph graph;
    Configuration config;

    Framework(Graph g, Configuration c) : graph(std::move(g)), config(std::move(c)) {
        if (graph.vertex_count() != config.size()) {
            throw InputError("graph has " + std::to_string(graph.vertex_count()) + " vertices but configuration has " +
                             std::to_string(config.size()) + " points");
        }
    }

    [[nodiscard]] int n() const { return graph.vertex_count(); }
    [[nodiscard]] int m() const { return graph.member_count(); }
    [[nodiscard]] Vector member_vector(int k) const {
        const Member& e = graph.member(k);
        return config.point(e.i) - config.point(e.j);
    }
};

struct SpanInfo {
    int d = 0;
    Vector origin;      ///< centroid of the points
    Matrix span_basis;  ///< dim x d, orthonormal columns
    Matrix projected;   ///< d x n coordinates of p_i - origin in span_basis
};

/// Affine span of the points: dimension, orthonormal frame and the isometric projection.
inline SpanInfo affine_span(const Configuration& config, const TolerancePolicy& tol = {}) {
    SpanInfo s;
    s.origin = config.centroid();
    const Matrix x = config.centered();
    Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU);
    s.d = detail::count_above(svd.singularValues(), tol);
    // Full-dimensional spans keep the input axes, so reports use the caller's coordinates.
    s.span_basis = s.d == config.dim() ? Matrix(Matrix::Identity(s.d, s.d)) : Matrix(svd.matrixU().leftCols(s.d));
    s.projected = s.span_basis.transpose() * x;
    return s;
}

/// Squared member lengths in canonical member order.
inline Vector rigidity_map(const Framework& fw) {
    Vector f(fw.m());
    for (int k = 0; k < fw.m(); ++k) f[k] = fw.member_vector(k).squaredNorm();
    return f;
}

/**
 * m x (dim*n) rigidity matrix; vertex i owns columns [dim*i, dim*i + dim).
 * Row k carries p_i - p_j at i and p_j - p_i at j, so R(p) vec(P) = f(p).
 */
inline Matrix rigidity_matrix(const Framework& fw) {
    const int dim = fw.config.dim();
    Matrix r = Matrix::Zero(fw.m(), static_cast<Eigen::Index>(dim) * fw.n());
    for (int k = 0; k < fw.m(); ++k) {
        const Member& e = fw.graph.member(k);
        const Vector v = fw.member_vector(k);
        r.block(k, dim * e.i, 1, dim) = v.transpose();
        r.block(k, dim * e.j, 1, dim) = -v.transpose();
    }
    return r;
}

/// Column-stacked configuration, matching rigidity_matrix's column layout.
inline Vector stacked_configuration(const Configuration& config) {
    return Eigen::Map<const Vector>(config.matrix().data(), config.matrix().size());
}

struct MemberDirections {
    std::vector<Vector> directions;  ///< in the d-dimensional span coordinates
    std::vector<int> members;        ///< member index of each direction
    std::vector<int> skipped;        ///< zero-length members
};

/// Threshold under which a member is considered to have zero length.
inline double zero_length_threshold(const Configuration& config, const TolerancePolicy& tol) {
    const double diam = config.centered().colwise().norm().maxCoeff();
    return tol.zero_abs_tol + tol.rank_rel_tol * diam;
}

inline MemberDirections member_directions(const Framework& fw, const std::vector<int>& subset, const SpanInfo& span,
                                          const TolerancePolicy& tol = {}) {
    MemberDirections out;
    const double cut = zero_length_threshold(fw.config, tol);
    for (int k : subset) {
        if (k < 0 || k >= fw.m()) throw InputError("member index out of range: " + std::to_string(k));
        const Vector v = fw.member_vector(k);
        if (v.norm() <= cut) {
            out.skipped.push_back(k);
            continue;
        }
        out.directions.push_back(span.span_basis.transpose() * v);
        out.members.push_back(k);
    }
    return out;
}

inline MemberDirections member_directions(const Framework& fw, const std::vector<int>& subset,
                                          const TolerancePolicy& tol = {}) {
    return member_directions(fw, subset, affine_span(fw.config, tol), tol);
}

inline std::vector<int> all_members(const Framework& fw) {
    std::vector<int> idx(static_cast<std::size_t>(fw.m()));
    for (int k = 0; k < fw.m(); ++k) idx[static_cast<std::size_t>(k)] = k;
    return idx;
}

/// Point i of the result is (cos(theta) p_i, sin(theta) q_i).
inline Configuration diagonal_combination(const Configuration& p, const Configuration& q, double theta) {
    if (p.size() != q.size()) throw InputError("diagonal_combination: configurations differ in point count");
    if (!(theta >= 0.0 && theta <= std::numbers::pi / 2)) {
        throw InputError("diagonal_combination: theta must lie in [0, pi/2]");
    }
    Matrix out(p.dim() + q.dim(), p.size());
    out.topRows(p.dim()) = std::cos(theta) * p.matrix();
    out.bottomRows(q.dim()) = std::sin(theta) * q.matrix();
    return Configuration(std::move(out));
}

} // namespace unirigid
