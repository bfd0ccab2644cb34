// Randomized property suites, 200+ cases each with fixed seeds.

#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

using namespace unirigid;

namespace {

constexpr int kCases = 200;

Matrix gaussian(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
    std::normal_distribution<double> g(0.0, 1.0);
    return Matrix::NullaryExpr(r, c, [&] { return g(rng); });
}

/// Ladder-like frameworks: random stacked poles joined by rungs, in random affine position.
Framework random_pole_framework(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> poles_d(1, 3);
    std::uniform_real_distribution<double> u(0.2, 0.8);
    const int poles = 1 + poles_d(rng);
    Matrix p(2, 3 * poles);
    std::vector<Member> members;
    for (int k = 0; k < poles; ++k) {
        const double x = k;
        p.col(3 * k) << x, 0.0;
        p.col(3 * k + 1) << x, 2.0;
        p.col(3 * k + 2) << x, 2.0 * u(rng);
        members.push_back({3 * k, 3 * k + 1});
        members.push_back({3 * k, 3 * k + 2});
        members.push_back({3 * k + 1, 3 * k + 2});
        if (k > 0) {
            members.push_back({3 * (k - 1), 3 * k});
            members.push_back({3 * (k - 1) + 1, 3 * k + 1});
            members.push_back({3 * (k - 1) + 2, 3 * k + 2});
        }
    }
    const Matrix a = gaussian(rng, 2, 2) + 2.0 * Matrix::Identity(2, 2);
    return Framework(Graph(3 * poles, members), Configuration((a * p).colwise() + gaussian(rng, 2, 1).col(0)));
}

} // namespace

// (a) stress energy equals w . f(p)
TEST(Property, StressEnergyIsDotWithMeasurement) {
    std::mt19937_64 rng(1001);
    for (int t = 0; t < kCases; ++t) {
        const Framework fw = support::random_framework(rng, 3 + t % 8, 1 + t % 4, 0.6);
        const StressVector w = gaussian(rng, fw.m(), 1).col(0);
        const double e = stress_energy(w, fw);
        const Vector f = oracle::squared_lengths(fw.config.matrix(), support::edges_of(fw.graph));
        EXPECT_NEAR(e, w.dot(f), 1e-12 * (1.0 + w.cwiseAbs().dot(f)));
        EXPECT_NEAR(e, w.dot(rigidity_matrix(fw) * stacked_configuration(fw.config)), 1e-12 * (1.0 + w.cwiseAbs().dot(f)));
    }
}

// (b) equilibrium survives affine images
TEST(Property, EquilibriumIsAffineInvariant) {
    std::mt19937_64 rng(1002);
    int checked = 0;
    for (int t = 0; t < kCases; ++t) {
        const int dim = 1 + t % 3;
        const Framework fw = support::random_framework(rng, dim + 3 + t % 4, dim, 0.95);
        const Matrix s = equilibrium_stress_space(fw);
        if (s.cols() == 0) continue;
        const StressVector w = s * gaussian(rng, s.cols(), 1).col(0);
        const Matrix a = gaussian(rng, dim + 1, dim); // affine maps may also raise the ambient dimension
        const Configuration img((a * fw.config.matrix()).colwise() + gaussian(rng, dim + 1, 1).col(0));
        const StressMatrix om = stress_matrix_from_vector(fw.graph, w);
        EXPECT_TRUE(is_equilibrium(om, fw.config));
        EXPECT_TRUE(is_equilibrium(om, img));
        EXPECT_LT(oracle::vertex_imbalance(img.matrix(), support::edges_of(fw.graph), w),
                  1e-9 * (1.0 + w.norm() * img.matrix().norm()));
        ++checked;
    }
    EXPECT_GE(checked, kCases / 2);
}

// (c) f(cos t p, sin t q) = cos^2 t f(p) + sin^2 t f(q)
TEST(Property, DiagonalCombinationIdentity) {
    std::mt19937_64 rng(1003);
    std::uniform_real_distribution<double> theta(0.0, std::numbers::pi / 2);
    for (int t = 0; t < kCases; ++t) {
        const int n = 2 + t % 7;
        const Framework fp = support::random_framework(rng, n, 1 + t % 3, 0.7);
        const Configuration q(gaussian(rng, 1 + (t / 3) % 4, n));
        const double th = theta(rng);
        const Framework fc(fp.graph, diagonal_combination(fp.config, q, th));
        const Vector want = std::pow(std::cos(th), 2) * rigidity_map(fp) +
                            std::pow(std::sin(th), 2) * rigidity_map(Framework(fp.graph, q));
        EXPECT_LE((rigidity_map(fc) - want).norm(), 1e-9 * want.norm());
    }
}

// (d) d_{i-1} + 1 - r_i = d_i + 1 across reduction runs
TEST(Property, DimensionAccounting) {
    std::mt19937_64 rng(1004);
    int levels = 0;
    for (int t = 0; t < kCases; ++t) {
        const Framework fw = t % 2 == 0 ? random_pole_framework(rng)
                                        : support::random_framework(rng, 4 + t % 4, 2, 0.7, t % 4 == 1);
        ReductionState s = initial_state(fw);
        const RandomizedMaxRank mode{static_cast<std::uint64_t>(t), 300, 50};
        for (int guard = 0; guard < fw.n(); ++guard) {
            const StressSearch found = find_next_stress(s, mode);
            if (found.status != SearchStatus::Found) break;
            const ReductionState next = update_basis(s, *found.stress);
            const int r = next.history.back().rank;
            EXPECT_EQ(s.basis.affine_dim() + 1 - r, next.basis.affine_dim() + 1);
            EXPECT_GT(r, 0);
            // Nesting: rows of the new basis lie in the old row space.
            Matrix both(s.basis.rows() + next.basis.rows(), fw.n());
            both << s.basis.matrix(), next.basis.matrix();
            EXPECT_EQ(oracle::gauss_rank(both, 1e-8), s.basis.rows());
            EXPECT_EQ(next.basis.matrix().row(next.basis.rows() - 1), Matrix::Ones(1, fw.n()));
            EXPECT_GE(next.basis.affine_dim(), next.d());
            s = next;
            ++levels;
        }
    }
    EXPECT_GT(levels, kCases / 2);
}

// (e) B D^-1 (D Omega D) D^-1 B^t = B Omega B^t, and projective invariance of verdicts
TEST(Property, RestrictedStressMatrixProjectiveInvariance) {
    std::mt19937_64 rng(1005);
    std::uniform_real_distribution<double> mag(0.2, 3.0);
    std::bernoulli_distribution sign(0.5);
    for (int t = 0; t < kCases; ++t) {
        const Framework fw = support::random_framework(rng, 3 + t % 7, 2, 0.6);
        const Matrix om = stress_matrix_from_vector(fw.graph, gaussian(rng, fw.m(), 1).col(0)).matrix();
        const Matrix b = gaussian(rng, 1 + t % fw.n(), fw.n());
        Vector dvec(fw.n());
        for (int i = 0; i < fw.n(); ++i) dvec[i] = (sign(rng) ? 1.0 : -1.0) * mag(rng);
        const Matrix lhs = restricted_stress_matrix(b * dvec.cwiseInverse().asDiagonal(),
                                                    dvec.asDiagonal() * om * dvec.asDiagonal());
        const Matrix rhs = restricted_stress_matrix(b, om);
        EXPECT_LE((lhs - rhs).norm(), 1e-9 * std::max(1.0, rhs.norm()));
    }
}

TEST(Property, ProjectiveMapsPreserveDimensionalRigidity) {
    std::mt19937_64 rng(1006);
    std::normal_distribution<double> g(0.0, 1.0);
    const char* names[] = {"ladder", "k4square", "fourpole", "onepole"};
    for (int t = 0; t < kCases; ++t) {
        const std::string name = names[t % 4];
        const Framework fw = support::load(name);
        const Certificate cert = name == "fourpole" ? run_reduction(fw, RandomizedMaxRank{}).certificate()
                                                    : support::load_cert(name, fw);
        Matrix h = Matrix::Identity(3, 3) + 0.3 * gaussian(rng, 3, 3);
        h.row(2) << 0.25 * g(rng), 0.25 * g(rng), 1.0;
        ProjectiveResult r = [&] {
            try {
                return projective_transform(fw, cert, h);
            } catch (const ExceptionalHyperplaneError&) {
                h.row(2) << 0.0, 0.0, 1.0;
                return projective_transform(fw, cert, h);
            }
        }();
        const Verdict before = verify_certificate(fw, cert);
        const Verdict after = verify_certificate(r.framework, r.certificate);
        EXPECT_EQ(after.dimensionally_rigid, before.dimensionally_rigid) << name << " case " << t;
        EXPECT_EQ(after.ranks(), before.ranks()) << name << " case " << t;
        for (std::size_t i = 0; i < r.restricted_before.size(); ++i) {
            EXPECT_LE((r.restricted_before[i] - r.restricted_after[i]).norm(),
                      1e-9 * std::max(1.0, r.restricted_before[i].norm()));
        }
    }
}

// (f) in the plane a conic exists iff the directions hit at most two projective points
TEST(Property, PlanarConicIffAtMostTwoDirections) {
    std::mt19937_64 rng(1007);
    std::uniform_int_distribution<int> distinct(1, 5);
    std::uniform_int_distribution<int> copies(1, 3);
    std::uniform_real_distribution<double> scale(-4.0, 4.0);
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
    for (int t = 0; t < kCases; ++t) {
        const int k = distinct(rng);
        std::vector<Vector> dirs;
        for (int i = 0; i < k; ++i) {
            const double a = angle(rng);
            const int c = copies(rng);
            for (int j = 0; j < c; ++j) {
                double s = scale(rng);
                if (std::abs(s) < 0.1) s = 1.0;
                Vector v(2);
                v << s * std::cos(a), s * std::sin(a);
                dirs.push_back(v);
            }
        }
        std::shuffle(dirs.begin(), dirs.end(), rng);
        const int want = oracle::distinct_directions_2d(dirs, 1e-6);
        EXPECT_EQ(conic_at_infinity(dirs).has_value(), want <= 2) << "case " << t << " with " << want << " directions";
    }
}
