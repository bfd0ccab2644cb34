#pragma once

#include "oracles.hpp"
#include "unirigid.hpp"

#include <random>
#include <string>
#include <vector>

namespace support {

using namespace unirigid;

inline std::string fixture(const std::string& name) { return std::string(UNIRIGID_FIXTURE_DIR) + "/" + name; }

inline Framework load(const std::string& name) { return load_framework(fixture(name + ".json")); }

inline Certificate load_cert(const std::string& name, const Framework& fw) {
    return load_certificate(fixture(name + ".cert.json"), fw.graph);
}

/// Builds a stress vector from 1-based (i, j, w) triples.
inline StressVector stress_of(const Graph& g, std::initializer_list<std::tuple<int, int, double>> entries) {
    StressVector w = StressVector::Zero(g.member_count());
    for (const auto& [i, j, v] : entries) w[*g.find_member(i - 1, j - 1)] = v;
    return w;
}

/// Random framework with @p n points in R^dim and each pair a member with probability @p density.
inline Framework random_framework(std::mt19937_64& rng, int n, int dim, double density, bool integer_grid = false) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> grid(-2, 2);
    std::bernoulli_distribution pick(density);
    Matrix p(dim, n);
    for (int c = 0; c < n; ++c) {
        for (int r = 0; r < dim; ++r) p(r, c) = integer_grid ? grid(rng) : gauss(rng);
    }
    std::vector<Member> members;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (pick(rng)) members.push_back({i, j, MemberKind::Bar});
        }
    }
    if (members.empty()) members.push_back({0, 1, MemberKind::Bar});
    return Framework(Graph(n, members), Configuration(p));
}

inline std::vector<oracle::Edge> edges_of(const Graph& g) {
    std::vector<oracle::Edge> e;
    for (const Member& m : g.members()) e.push_back({m.i, m.j});
    return e;
}

} // namespace support
