// Walks the ladder through the reduction by hand: level by level stresses,
// restricted stress matrices and basis updates, then the conic test.

#include "unirigid.hpp"

#include <iostream>

using namespace unirigid;

int main() {
    Matrix p(2, 6);
    p << 0, 0, 1, 1, 0, 1,
         0, 2, 2, 0, 1, 1;
    const std::vector<Member> members = {{0, 1}, {0, 4}, {1, 4}, {2, 3}, {2, 5}, {3, 5}, {0, 3}, {1, 2}, {4, 5}};
    const Framework fw(Graph(6, members), Configuration(p));

    ReductionState state = initial_state(fw);
    std::cout << "d = " << state.d() << ", d_0 = " << state.basis.affine_dim() << "\n";
    for (;;) {
        const StressSearch s = find_next_stress(state, RandomizedMaxRank{});
        if (s.status != SearchStatus::Found) {
            std::cout << "stop: " << to_string(s.status) << "\n";
            break;
        }
        std::cout << "level " << state.level + 1 << ": candidate dim " << s.candidate_dim << ", rank " << s.psd.rank
                  << "\nOmega* =\n"
                  << restricted_stress_matrix(state.basis, stress_matrix_from_vector(fw.graph, *s.stress)) << "\n";
        state = update_basis(state, *s.stress);
        std::cout << "B =\n" << state.basis.matrix() << "\n";
    }

    Certificate cert;
    for (const LevelRecord& l : state.history) cert.levels.push_back(l.stress);
    const Verdict v = decide_universal(fw, cert);
    std::cout << "dimensionally rigid: " << to_string(v.dimensionally_rigid)
              << "\nuniversally rigid: " << to_string(v.universally_rigid) << "\n";
    if (v.conic) std::cout << "conic at infinity:\n" << v.conic->a << "\n";
    return 0;
}
