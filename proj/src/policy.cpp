#include "halfline/policy.hpp"

#include "halfline/hamiltonian.hpp"

namespace halfline {

FeedbackPolicy extract_policy(const GridFunction& u, const GridFunction& du,
                              const ProblemSpec& spec) {
    u.require_same_mesh(du);
    const Mesh& m = u.mesh();
    std::vector<double> alphas(static_cast<std::size_t>(m.n_x) *
                               static_cast<std::size_t>(m.n_t));
    for (int j = 0; j < m.n_t; ++j) {
        const double t = m.t(j);
        for (int i = 0; i < m.n_x; ++i) {
            const HmaxResult r = eval_hmax(du(j, i), u(j, i), m.x(i), t, spec);
            alphas[static_cast<std::size_t>(j) * static_cast<std::size_t>(m.n_x) +
                   static_cast<std::size_t>(i)] = r.argmax;
        }
    }
    return FeedbackPolicy(m, std::move(alphas), spec.controls);
}

}  // namespace halfline
