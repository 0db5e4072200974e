#include "halfline/solver.hpp"

#include "halfline/hamiltonian.hpp"

namespace halfline {

Solution solve_control_problem(const ProblemSpec& spec, const Mesh& mesh,
                               const SchemeConfig& scheme, const SolveSettings& settings,
                               const IterationCallback& on_iteration) {
    spec.require_valid();
    const GeneralProblem general = to_general(spec);

    double kappa = settings.kappa;
    if (std::isnan(kappa)) {
        KSampling ks;
        ks.x_lo = 0.0;
        ks.x_hi = mesh.x_max;
        ks.seed = settings.seed;
        const double k_hat = estimate_K(general, ks);
        double m = settings.m_cal;
        if (std::isnan(m)) m = settings.calibrate_m ? calibrate_M(spec.sigma, mesh, scheme)
                                                    : kDefaultMcal;
        kappa = choose_kappa(k_hat, m, settings.safety);
    }

    Solution sol = iterate(general, mesh, scheme, kappa, settings.tol, settings.max_iter,
                           std::nullopt, on_iteration);
    sol.policy = extract_policy(sol.value, sol.derivative, spec);
    return sol;
}

}  // namespace halfline
