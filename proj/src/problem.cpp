#include "halfline/problem.hpp"

#include "halfline/hamiltonian.hpp"

namespace halfline {

GeneralProblem to_general(const ProblemSpec& spec) {
    spec.require_valid();
    GeneralProblem g;
    g.sigma = spec.sigma;
    g.boundary = spec.boundary;
    g.horizon = spec.horizon;
    g.hamiltonian = [spec](double p, double u, double x, double t) {
        return eval_hmax(p, u, x, t, spec).value;
    };
    return g;
}

}  // namespace halfline
