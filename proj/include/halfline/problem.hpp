#pragma once

#include <functional>

#include "halfline/fields.hpp"

namespace halfline {

/// A controlled exit-time problem on (0, inf) x [0, T): maximize the
/// discounted running reward accumulated until the state first reaches 0 (or
/// until T), plus the boundary payoff.
struct ProblemSpec {
    ScalarField2 sigma;             // diffusion, shared by all controls
    ControlledField drift;          // b(x,t,alpha)
    ControlledField discount;       // h(x,t,alpha)
    ControlledField running_reward; // l(x,t,alpha)
    BoundaryData boundary;
    ControlSet controls = ControlSet::interval(-1.0, 1.0);
    double horizon = 1.0;

    void require_valid() const {
        if (!(horizon > 0.0)) throw PreconditionError("ProblemSpec: horizon must be > 0");
        if (!sigma || !drift || !discount || !running_reward || !boundary.terminal ||
            !boundary.lateral)
            throw PreconditionError("ProblemSpec: all fields must be set");
    }
};

/// Hamiltonian H(p, u, x, t) of the semilinear form.
using Hamiltonian = std::function<double(double p, double u, double x, double t)>;

/// The semilinear problem D_t u + (sigma^2/2) D_x^2 u + H(D_x u, u, x, t) = 0
/// with u = beta on the parabolic boundary.
struct GeneralProblem {
    ScalarField2 sigma;
    Hamiltonian hamiltonian;
    BoundaryData boundary;
    double horizon = 1.0;

    void require_valid() const {
        if (!(horizon > 0.0)) throw PreconditionError("GeneralProblem: horizon must be > 0");
        if (!sigma || !hamiltonian || !boundary.terminal || !boundary.lateral)
            throw PreconditionError("GeneralProblem: all fields must be set");
    }
};

/// Rewrites a controlled problem in semilinear form: the Hamiltonian becomes
/// the max over the discretized control set of b*p + h*u + l.
GeneralProblem to_general(const ProblemSpec& spec);

}  // namespace halfline
