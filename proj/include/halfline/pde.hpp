#pragma once

#include <optional>

#include "halfline/fields.hpp"
#include "halfline/mesh.hpp"

namespace halfline {

/// Closure at the truncation boundary x = x_max.
/// linear_extrapolation and zero_second_derivative are the same scheme (a
/// vanishing second difference at the last node is exactly a two-point linear
/// extrapolation); homogeneous_neumann copies the last interior value.
enum class FarField {
    linear_extrapolation,
    zero_second_derivative,  // alias of linear_extrapolation
    homogeneous_neumann,
};

struct SchemeConfig {
    double theta = 1.0;  // 1 = fully implicit, 0.5 = Crank-Nicolson
    FarField far_field = FarField::linear_extrapolation;

    void require_valid() const {
        if (!(theta >= 0.0 && theta <= 1.0))
            throw PreconditionError("SchemeConfig: theta must lie in [0, 1]");
    }
};

/// Backward-in-time theta-scheme for the linear Cauchy-Dirichlet problem
///   D_t u + (sigma^2/2) D_x^2 u + f = 0   on (0, x_max) x [0, T),
///   u(x, T) = beta_terminal(x),  u(0, t) = beta_lateral(t),
/// with the configured closure at x = x_max. Each backward step solves one
/// tridiagonal system. Boundary rows are assigned, never computed, so they
/// match beta exactly.
GridFunction solve_linear(const ScalarField2& sigma, const ScalarField2& source,
                          const BoundaryData& boundary, const Mesh& mesh,
                          const SchemeConfig& scheme);

/// Discrete spatial derivative: central differences in the interior,
/// second-order one-sided stencils at x = 0 and x = x_max.
GridFunction dx(const GridFunction& g);

/// Discrete Bielecki norm: max over nodes of e^{-kappa (T - t_j)} |g| plus,
/// when gprime is given, the same weighted max of |gprime|. Without gprime
/// this is the weighted sup-norm part only.
double bielecki_norm(const GridFunction& g, const GridFunction* gprime, double kappa);

inline double bielecki_norm(const GridFunction& g, const GridFunction& gprime, double kappa) {
    return bielecki_norm(g, &gprime, kappa);
}
inline double bielecki_norm(const GridFunction& g, double kappa) {
    return bielecki_norm(g, nullptr, kappa);
}

}  // namespace halfline
