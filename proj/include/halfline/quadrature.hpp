#pragma once

#include <functional>

namespace halfline {

/// Adaptive Gauss–Kronrod (G7,K15) integration of f over [a,b].
/// Subdivides until the per-interval error estimate meets its share of
/// abs_tol. Throws NumericalError if the recursion depth limit is hit.
double adaptive_gk15(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-10, int max_depth = 40);

/// Fixed 15-point Gauss–Legendre rule on [a,b]; exact for degree <= 29.
double gauss_legendre_15(const std::function<double(double)>& f, double a, double b);

}  // namespace halfline
