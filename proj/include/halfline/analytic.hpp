#pragma once

#include <functional>
#include <vector>

#include "halfline/errors.hpp"

namespace halfline {

/// E[tau(x,t) ^ T] for standard Brownian motion started at x >= 0, where tau
/// is the first hitting time of 0:
///   t + integral_t^T (2 Phi(x / sqrt(s - t)) - 1) ds,
/// evaluated by adaptive quadrature to absolute error <= 1e-10.
double bm_truncated_exit(double x, double t, double T);

/// sqrt(T / pi): the Step-I Lipschitz constant for the map x -> E[tau ^ T]
/// as printed in the derivation this library accompanies. Note that the
/// sharp constant is 2*sqrt(2T/pi); see bm_exit_sharp_lipschitz_bound.
double bm_lipschitz_bound(double T);

/// 2*sqrt(2T/pi): the actual supremum of |d/dx E[tau(x,0) ^ T]| over x >= 0
/// (attained as x -> 0+). Kept alongside bm_lipschitz_bound so tests can
/// distinguish the printed constant from the sharp one.
double bm_exit_sharp_lipschitz_bound(double T);

using RealFn = std::function<double(double)>;

/// State change zeta(x) = integral_0^x dz / sigma(z) turning dX = sigma(X) dW
/// into a unit-volatility SDE with drift -sigma'(zeta_inv(y))/2. The
/// quadrature table over [x_lo, x_hi] is built once in the constructor and
/// read-only afterwards; queries outside the range throw.
class LampertiTransform {
  public:
    LampertiTransform(RealFn sigma, RealFn sigma_prime, double x_lo, double x_hi,
                      int cells_per_unit = 8);

    double zeta(double x) const;
    /// Monotone inverse by bisection polished with Newton, to 1e-12.
    double zeta_inv(double y) const;
    double transformed_drift(double y) const;

    double x_lo() const { return x_lo_; }
    double x_hi() const { return x_hi_; }

  private:
    double zeta_raw_(double x) const;

    RealFn sigma_;
    RealFn sigma_prime_;
    double x_lo_, x_hi_;
    std::vector<double> knots_;   // breakpoints in x
    std::vector<double> zvals_;   // zeta at the breakpoints
};

/// Deterministic time change for dX = sigma(X) gamma(s) dW:
///   map(t) = T - integral_t^T gamma(s)^2 ds,  t0 = map(0),
/// with map(T) = T. gamma must be continuous and bounded away from zero on
/// [0, T].
class TimeChange {
  public:
    TimeChange(RealFn gamma, double T, int cells = 512);

    double map(double t) const;
    double t0() const { return t0_; }
    double horizon() const { return T_; }
    /// Inverse of map on [t0, T] (map is strictly increasing).
    double inverse(double mapped) const;

  private:
    double cumulative(double t) const;  // integral_0^t gamma^2

    RealFn gamma_;
    double T_;
    double t0_;
    std::vector<double> knots_;  // time breakpoints
    std::vector<double> cum_;    // cumulative integral of gamma^2 at knots
};

}  // namespace halfline
