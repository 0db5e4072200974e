#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "halfline/errors.hpp"

namespace halfline {

/// Coefficient field of (x, t), e.g. the diffusion sigma(x,t) or a frozen
/// source f(x,t).
using ScalarField2 = std::function<double(double x, double t)>;

/// Control-dependent coefficient of (x, t, alpha): drift b, discount hH,
/// running reward l.
using ControlledField = std::function<double(double x, double t, double alpha)>;

/// One-argument field for boundary data.
using ScalarField1 = std::function<double(double)>;

inline double eval_checked(const ScalarField2& f, double x, double t, const char* name) {
    const double v = f(x, t);
    if (!std::isfinite(v))
        throw EvaluationError(std::string(name) + " returned non-finite value at (x=" +
                              std::to_string(x) + ", t=" + std::to_string(t) + ")");
    return v;
}

inline double eval_checked(const ControlledField& f, double x, double t, double a,
                           const char* name) {
    const double v = f(x, t, a);
    if (!std::isfinite(v))
        throw EvaluationError(std::string(name) + " returned non-finite value at (x=" +
                              std::to_string(x) + ", t=" + std::to_string(t) +
                              ", alpha=" + std::to_string(a) + ")");
    return v;
}

/// Compact control set A, one-dimensional: either an interval [lo, hi]
/// discretized with n_grid points, or an explicit finite list (kept sorted
/// ascending so smallest-alpha tie-breaking is a plain scan).
class ControlSet {
  public:
    static ControlSet interval(double lo, double hi, int n_grid = 33);
    static ControlSet finite(std::vector<double> values);

    bool is_interval() const { return is_interval_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    int n_grid() const { return n_grid_; }

    /// Discretization used by the Hamiltonian argmax scan, ascending.
    const std::vector<double>& grid() const { return grid_; }

    bool contains(double a, double tol = 1e-9) const;

  private:
    ControlSet() = default;
    bool is_interval_ = true;
    double lo_ = 0.0, hi_ = 0.0;
    int n_grid_ = 0;
    std::vector<double> grid_;
};

/// Boundary data beta on the parabolic boundary: terminal part beta(x, T) on
/// x >= 0 and lateral part beta(0, t) on t in [0, T]. The two must agree at
/// the corner (0, T).
struct BoundaryData {
    ScalarField1 terminal;
    ScalarField1 lateral;
};

/// Throws PreconditionError unless |terminal(0) - lateral(T)| <= tol.
void check_corner_consistency(const BoundaryData& b, double T, double tol = 1e-12);

// -- Named field builders ----------------------------------------------------
// These back the config file's `kind` selector and are also handy in tests.

ScalarField2 make_constant2(double c);
ControlledField make_constant3(double c);
ScalarField1 make_constant1(double c);

/// Monomial coefficients up to total degree 2 in (x, t):
/// c + cx*x + ct*t + cxx*x^2 + cxt*x*t + ctt*t^2.
struct Poly2 {
    double c = 0, cx = 0, ct = 0, cxx = 0, cxt = 0, ctt = 0;
};
ScalarField2 make_poly2(const Poly2& p);

/// Monomials up to total degree 2 in (x, t, a).
struct Poly3 {
    double c = 0, cx = 0, ct = 0, ca = 0;
    double cxx = 0, cxt = 0, cxa = 0, ctt = 0, cta = 0, caa = 0;
};
ControlledField make_poly3(const Poly3& p);

struct Poly1 {
    double c = 0, c1 = 0, c2 = 0;
};
ScalarField1 make_poly1(const Poly1& p);

/// scale * exp(gx*x + gt*t [+ ga*a]) clamped to [lo, hi].
struct ClampedExp {
    double scale = 1.0, gx = 0.0, gt = 0.0, ga = 0.0;
    double lo = -1e300, hi = 1e300;
};
ScalarField2 make_clamped_exp2(const ClampedExp& e);
ControlledField make_clamped_exp3(const ClampedExp& e);
ScalarField1 make_clamped_exp1(const ClampedExp& e);

/// Piecewise-linear table in a single coordinate, clamped outside the knots.
/// Knot abscissae must be strictly increasing.
ScalarField1 make_table1(std::vector<double> knots, std::vector<double> values);

}  // namespace halfline
