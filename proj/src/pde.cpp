#include "halfline/pde.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace halfline {

namespace {

// Thomas elimination for a tridiagonal system; lower[i] multiplies u_{i-1}
// in row i, upper[i] multiplies u_{i+1}. Overwrites rhs with the solution.
void solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                       std::vector<double>& upper, std::vector<double>& rhs, int time_level) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double piv = diag[i - 1];
        if (std::abs(piv) < 1e-300)
            throw NumericalError("singular tridiagonal system at time level " +
                                 std::to_string(time_level));
        const double m = lower[i] / piv;
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    if (std::abs(diag[n - 1]) < 1e-300)
        throw NumericalError("singular tridiagonal system at time level " +
                             std::to_string(time_level));
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

double closure_value(FarField ff, const GridFunction& u, int j) {
    const int n = u.n_x();
    if (ff == FarField::homogeneous_neumann) return u(j, n - 2);
    return 2.0 * u(j, n - 2) - u(j, n - 3);
}

}  // namespace

GridFunction solve_linear(const ScalarField2& sigma, const ScalarField2& source,
                          const BoundaryData& boundary, const Mesh& mesh,
                          const SchemeConfig& scheme) {
    scheme.require_valid();
    check_corner_consistency(boundary, mesh.horizon);

    const int nx = mesh.n_x;
    const int nt = mesh.n_t;
    const double dxm = mesh.dx();
    const double dtm = mesh.dt();
    const double theta = scheme.theta;
    const bool extrap = scheme.far_field != FarField::homogeneous_neumann;

    GridFunction u(mesh);

    // Terminal row and the corner come straight from beta.
    for (int i = 0; i < nx; ++i) u.at(nt - 1, i) = boundary.terminal(mesh.x(i));
    if (!u.all_finite()) throw EvaluationError("terminal boundary data is non-finite");

    // Per-level coefficient caches. a = sigma^2/2, lam = a*dt/dx^2.
    std::vector<double> lam0(static_cast<std::size_t>(nx)), lam1(static_cast<std::size_t>(nx));
    std::vector<double> f0(static_cast<std::size_t>(nx)), f1(static_cast<std::size_t>(nx));
    auto fill_level = [&](int j, std::vector<double>& lam, std::vector<double>& f) {
        const double t = mesh.t(j);
        for (int i = 0; i < nx; ++i) {
            const double s = eval_checked(sigma, mesh.x(i), t, "sigma");
            if (!(s * s > 0.0))
                throw PreconditionError("sigma^2 must be positive on the grid; got sigma=" +
                                        std::to_string(s) + " at (x=" + std::to_string(mesh.x(i)) +
                                        ", t=" + std::to_string(t) + ")");
            lam[static_cast<std::size_t>(i)] = 0.5 * s * s * dtm / (dxm * dxm);
            f[static_cast<std::size_t>(i)] = eval_checked(source, mesh.x(i), t, "source");
        }
    };

    fill_level(nt - 1, lam1, f1);

    const int m = nx - 2;  // unknowns i = 1..nx-2
    std::vector<double> lower(static_cast<std::size_t>(m)), diag(static_cast<std::size_t>(m)),
        upper(static_cast<std::size_t>(m)), rhs(static_cast<std::size_t>(m));

    for (int j = nt - 2; j >= 0; --j) {
        fill_level(j, lam0, f0);
        const double t0 = mesh.t(j);

        for (int i = 1; i <= nx - 2; ++i) {
            const std::size_t r = static_cast<std::size_t>(i - 1);
            const double li = theta * lam0[static_cast<std::size_t>(i)];
            lower[r] = -li;
            diag[r] = 1.0 + 2.0 * li;
            upper[r] = -li;

            double b = u(j + 1, i);
            if (theta < 1.0) {
                const double d2 = u(j + 1, i - 1) - 2.0 * u(j + 1, i) + u(j + 1, i + 1);
                b += (1.0 - theta) * lam1[static_cast<std::size_t>(i)] * d2;
            }
            b += dtm * (theta * f0[static_cast<std::size_t>(i)] +
                        (1.0 - theta) * f1[static_cast<std::size_t>(i)]);
            rhs[r] = b;
        }

        // Dirichlet value at x = 0 folds into the first row.
        const double left = boundary.lateral(t0);
        if (!std::isfinite(left)) throw EvaluationError("lateral boundary data is non-finite");
        rhs[0] -= lower[0] * left;
        lower[0] = 0.0;

        // Far-field closure eliminates the last column.
        if (extrap) {
            // u_{n-1} = 2 u_{n-2} - u_{n-3}: the last interior row collapses
            // to a pure time integration (its second difference vanishes).
            diag[static_cast<std::size_t>(m - 1)] += 2.0 * upper[static_cast<std::size_t>(m - 1)];
            if (m >= 2)
                lower[static_cast<std::size_t>(m - 1)] -= upper[static_cast<std::size_t>(m - 1)];
            else
                rhs[0] += upper[0] * left;  // u_{n-3} is the Dirichlet node here
        } else {
            diag[static_cast<std::size_t>(m - 1)] += upper[static_cast<std::size_t>(m - 1)];
        }
        upper[static_cast<std::size_t>(m - 1)] = 0.0;

        solve_tridiagonal(lower, diag, upper, rhs, j);

        u.at(j, 0) = left;
        for (int i = 1; i <= nx - 2; ++i) u.at(j, i) = rhs[static_cast<std::size_t>(i - 1)];
        u.at(j, nx - 1) = closure_value(scheme.far_field, u, j);

        lam0.swap(lam1);
        f0.swap(f1);
    }

    if (!u.all_finite()) throw NumericalError("solve_linear produced non-finite values");
    return u;
}

GridFunction dx(const GridFunction& g) {
    const Mesh& m = g.mesh();
    if (m.n_x < 3) throw PreconditionError("dx requires n_x >= 3");
    const double h = m.dx();
    GridFunction d(m);
    for (int j = 0; j < m.n_t; ++j) {
        d.at(j, 0) = (-3.0 * g(j, 0) + 4.0 * g(j, 1) - g(j, 2)) / (2.0 * h);
        for (int i = 1; i < m.n_x - 1; ++i) d.at(j, i) = (g(j, i + 1) - g(j, i - 1)) / (2.0 * h);
        d.at(j, m.n_x - 1) =
            (3.0 * g(j, m.n_x - 1) - 4.0 * g(j, m.n_x - 2) + g(j, m.n_x - 3)) / (2.0 * h);
    }
    return d;
}

double bielecki_norm(const GridFunction& g, const GridFunction* gprime, double kappa) {
    if (!(kappa >= 0.0)) throw PreconditionError("bielecki_norm: kappa must be >= 0");
    if (gprime) g.require_same_mesh(*gprime);
    const Mesh& m = g.mesh();
    double part_u = 0.0, part_du = 0.0;
    for (int j = 0; j < m.n_t; ++j) {
        const double w = std::exp(-kappa * (m.horizon - m.t(j)));
        if (w == 0.0) continue;
        for (int i = 0; i < m.n_x; ++i) {
            part_u = std::max(part_u, w * std::abs(g(j, i)));
            if (gprime) part_du = std::max(part_du, w * std::abs((*gprime)(j, i)));
        }
    }
    return part_u + part_du;
}

}  // namespace halfline
