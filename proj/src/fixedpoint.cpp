#include "halfline/fixedpoint.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace halfline {

namespace {

// Grid-backed field: exact nearest-node lookup, only ever queried at nodes by
// solve_linear.
ScalarField2 grid_field(const GridFunction& g) {
    return [g](double x, double t) {
        const Mesh& m = g.mesh();
        const int i = static_cast<int>(std::lround(x / m.dx()));
        const int j = static_cast<int>(std::lround(t / m.dt()));
        return g(std::clamp(j, 0, m.n_t - 1), std::clamp(i, 0, m.n_x - 1));
    };
}

}  // namespace

GridFunction default_initial_iterate(const BoundaryData& boundary, const Mesh& mesh) {
    GridFunction u(mesh);
    for (int j = 0; j < mesh.n_t; ++j) {
        u.at(j, 0) = boundary.lateral(mesh.t(j));
        for (int i = 1; i < mesh.n_x; ++i) u.at(j, i) = boundary.terminal(mesh.x(i));
    }
    if (!u.all_finite()) throw EvaluationError("boundary data is non-finite on the mesh");
    return u;
}

GridFunction apply_T(const GridFunction& u_n, const GeneralProblem& problem, const Mesh& mesh,
                     const SchemeConfig& scheme) {
    problem.require_valid();
    if (!(u_n.mesh() == mesh)) throw ShapeError("apply_T: iterate lives on a different mesh");

    const GridFunction du = dx(u_n);
    GridFunction source(mesh);
    for (int j = 0; j < mesh.n_t; ++j) {
        const double t = mesh.t(j);
        for (int i = 0; i < mesh.n_x; ++i) {
            const double h = problem.hamiltonian(du(j, i), u_n(j, i), mesh.x(i), t);
            if (!std::isfinite(h))
                throw EvaluationError("hamiltonian returned non-finite value at (x=" +
                                      std::to_string(mesh.x(i)) + ", t=" + std::to_string(t) +
                                      ")");
            source.at(j, i) = h;
        }
    }
    return solve_linear(problem.sigma, grid_field(source), problem.boundary, mesh, scheme);
}

double choose_kappa(double K, double M, double safety) {
    if (!(std::isfinite(K) && K >= 0.0)) throw PreconditionError("choose_kappa: K must be >= 0");
    if (!(std::isfinite(M) && M > 0.0)) throw PreconditionError("choose_kappa: M must be > 0");
    if (!(safety >= 1.0)) throw PreconditionError("choose_kappa: safety must be >= 1");
    const double km = K * M;
    return safety * std::max(km * km * km, 1.0);
}

Solution iterate(const GeneralProblem& problem, const Mesh& mesh, const SchemeConfig& scheme,
                 double kappa, double tol, int max_iter, std::optional<GridFunction> initial,
                 const IterationCallback& on_iteration) {
    problem.require_valid();
    if (!(kappa >= 0.0)) throw PreconditionError("iterate: kappa must be >= 0");
    if (!(tol > 0.0)) throw PreconditionError("iterate: tol must be > 0");
    if (max_iter < 1) throw PreconditionError("iterate: max_iter must be >= 1");

    GridFunction u = initial ? std::move(*initial) : default_initial_iterate(problem.boundary, mesh);
    if (!(u.mesh() == mesh)) throw ShapeError("iterate: initial iterate lives on a different mesh");

    Solution sol;
    sol.kappa_used = kappa;

    double prev_diff = -1.0;
    int growth_streak = 0;

    for (int n = 1; n <= max_iter; ++n) {
        const auto start = std::chrono::steady_clock::now();
        GridFunction next = apply_T(u, problem, mesh, scheme);

        GridFunction diff = next - u;
        const GridFunction ddiff = dx(diff);
        const double bdiff = bielecki_norm(diff, &ddiff, kappa);
        const double sdiff = diff.sup_norm();
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

        IterationRecord rec;
        rec.n = n;
        rec.bielecki_diff = bdiff;
        rec.sup_diff = sdiff;
        rec.q_estimate = (prev_diff > 0.0) ? bdiff / prev_diff : 0.0;
        rec.wall_time = elapsed.count();
        sol.diagnostics.records.push_back(rec);
        if (on_iteration) on_iteration(rec);

        u = std::move(next);

        if (bdiff <= tol) {
            sol.converged = true;
            break;
        }

        growth_streak = (prev_diff >= 0.0 && bdiff > prev_diff) ? growth_streak + 1 : 0;
        if (growth_streak >= 5)
            throw DivergenceError("iteration diverging: kappa-norm diff grew 5 consecutive "
                                  "steps, last q_estimate = " +
                                      std::to_string(rec.q_estimate),
                                  rec.q_estimate);
        prev_diff = bdiff;
    }

    sol.derivative = dx(u);
    sol.value = std::move(u);
    return sol;
}

double contraction_rate(const IterationDiagnostics& d) {
    std::vector<double> diffs;
    for (const auto& r : d.records) diffs.push_back(r.bielecki_diff);

    int nonzero = 0;
    for (double v : diffs)
        if (v > 0.0) ++nonzero;
    if (diffs.size() < 3 || nonzero < 3)
        throw InsufficientDataError("contraction_rate: need at least 3 iterations with "
                                    "nonzero diffs");

    const std::size_t tail_start = std::max<std::size_t>(1, diffs.size() / 2);
    double log_sum = 0.0;
    int count = 0;
    for (std::size_t k = tail_start; k < diffs.size(); ++k) {
        if (diffs[k] > 0.0 && diffs[k - 1] > 0.0) {
            log_sum += std::log(diffs[k] / diffs[k - 1]);
            ++count;
        }
    }
    if (count == 0)
        throw InsufficientDataError("contraction_rate: no usable consecutive ratios in the tail");
    return std::exp(log_sum / count);
}

double calibrate_M(const ScalarField2& sigma, const Mesh& mesh, const SchemeConfig& scheme,
                   double kappa) {
    const BoundaryData zero{make_constant1(0.0), make_constant1(0.0)};
    const std::vector<ScalarField2> probes = {
        make_constant2(1.0),
        [](double x, double) { return 1.0 / (1.0 + x); },
        [T = mesh.horizon](double x, double t) { return std::exp(-x) * (2.0 - t / T) / 2.0; },
    };

    double m_cal = 0.0;
    for (const auto& f : probes) {
        const GridFunction u = solve_linear(sigma, f, zero, mesh, scheme);
        const GridFunction du = dx(u);

        GridFunction fgrid(mesh);
        for (int j = 0; j < mesh.n_t; ++j)
            for (int i = 0; i < mesh.n_x; ++i) fgrid.at(j, i) = f(mesh.x(i), mesh.t(j));

        const double denom = bielecki_norm(fgrid, kappa);
        if (denom > 0.0)
            m_cal = std::max(m_cal, bielecki_norm(u, &du, kappa) * std::cbrt(kappa) / denom);
    }
    return m_cal;
}

}  // namespace halfline
