#include "halfline/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "halfline/rng.hpp"

namespace halfline {

namespace {

double affine_expr(double p, double u, double x, double t, double a, const ProblemSpec& s) {
    return eval_checked(s.drift, x, t, a, "drift") * p +
           eval_checked(s.discount, x, t, a, "discount") * u +
           eval_checked(s.running_reward, x, t, a, "running_reward");
}

// Improvements below a few ulps count as ties so roundoff noise cannot steal
// the smallest-alpha tie-break.
double tie_tolerance(double a, double b) {
    return 16.0 * std::numeric_limits<double>::epsilon() *
           std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// Golden-section maximization on [lo, hi]; returns the best probe found.
HmaxResult golden_refine(double p, double u, double x, double t, const ProblemSpec& s,
                         double lo, double hi, double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = affine_expr(p, u, x, t, c, s);
    double fd = affine_expr(p, u, x, t, d, s);
    HmaxResult best{fc, c};
    if (fd > best.value) best = {fd, d};
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = affine_expr(p, u, x, t, c, s);
            if (fc > best.value) best = {fc, c};
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = affine_expr(p, u, x, t, d, s);
            if (fd > best.value) best = {fd, d};
        }
    }
    return best;
}

}  // namespace

HmaxResult eval_hmax(double p, double u, double x, double t, const ProblemSpec& spec) {
    const auto& grid = spec.controls.grid();

    // Ascending scan with strict improvement keeps the smallest maximizer.
    std::size_t best = 0;
    double best_val = affine_expr(p, u, x, t, grid[0], spec);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double v = affine_expr(p, u, x, t, grid[k], spec);
        if (v > best_val + tie_tolerance(v, best_val)) {
            best_val = v;
            best = k;
        }
    }
    HmaxResult res{best_val, grid[best]};

    if (spec.controls.is_interval() && grid.size() >= 2) {
        const double cell = grid[1] - grid[0];
        const double lo = best > 0 ? grid[best - 1] : grid[0];
        const double hi = best + 1 < grid.size() ? grid[best + 1] : grid.back();
        if (hi > lo) {
            const HmaxResult refined =
                golden_refine(p, u, x, t, spec, lo, hi, 1e-6 * cell);
            if (refined.value > res.value + tie_tolerance(refined.value, res.value))
                res = refined;
        }
    }
    return res;
}

double estimate_K(const GeneralProblem& problem, const KSampling& sampling) {
    if (sampling.n_points < 2) throw PreconditionError("estimate_K: n_points must be >= 2");
    auto rng = make_stream(sampling.seed, 0);
    std::uniform_real_distribution<double> up(sampling.p_lo, sampling.p_hi);
    std::uniform_real_distribution<double> uu(sampling.u_lo, sampling.u_hi);
    std::uniform_real_distribution<double> ux(sampling.x_lo, sampling.x_hi);
    std::uniform_real_distribution<double> ut(0.0, problem.horizon);

    const auto& H = problem.hamiltonian;
    double growth = 0.0, slope_p = 0.0, slope_u = 0.0;
    for (int k = 0; k < sampling.n_points; ++k) {
        const double p = up(rng), u = uu(rng), x = ux(rng), t = ut(rng);
        const double h0 = H(p, u, x, t);
        growth = std::max(growth, std::abs(h0) / (1.0 + std::abs(u) + std::abs(p)));

        const double p2 = up(rng);
        if (p2 != p)
            slope_p = std::max(slope_p, std::abs(H(p2, u, x, t) - h0) / std::abs(p2 - p));
        const double u2 = uu(rng);
        if (u2 != u)
            slope_u = std::max(slope_u, std::abs(H(p, u2, x, t) - h0) / std::abs(u2 - u));
    }
    return std::max(growth, slope_p + slope_u);
}

}  // namespace halfline
