#include "halfline/validate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "halfline/hamiltonian.hpp"
#include "halfline/rng.hpp"

namespace halfline {

namespace {

struct Point {
    double x, t;
};

std::string fmt_pair(const Point& a, const Point& b) {
    std::ostringstream os;
    os << "(x=" << a.x << ", t=" << a.t << ") vs (x=" << b.x << ", t=" << b.t << ")";
    return os.str();
}

std::vector<Point> sample_cloud(const SamplingPlan& plan, double T, std::mt19937_64& rng) {
    if (plan.n_points < 2) throw PreconditionError("validate_assumptions: n_points must be >= 2");
    if (!(plan.x_hi > plan.x_lo))
        throw PreconditionError("validate_assumptions: x range must be nonempty");
    std::vector<Point> pts = {{plan.x_lo, 0.0}, {plan.x_lo, T}, {plan.x_hi, 0.0}, {plan.x_hi, T}};
    std::uniform_real_distribution<double> ux(plan.x_lo, plan.x_hi);
    std::uniform_real_distribution<double> ut(0.0, T);
    for (int k = 0; k < plan.n_points; ++k) pts.push_back({ux(rng), ut(rng)});
    return pts;
}

AssumptionEntry check_sigma(const std::string& id, const ScalarField2& sigma, double T,
                            const SamplingPlan& plan, const DeclaredBounds& bounds,
                            std::mt19937_64& rng) {
    AssumptionEntry e;
    e.id = id;
    const auto pts = sample_cloud(plan, T, rng);

    double inf_s = 1e308, sup_s = -1e308, lip = 0.0;
    Point inf_at{0, 0};
    Point worst_a{0, 0}, worst_b{0, 0};
    std::vector<double> vals(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        vals[k] = eval_checked(sigma, pts[k].x, pts[k].t, "sigma");
        if (vals[k] < inf_s) {
            inf_s = vals[k];
            inf_at = pts[k];
        }
        sup_s = std::max(sup_s, vals[k]);
    }
    for (std::size_t k = 1; k < pts.size(); ++k) {
        const double den = std::abs(pts[k].x - pts[k - 1].x) + std::abs(pts[k].t - pts[k - 1].t);
        if (den < 1e-14) continue;
        const double q = std::abs(vals[k] - vals[k - 1]) / den;
        if (q > lip) {
            lip = q;
            worst_a = pts[k - 1];
            worst_b = pts[k];
        }
    }

    e.estimate = lip;
    e.pass = inf_s >= bounds.sigma_min && sup_s <= bounds.sigma_max && lip <= bounds.lip_sigma;
    std::ostringstream os;
    os << "inf sigma=" << inf_s << " at (x=" << inf_at.x << ", t=" << inf_at.t
       << "), sup sigma=" << sup_s << ", Lipschitz quotient=" << lip << " [empirical]";
    e.detail = os.str();
    e.worst_pair = fmt_pair(worst_a, worst_b);
    return e;
}

AssumptionEntry check_beta(const std::string& id, const BoundaryData& beta, double T,
                           const SamplingPlan& plan, const DeclaredBounds& bounds,
                           std::mt19937_64& rng) {
    AssumptionEntry e;
    e.id = id;

    const double corner_gap = std::abs(beta.terminal(0.0) - beta.lateral(T));
    const double x_hi = std::max(plan.x_hi, 1.0);

    std::uniform_real_distribution<double> ux(0.0, x_hi);
    std::uniform_real_distribution<double> ut(0.0, T);

    // Points on the parabolic boundary: (x, T) terminal and (0, t) lateral.
    std::vector<Point> pts = {{0.0, T}, {x_hi, T}, {0.0, 0.0}};
    std::vector<double> vals;
    for (int k = 0; k < plan.n_points; ++k) {
        if (k % 2 == 0)
            pts.push_back({ux(rng), T});
        else
            pts.push_back({0.0, ut(rng)});
    }
    vals.reserve(pts.size());
    double sup_b = 0.0;
    for (const auto& p : pts) {
        const double v = p.t == T && p.x > 0.0 ? beta.terminal(p.x)
                                               : (p.x == 0.0 && p.t < T ? beta.lateral(p.t)
                                                                        : beta.terminal(p.x));
        if (!std::isfinite(v)) throw EvaluationError("boundary data returned non-finite value");
        vals.push_back(v);
        sup_b = std::max(sup_b, std::abs(v));
    }

    double lip = 0.0;
    Point worst_a{0, 0}, worst_b{0, 0};
    for (std::size_t a = 0; a < pts.size(); ++a) {
        const std::size_t b = (a + 1) % pts.size();
        const double den = std::abs(pts[a].x - pts[b].x) + std::abs(pts[a].t - pts[b].t);
        if (den < 1e-14) continue;
        const double q = std::abs(vals[a] - vals[b]) / den;
        if (q > lip) {
            lip = q;
            worst_a = pts[a];
            worst_b = pts[b];
        }
    }

    e.estimate = lip;
    e.pass = corner_gap <= 1e-12 && sup_b <= bounds.beta_bound && lip <= bounds.lip_beta;
    std::ostringstream os;
    os << "sup|beta|=" << sup_b << ", Lipschitz quotient=" << lip
       << ", corner gap=" << corner_gap << " [empirical]";
    e.detail = os.str();
    e.worst_pair = fmt_pair(worst_a, worst_b);
    return e;
}

AssumptionEntry check_exit_lipschitz(const std::string& id, const ScalarField2& sigma, double T,
                                     const SamplingPlan& plan, const DeclaredBounds& bounds) {
    AssumptionEntry e;
    e.id = id;
    if (!plan.check_exit_lipschitz) {
        e.checked = false;
        e.pass = true;
        e.detail = "skipped (enable check_exit_lipschitz to sample E[tau ^ T] quotients)";
        return e;
    }

    const double lo = std::max(0.0, plan.x_lo);
    const double hi = std::max(lo + 0.5, plan.x_hi);
    constexpr int kLadder = 6;
    std::vector<double> xs(kLadder), mean(kLadder), se(kLadder);
    for (int k = 0; k < kLadder; ++k) {
        xs[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (kLadder - 1);
        const McEstimate est =
            expected_exit_time(xs[static_cast<std::size_t>(k)], 0.0, sigma, T, plan.mc);
        mean[static_cast<std::size_t>(k)] = est.mean;
        se[static_cast<std::size_t>(k)] = est.stderr_;
    }

    double quot = 0.0, margin = 0.0;
    Point worst_a{0, 0}, worst_b{0, 0};
    for (int a = 0; a < kLadder; ++a)
        for (int b = a + 1; b < kLadder; ++b) {
            const double dxab = xs[static_cast<std::size_t>(b)] - xs[static_cast<std::size_t>(a)];
            const double q = std::abs(mean[static_cast<std::size_t>(b)] -
                                      mean[static_cast<std::size_t>(a)]) /
                             dxab;
            if (q > quot) {
                quot = q;
                margin = 3.0 *
                         std::hypot(se[static_cast<std::size_t>(a)],
                                    se[static_cast<std::size_t>(b)]) /
                         dxab;
                worst_a = {xs[static_cast<std::size_t>(a)], 0.0};
                worst_b = {xs[static_cast<std::size_t>(b)], 0.0};
            }
        }

    e.estimate = quot;
    e.pass = quot <= bounds.lip_exit + margin;
    std::ostringstream os;
    os << "max |E[tau^T](x)-E[tau^T](x')| / |x-x'| = " << quot << " (+3se margin " << margin
       << ") on x in [" << lo << ", " << hi << "] [Monte Carlo]";
    e.detail = os.str();
    e.worst_pair = fmt_pair(worst_a, worst_b);
    return e;
}

}  // namespace

ValidationReport validate_assumptions(const GeneralProblem& problem, const SamplingPlan& plan,
                                      const DeclaredBounds& bounds) {
    problem.require_valid();
    auto rng = make_stream(plan.seed, 0);
    ValidationReport rep;
    rep.entries.push_back(check_sigma("A1", problem.sigma, problem.horizon, plan, bounds, rng));
    rep.entries.push_back(check_beta("A2", problem.boundary, problem.horizon, plan, bounds, rng));

    {
        AssumptionEntry e;
        e.id = "A3";
        KSampling ks;
        ks.n_points = std::max(32, plan.n_points);
        ks.x_lo = plan.x_lo;
        ks.x_hi = plan.x_hi;
        ks.seed = plan.seed + 1;
        const double khat = estimate_K(problem, ks);
        e.estimate = khat;
        e.pass = khat <= bounds.growth_K;
        std::ostringstream os;
        os << "estimated K=" << khat << " (growth and (p,u)-Lipschitz quotients) [empirical]";
        e.detail = os.str();
        rep.entries.push_back(e);
    }

    rep.entries.push_back(
        check_exit_lipschitz("A4", problem.sigma, problem.horizon, plan, bounds));
    return rep;
}

ValidationReport validate_assumptions(const ProblemSpec& spec, const SamplingPlan& plan,
                                      const DeclaredBounds& bounds) {
    spec.require_valid();
    auto rng = make_stream(plan.seed, 0);
    ValidationReport rep;
    rep.entries.push_back(check_sigma("B1", spec.sigma, spec.horizon, plan, bounds, rng));
    rep.entries.push_back(check_beta("B2", spec.boundary, spec.horizon, plan, bounds, rng));

    {
        AssumptionEntry e;
        e.id = "B3";
        const auto pts = sample_cloud(plan, spec.horizon, rng);
        const auto& alphas = spec.controls.grid();

        double sup_c = 0.0, lip = 0.0;
        Point worst_a{0, 0}, worst_b{0, 0};
        const ControlledField* fields[3] = {&spec.drift, &spec.discount, &spec.running_reward};
        const char* names[3] = {"drift", "discount", "running_reward"};
        for (int fi = 0; fi < 3; ++fi) {
            for (double a : alphas) {
                double prev = 0.0;
                bool have_prev = false;
                Point prev_pt{0, 0};
                for (const auto& p : pts) {
                    const double v = eval_checked(*fields[fi], p.x, p.t, a, names[fi]);
                    sup_c = std::max(sup_c, std::abs(v));
                    if (have_prev) {
                        const double den =
                            std::abs(p.x - prev_pt.x) + std::abs(p.t - prev_pt.t);
                        if (den > 1e-14) {
                            const double q = std::abs(v - prev) / den;
                            if (q > lip) {
                                lip = q;
                                worst_a = prev_pt;
                                worst_b = p;
                            }
                        }
                    }
                    prev = v;
                    prev_pt = p;
                    have_prev = true;
                }
            }
        }
        e.estimate = lip;
        e.pass = sup_c <= bounds.coeff_bound && lip <= bounds.lip_coeffs;
        std::ostringstream os;
        os << "sup|b,h,l|=" << sup_c << ", Lipschitz quotient=" << lip
           << " over " << alphas.size() << " controls [empirical]";
        e.detail = os.str();
        e.worst_pair = fmt_pair(worst_a, worst_b);
        rep.entries.push_back(e);
    }

    rep.entries.push_back(check_exit_lipschitz("B4", spec.sigma, spec.horizon, plan, bounds));
    return rep;
}

}  // namespace halfline
