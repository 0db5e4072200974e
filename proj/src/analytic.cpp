#include "halfline/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "halfline/quadrature.hpp"

namespace halfline {

double bm_truncated_exit(double x, double t, double T) {
    if (x < 0.0) throw PreconditionError("bm_truncated_exit: x must be >= 0");
    if (t > T) throw PreconditionError("bm_truncated_exit: t must be <= T");
    const double window = T - t;
    if (window <= 0.0 || x == 0.0) return t;
    // P(tau > s) = 2 Phi(x / sqrt(s - t)) - 1 = erf(x / sqrt(2 (s - t))).
    const auto survival = [x](double v) { return std::erf(x / std::sqrt(2.0 * v)); };
    return t + adaptive_gk15(survival, 0.0, window, 1e-10);
}

double bm_lipschitz_bound(double T) {
    if (T < 0.0) throw PreconditionError("bm_lipschitz_bound: T must be >= 0");
    return std::sqrt(T / M_PI);
}

double bm_exit_sharp_lipschitz_bound(double T) {
    if (T < 0.0) throw PreconditionError("bm_exit_sharp_lipschitz_bound: T must be >= 0");
    return 2.0 * std::sqrt(2.0 * T / M_PI);
}

// -- Lamperti -----------------------------------------------------------------

LampertiTransform::LampertiTransform(RealFn sigma, RealFn sigma_prime, double x_lo, double x_hi,
                                     int cells_per_unit)
    : sigma_(std::move(sigma)), sigma_prime_(std::move(sigma_prime)), x_lo_(x_lo), x_hi_(x_hi) {
    if (!(x_hi_ > x_lo_)) throw PreconditionError("LampertiTransform: empty working range");
    if (!(x_lo_ <= 0.0 && x_hi_ >= 0.0))
        throw PreconditionError("LampertiTransform: working range must contain 0");
    if (cells_per_unit < 1) throw PreconditionError("LampertiTransform: cells_per_unit >= 1");

    const int n_cells =
        std::max(2, static_cast<int>(std::ceil((x_hi_ - x_lo_) * cells_per_unit)));
    knots_.resize(static_cast<std::size_t>(n_cells) + 1);
    for (int k = 0; k <= n_cells; ++k)
        knots_[static_cast<std::size_t>(k)] = x_lo_ + (x_hi_ - x_lo_) * k / n_cells;
    knots_.back() = x_hi_;

    const auto integrand = [this](double z) {
        const double s = sigma_(z);
        if (!(s > 0.0))
            throw PreconditionError("LampertiTransform: sigma must be positive, got " +
                                    std::to_string(s) + " at x=" + std::to_string(z));
        return 1.0 / s;
    };

    // Cumulative table anchored at zeta(x_lo); shift so zeta(0) = 0.
    zvals_.resize(knots_.size());
    zvals_[0] = 0.0;
    for (std::size_t k = 1; k < knots_.size(); ++k)
        zvals_[k] = zvals_[k - 1] + adaptive_gk15(integrand, knots_[k - 1], knots_[k], 1e-13);
    const double at_zero = zeta_raw_(0.0);
    for (double& z : zvals_) z -= at_zero;
}

double LampertiTransform::zeta(double x) const {
    if (x < x_lo_ - 1e-12 || x > x_hi_ + 1e-12)
        throw PreconditionError("LampertiTransform::zeta: x outside the working range");
    return zeta_raw_(std::clamp(x, x_lo_, x_hi_));
}

double LampertiTransform::zeta_raw_(double x) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    std::size_t j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - knots_.begin())) - 1;
    j = std::min(j, knots_.size() - 2);
    const auto integrand = [this](double z) { return 1.0 / sigma_(z); };
    return zvals_[j] + adaptive_gk15(integrand, knots_[j], x, 1e-13);
}

double LampertiTransform::zeta_inv(double y) const {
    const double y_lo = zvals_.front();
    const double y_hi = zvals_.back();
    if (y < y_lo - 1e-12 || y > y_hi + 1e-12)
        throw PreconditionError("LampertiTransform::zeta_inv: y outside the working range");

    double a = x_lo_, b = x_hi_;
    double x = 0.5 * (a + b);
    for (int iter = 0; iter < 200; ++iter) {
        const double fz = zeta_raw_(std::clamp(x, a, b)) - y;
        if (fz > 0.0)
            b = x;
        else
            a = x;
        // Newton step with zeta' = 1/sigma, kept inside the bracket.
        const double step = -fz * sigma_(std::clamp(x, x_lo_, x_hi_));
        double x_new = x + step;
        if (!(x_new > a && x_new < b)) x_new = 0.5 * (a + b);
        if (std::abs(x_new - x) <= 1e-12 * (1.0 + std::abs(x_new))) return x_new;
        x = x_new;
    }
    return x;
}

double LampertiTransform::transformed_drift(double y) const {
    return -0.5 * sigma_prime_(zeta_inv(y));
}

// -- Time change --------------------------------------------------------------

TimeChange::TimeChange(RealFn gamma, double T, int cells) : gamma_(std::move(gamma)), T_(T) {
    if (!(T_ > 0.0)) throw PreconditionError("TimeChange: T must be > 0");
    if (cells < 2) throw PreconditionError("TimeChange: cells must be >= 2");

    knots_.resize(static_cast<std::size_t>(cells) + 1);
    for (int k = 0; k <= cells; ++k)
        knots_[static_cast<std::size_t>(k)] = T_ * k / cells;
    knots_.back() = T_;

    // Sampled stand-in for "bounded away from zero": scan a grid finer than
    // the quadrature cells.
    const int scan = 8 * cells;
    for (int k = 0; k <= scan; ++k) {
        const double s = T_ * k / scan;
        if (!(std::abs(gamma_(s)) > 1e-8))
            throw PreconditionError("TimeChange: gamma vanishes near s=" + std::to_string(s));
    }

    const auto g2 = [this](double s) {
        const double g = gamma_(s);
        return g * g;
    };

    cum_.resize(knots_.size());
    cum_[0] = 0.0;
    for (std::size_t k = 1; k < knots_.size(); ++k)
        cum_[k] = cum_[k - 1] + adaptive_gk15(g2, knots_[k - 1], knots_[k], 1e-12);
    t0_ = T_ - cum_.back();
}

double TimeChange::cumulative(double t) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    std::size_t j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - knots_.begin())) - 1;
    j = std::min(j, knots_.size() - 2);
    const auto g2 = [this](double s) {
        const double g = gamma_(s);
        return g * g;
    };
    return cum_[j] + adaptive_gk15(g2, knots_[j], t, 1e-12);
}

double TimeChange::map(double t) const {
    if (t < 0.0 || t > T_) throw PreconditionError("TimeChange::map: t outside [0, T]");
    if (t == T_) return T_;
    if (t == 0.0) return t0_;
    return T_ - (cum_.back() - cumulative(t));
}

double TimeChange::inverse(double mapped) const {
    if (mapped < t0_ - 1e-12 || mapped > T_ + 1e-12)
        throw PreconditionError("TimeChange::inverse: value outside [t0, T]");
    double a = 0.0, b = T_;
    for (int iter = 0; iter < 200; ++iter) {
        const double m = 0.5 * (a + b);
        const double v = map(m);
        if (std::abs(v - mapped) <= 1e-12 * (1.0 + std::abs(mapped))) return m;
        if (v < mapped)
            a = m;
        else
            b = m;
    }
    return 0.5 * (a + b);
}

}  // namespace halfline
