#include "halfline/fields.hpp"

#include <algorithm>
#include <cmath>

namespace halfline {

ControlSet ControlSet::interval(double lo, double hi, int n_grid) {
    if (!(lo <= hi)) throw PreconditionError("control interval requires lo <= hi");
    if (n_grid < 2) throw PreconditionError("control interval requires n_grid >= 2");
    ControlSet s;
    s.is_interval_ = true;
    s.lo_ = lo;
    s.hi_ = hi;
    s.n_grid_ = n_grid;
    s.grid_.resize(static_cast<std::size_t>(n_grid));
    for (int k = 0; k < n_grid; ++k)
        s.grid_[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (n_grid - 1);
    s.grid_.back() = hi;
    return s;
}

ControlSet ControlSet::finite(std::vector<double> values) {
    if (values.empty()) throw PreconditionError("finite control set must be nonempty");
    std::sort(values.begin(), values.end());
    if (std::adjacent_find(values.begin(), values.end()) != values.end())
        throw PreconditionError("finite control set has duplicate values");
    ControlSet s;
    s.is_interval_ = false;
    s.lo_ = values.front();
    s.hi_ = values.back();
    s.n_grid_ = static_cast<int>(values.size());
    s.grid_ = std::move(values);
    return s;
}

bool ControlSet::contains(double a, double tol) const {
    if (is_interval_) return a >= lo_ - tol && a <= hi_ + tol;
    for (double v : grid_)
        if (std::abs(v - a) <= tol) return true;
    return false;
}

void check_corner_consistency(const BoundaryData& b, double T, double tol) {
    const double c0 = b.terminal(0.0);
    const double c1 = b.lateral(T);
    if (!std::isfinite(c0) || !std::isfinite(c1))
        throw EvaluationError("boundary data non-finite at the corner (0, T)");
    if (std::abs(c0 - c1) > tol)
        throw PreconditionError("boundary data inconsistent at corner (0, T): terminal(0)=" +
                                std::to_string(c0) + " vs lateral(T)=" + std::to_string(c1));
}

ScalarField2 make_constant2(double c) {
    return [c](double, double) { return c; };
}
ControlledField make_constant3(double c) {
    return [c](double, double, double) { return c; };
}
ScalarField1 make_constant1(double c) {
    return [c](double) { return c; };
}

ScalarField2 make_poly2(const Poly2& p) {
    return [p](double x, double t) {
        return p.c + p.cx * x + p.ct * t + p.cxx * x * x + p.cxt * x * t + p.ctt * t * t;
    };
}

ControlledField make_poly3(const Poly3& p) {
    return [p](double x, double t, double a) {
        return p.c + p.cx * x + p.ct * t + p.ca * a + p.cxx * x * x + p.cxt * x * t +
               p.cxa * x * a + p.ctt * t * t + p.cta * t * a + p.caa * a * a;
    };
}

ScalarField1 make_poly1(const Poly1& p) {
    return [p](double s) { return p.c + p.c1 * s + p.c2 * s * s; };
}

namespace {
double clamped_exp(const ClampedExp& e, double arg) {
    return std::min(e.hi, std::max(e.lo, e.scale * std::exp(arg)));
}
}  // namespace

ScalarField2 make_clamped_exp2(const ClampedExp& e) {
    return [e](double x, double t) { return clamped_exp(e, e.gx * x + e.gt * t); };
}
ControlledField make_clamped_exp3(const ClampedExp& e) {
    return [e](double x, double t, double a) {
        return clamped_exp(e, e.gx * x + e.gt * t + e.ga * a);
    };
}
ScalarField1 make_clamped_exp1(const ClampedExp& e) {
    return [e](double s) { return clamped_exp(e, e.gx * s); };
}

ScalarField1 make_table1(std::vector<double> knots, std::vector<double> values) {
    if (knots.size() != values.size() || knots.size() < 2)
        throw PreconditionError("table field needs >= 2 knots and matching value count");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i] > knots[i - 1]))
            throw PreconditionError("table knots must be strictly increasing");
    return [k = std::move(knots), v = std::move(values)](double s) {
        if (s <= k.front()) return v.front();
        if (s >= k.back()) return v.back();
        auto it = std::upper_bound(k.begin(), k.end(), s);
        const std::size_t j = static_cast<std::size_t>(it - k.begin());
        const double w = (s - k[j - 1]) / (k[j] - k[j - 1]);
        return v[j - 1] + w * (v[j] - v[j - 1]);
    };
}

}  // namespace halfline
