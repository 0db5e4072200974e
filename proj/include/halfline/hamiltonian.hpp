#pragma once

#include <cstdint>

#include "halfline/problem.hpp"

namespace halfline {

struct HmaxResult {
    double value = 0.0;
    double argmax = 0.0;
};

/// Maximum over the discretized control set of b(x,t,a)*p + h(x,t,a)*u +
/// l(x,t,a). Interval sets get one golden-section refinement pass on the
/// bracketing cell; a refined point is accepted only on strict improvement,
/// so ties keep resolving to the smallest alpha.
HmaxResult eval_hmax(double p, double u, double x, double t, const ProblemSpec& spec);

/// Sampling plan for the growth/Lipschitz constant estimate of a Hamiltonian.
struct KSampling {
    int n_points = 512;
    double p_lo = -5.0, p_hi = 5.0;
    double u_lo = -5.0, u_hi = 5.0;
    double x_lo = 0.0, x_hi = 5.0;
    std::uint64_t seed = 1;
};

/// Empirical constant K for |H| <= K (1 + |u| + |p|) and
/// |H(p,u,..) - H(pb,ub,..)| <= K (|u-ub| + |p-pb|): the max of the sampled
/// growth quotient and the sum of the per-variable slope estimates (the sum
/// matches the max-of-affine convention K = sup|b| + sup|h|). Deterministic
/// given the seed.
double estimate_K(const GeneralProblem& problem, const KSampling& sampling = {});

}  // namespace halfline
