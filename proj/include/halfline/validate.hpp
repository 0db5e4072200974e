#pragma once

#include <string>
#include <vector>

#include "halfline/montecarlo.hpp"
#include "halfline/problem.hpp"

namespace halfline {

/// Randomized sampling plan for the assumption checks. The point cloud always
/// includes the range corners so boundary degeneracies (e.g. sigma vanishing
/// at x = 0) are caught deterministically.
struct SamplingPlan {
    int n_points = 256;
    double x_lo = 0.0;
    double x_hi = 4.0;
    std::uint64_t seed = 1;
    bool check_exit_lipschitz = false;  // A4/B4 is costly; off by default
    McConfig mc{};                      // used only by the A4/B4 check
};

/// User-declared constants the sampled estimates are judged against. The
/// defaults are permissive; declare tighter values to make the checks bite.
struct DeclaredBounds {
    double sigma_min = 1e-8;
    double sigma_max = 1e8;
    double lip_sigma = 1e8;
    double beta_bound = 1e8;
    double lip_beta = 1e8;
    double growth_K = 1e8;
    double lip_coeffs = 1e8;   // shared bound for b, h, l (B3)
    double coeff_bound = 1e8;  // sup bound for |b|, |h|, |l| (B3)
    double lip_exit = 1e8;     // A4/B4 constant L
};

struct AssumptionEntry {
    std::string id;          // "A1".."A4" or "B1".."B4"
    bool pass = false;
    bool checked = true;     // false when the check was skipped (A4 off)
    double estimate = 0.0;   // headline estimated constant for this assumption
    std::string detail;      // human-readable estimates
    std::string worst_pair;  // sample evidence for the binding quotient
};

struct ValidationReport {
    std::vector<AssumptionEntry> entries;

    bool all_pass() const {
        for (const auto& e : entries)
            if (e.checked && !e.pass) return false;
        return true;
    }
};

/// Empirical checks of B1)-B4) for a controlled problem. Lipschitz and
/// boundedness estimates are sampled, not certified; results are
/// deterministic given the seed.
ValidationReport validate_assumptions(const ProblemSpec& spec, const SamplingPlan& plan,
                                      const DeclaredBounds& bounds = {});

/// Empirical checks of A1)-A4) for a semilinear problem.
ValidationReport validate_assumptions(const GeneralProblem& problem, const SamplingPlan& plan,
                                      const DeclaredBounds& bounds = {});

}  // namespace halfline
