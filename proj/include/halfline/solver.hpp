#pragma once

#include <cmath>

#include "halfline/fixedpoint.hpp"
#include "halfline/policy.hpp"

namespace halfline {

/// Knobs for the end-to-end control-problem solve. kappa and m_cal default to
/// NaN meaning "derive": kappa from choose_kappa(estimated K, M, safety), M
/// either calibrated on the mesh or the 2.0 fallback.
struct SolveSettings {
    double kappa = std::nan("");
    double tol = 1e-7;
    int max_iter = 200;
    double m_cal = std::nan("");
    bool calibrate_m = false;
    double safety = 1.5;
    std::uint64_t seed = 1;
};

constexpr double kDefaultMcal = 2.0;

/// to_general + estimate_K + choose_kappa + iterate + extract_policy.
Solution solve_control_problem(const ProblemSpec& spec, const Mesh& mesh,
                               const SchemeConfig& scheme, const SolveSettings& settings = {},
                               const IterationCallback& on_iteration = nullptr);

}  // namespace halfline
