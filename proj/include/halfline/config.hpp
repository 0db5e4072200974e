#pragma once

#include <map>
#include <string>
#include <vector>

#include "halfline/montecarlo.hpp"
#include "halfline/pde.hpp"
#include "halfline/problem.hpp"
#include "halfline/solver.hpp"
#include "halfline/validate.hpp"

namespace halfline {

/// Structure the config loader could prove about the problem from the field
/// kinds; lets `verify` decide when a closed-form benchmark applies.
struct StructureHints {
    bool sigma_constant = false;
    double sigma_value = 0.0;
    bool drift_zero = false;
    bool discount_zero = false;
    bool reward_constant = false;
    double reward_value = 0.0;
    bool beta_zero = false;
};

/// Everything a CLI run needs, loaded from one config file.
struct RunConfig {
    ProblemSpec spec;
    StructureHints hints;
    Mesh mesh{8.0, 161, 401, 1.0};
    SchemeConfig scheme{};
    SolveSettings solve{};
    McConfig mc{};
    SamplingPlan plan{};
    DeclaredBounds bounds{};
};

/// Parses the sectioned key-value config format. Sections: problem, sigma,
/// drift, discount, reward, boundary_terminal, boundary_lateral, mesh,
/// scheme, iteration, montecarlo, assumptions. Unknown sections or keys are
/// errors; messages carry 1-based line numbers.
RunConfig load_config(const std::string& path);

}  // namespace halfline
