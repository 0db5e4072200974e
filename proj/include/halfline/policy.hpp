#pragma once

#include "halfline/montecarlo.hpp"
#include "halfline/problem.hpp"

namespace halfline {

/// Argmax feedback policy on the solution grid: at each node stores the
/// maximizer of b*p + h*u + l with p = du, tie-broken to the smallest alpha.
FeedbackPolicy extract_policy(const GridFunction& u, const GridFunction& du,
                              const ProblemSpec& spec);

}  // namespace halfline
