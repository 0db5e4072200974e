#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "halfline/montecarlo.hpp"
#include "halfline/pde.hpp"
#include "halfline/problem.hpp"

namespace halfline {

struct IterationRecord {
    int n = 0;                  // iteration index, 1-based
    double bielecki_diff = 0.0; // kappa-norm of u_{n+1} - u_n incl. derivative part
    double sup_diff = 0.0;
    double q_estimate = 0.0;    // ratio of consecutive bielecki_diffs (0 on the first)
    double wall_time = 0.0;     // seconds spent in this iteration
};

struct IterationDiagnostics {
    std::vector<IterationRecord> records;
};

struct Solution {
    GridFunction value;
    GridFunction derivative;
    std::optional<FeedbackPolicy> policy;  // attached by the control-problem driver
    IterationDiagnostics diagnostics;
    bool converged = false;
    double kappa_used = 0.0;
};

/// One application of the fixed-point operator: solves the linear problem
/// whose source is H(D_x u_n, u_n, x, t) frozen on the grid.
GridFunction apply_T(const GridFunction& u_n, const GeneralProblem& problem, const Mesh& mesh,
                     const SchemeConfig& scheme);

/// safety * max{(K*M)^3, 1}: the weight above which the operator contracts.
double choose_kappa(double K, double M, double safety);

using IterationCallback = std::function<void(const IterationRecord&)>;

/// Runs u_{n+1} = T u_n until the kappa-weighted diff (value + derivative
/// part) drops below tol, max_iter is reached (converged = false, no throw),
/// or the diff grows five consecutive times (DivergenceError). The default
/// initial iterate extends the terminal boundary data constantly in t, with
/// the lateral data on the x = 0 column.
Solution iterate(const GeneralProblem& problem, const Mesh& mesh, const SchemeConfig& scheme,
                 double kappa, double tol, int max_iter,
                 std::optional<GridFunction> initial = std::nullopt,
                 const IterationCallback& on_iteration = nullptr);

/// Geometric-mean ratio of consecutive diffs over the last half of the
/// recorded iterations. Needs at least 3 records with nonzero diffs.
double contraction_rate(const IterationDiagnostics& d);

/// Empirical estimate of the norm-estimate constant M: the max over probe
/// sources of bielecki_norm(u_f, dx(u_f), kappa) * kappa^(1/3) / |f|^0_kappa,
/// with zero boundary data, at kappa = 8 by default.
double calibrate_M(const ScalarField2& sigma, const Mesh& mesh, const SchemeConfig& scheme,
                   double kappa = 8.0);

/// Default initial iterate: boundary data extended constantly in time.
GridFunction default_initial_iterate(const BoundaryData& boundary, const Mesh& mesh);

}  // namespace halfline
