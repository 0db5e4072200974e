#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "halfline/fields.hpp"
#include "halfline/mesh.hpp"
#include "halfline/problem.hpp"

namespace halfline {

struct McConfig {
    std::int64_t n_paths = 10000;
    double dt = 1e-3;
    std::uint64_t seed = 1;
    bool bridge_correction = true;
    int n_workers = 1;

    void require_valid(double horizon) const {
        if (n_paths < 1) throw PreconditionError("McConfig: n_paths must be >= 1");
        if (!(dt > 0.0)) throw PreconditionError("McConfig: dt must be > 0");
        if (dt > horizon) throw PreconditionError("McConfig: dt must not exceed the horizon");
        if (n_workers < 1) throw PreconditionError("McConfig: n_workers must be >= 1");
    }
};

struct McEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::int64_t n_paths = 0;
};

/// One simulated path, summarized.
struct ExitSample {
    double exit_time;       // tau ^ T
    double terminal_state;  // X at tau ^ T (0 when absorbed)
    bool exited;            // true iff tau <= T
};

/// Result of simulate_exit. Trajectories are kept only when requested; each
/// is the list of (time, state) knots of the Euler walk including endpoints.
struct ExitSimulation {
    std::vector<ExitSample> samples;
    std::vector<std::vector<std::pair<double, double>>> trajectories;

    McEstimate exit_time_estimate() const;
};

/// Markov feedback policy stored on a mesh; off-grid queries use the nearest
/// node. Every stored value must lie in the control set.
class FeedbackPolicy {
  public:
    FeedbackPolicy(const Mesh& mesh, std::vector<double> values, const ControlSet& controls);

    const Mesh& mesh() const { return mesh_; }
    const std::vector<double>& values() const { return values_; }
    double at(int j, int i) const {
        return values_[static_cast<std::size_t>(j) * static_cast<std::size_t>(mesh_.n_x) +
                       static_cast<std::size_t>(i)];
    }

    /// Nearest-node lookup, clamped to the mesh rectangle.
    double operator()(double x, double t) const;

  private:
    Mesh mesh_;
    std::vector<double> values_;
};

using DriftFn = std::function<double(double x, double t)>;

/// Euler-Maruyama first-exit simulation of dX = drift ds + sigma dW started
/// at (x, t), absorbed at the first step with state <= 0 and stopped at T.
/// With bridge_correction, a non-crossing step from X_k > 0 to X_{k+1} > 0 is
/// additionally absorbed with probability exp(-2 X_k X_{k+1} / (sigma^2 dt)),
/// exit time at the step midpoint. Bit-identical results for identical
/// (seed, n_workers, cfg).
ExitSimulation simulate_exit(double x, double t, const ScalarField2& sigma,
                             const DriftFn& drift, double horizon, const McConfig& cfg,
                             bool keep_trajectories = false);

/// Mean and standard error of tau ^ T for the driftless diffusion
/// dX = sigma dW.
McEstimate expected_exit_time(double x, double t, const ScalarField2& sigma, double horizon,
                              const McConfig& cfg);

/// Monte Carlo for the linear problem: averages beta at the stopped point
/// plus the left-endpoint Riemann sum of f along the path up to exit.
McEstimate fk_estimate(const ScalarField2& source, const BoundaryData& boundary,
                       const ScalarField2& sigma, double x, double t, double horizon,
                       const McConfig& cfg);

/// Estimates the control objective of a feedback policy: discounted running
/// reward plus discounted boundary payoff along the controlled SDE, both
/// integrals by left-endpoint sums.
McEstimate evaluate_policy(const FeedbackPolicy& policy, const ProblemSpec& spec, double x,
                           double t, const McConfig& cfg);

}  // namespace halfline
