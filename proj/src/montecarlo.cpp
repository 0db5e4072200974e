#include "halfline/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <string>
#include <thread>

#include "halfline/rng.hpp"

namespace halfline {

namespace {

constexpr double kTimeEps = 1e-12;

struct Welford {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double v) {
        ++n;
        const double d = v - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (v - mean);
    }

    // Chan et al. pairwise combine; applied in fixed worker order so the
    // result does not depend on thread scheduling.
    void merge(const Welford& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double total = static_cast<double>(n + o.n);
        const double d = o.mean - mean;
        mean += d * static_cast<double>(o.n) / total;
        m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / total;
        n += o.n;
    }

    McEstimate estimate() const {
        McEstimate e;
        e.n_paths = n;
        e.mean = mean;
        if (n > 1) {
            const double var = std::max(0.0, m2 / static_cast<double>(n - 1));
            e.stderr_ = std::sqrt(var / static_cast<double>(n));
        }
        return e;
    }
};

struct WalkOutcome {
    double exit_time;
    double terminal_state;
    bool exited;
};

// One Euler-Maruyama first-exit walk. SegmentFn(x_k, t_k, duration, x_after)
// fires once per completed segment, after the segment's effective duration is
// known (shortened on the absorbing step), with x_after = 0 on absorption.
template <typename Rng, typename SegmentFn>
WalkOutcome walk_path(double x0, double t0, double horizon, const ScalarField2& sigma,
                      const DriftFn& drift, const McConfig& cfg, Rng& rng, SegmentFn&& segment) {
    if (t0 >= horizon - kTimeEps) return {horizon, x0, x0 <= 0.0};
    if (x0 <= 0.0) return {t0, 0.0, true};

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    double x = x0;
    double t = t0;
    while (t < horizon - kTimeEps) {
        const double h = std::min(cfg.dt, horizon - t);
        const double s = eval_checked(sigma, x, t, "sigma");
        const double b = drift ? drift(x, t) : 0.0;
        const double x_next = x + b * h + s * std::sqrt(h) * gauss(rng);

        if (x_next <= 0.0) {
            segment(x, t, h, 0.0);
            return {t + h, 0.0, true};
        }
        if (cfg.bridge_correction) {
            const double p_cross = std::exp(-2.0 * x * x_next / (s * s * h));
            if (unif(rng) < p_cross) {
                segment(x, t, 0.5 * h, 0.0);
                return {t + 0.5 * h, 0.0, true};
            }
        }
        segment(x, t, h, x_next);
        x = x_next;
        t += h;
    }
    return {horizon, x, false};
}

// Runs one path statistic per path across deterministic worker streams.
// PathFn: double(path_index, rng).
template <typename PathFn>
Welford run_reduce(std::int64_t n_paths, const McConfig& cfg, PathFn&& path_fn) {
    const int workers = static_cast<int>(std::min<std::int64_t>(cfg.n_workers, n_paths));
    std::vector<Welford> partial(static_cast<std::size_t>(workers));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));

    auto run_block = [&](int w) {
        try {
            const std::int64_t base = n_paths / workers;
            const std::int64_t rem = n_paths % workers;
            const std::int64_t count = base + (w < rem ? 1 : 0);
            const std::int64_t first = w * base + std::min<std::int64_t>(w, rem);
            auto rng = make_stream(cfg.seed, static_cast<std::uint64_t>(w));
            Welford acc;
            for (std::int64_t k = 0; k < count; ++k)
                acc.add(path_fn(first + k, rng));
            partial[static_cast<std::size_t>(w)] = acc;
        } catch (...) {
            errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
    };

    if (workers == 1) {
        run_block(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(run_block, w);
        for (auto& th : pool) th.join();
    }

    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    Welford total;
    for (const auto& p : partial) total.merge(p);
    return total;
}

}  // namespace

McEstimate ExitSimulation::exit_time_estimate() const {
    Welford acc;
    for (const auto& s : samples) acc.add(s.exit_time);
    return acc.estimate();
}

FeedbackPolicy::FeedbackPolicy(const Mesh& mesh, std::vector<double> values,
                               const ControlSet& controls)
    : mesh_(mesh), values_(std::move(values)) {
    const std::size_t expected =
        static_cast<std::size_t>(mesh_.n_x) * static_cast<std::size_t>(mesh_.n_t);
    if (values_.size() != expected)
        throw ShapeError("FeedbackPolicy: value count does not match the mesh");
    for (double a : values_)
        if (!controls.contains(a))
            throw DataError("FeedbackPolicy: stored control " + std::to_string(a) +
                            " lies outside the control set");
}

double FeedbackPolicy::operator()(double x, double t) const {
    const double fi = std::clamp(x / mesh_.dx(), 0.0, static_cast<double>(mesh_.n_x - 1));
    const double fj = std::clamp(t / mesh_.dt(), 0.0, static_cast<double>(mesh_.n_t - 1));
    const int i = static_cast<int>(std::lround(fi));
    const int j = static_cast<int>(std::lround(fj));
    return at(j, i);
}

ExitSimulation simulate_exit(double x, double t, const ScalarField2& sigma, const DriftFn& drift,
                             double horizon, const McConfig& cfg, bool keep_trajectories) {
    cfg.require_valid(horizon);
    if (x < 0.0) throw PreconditionError("simulate_exit: x must be >= 0");
    if (t < 0.0 || t > horizon)
        throw PreconditionError("simulate_exit: t must lie in [0, horizon]");

    ExitSimulation sim;
    sim.samples.resize(static_cast<std::size_t>(cfg.n_paths));
    if (keep_trajectories) sim.trajectories.resize(static_cast<std::size_t>(cfg.n_paths));

    run_reduce(cfg.n_paths, cfg, [&](std::int64_t idx, std::mt19937_64& rng) {
        auto* traj = keep_trajectories ? &sim.trajectories[static_cast<std::size_t>(idx)] : nullptr;
        if (traj) traj->emplace_back(t, x);
        const WalkOutcome out =
            walk_path(x, t, horizon, sigma, drift, cfg, rng,
                      [&](double, double tk, double dur, double x_after) {
                          if (traj) traj->emplace_back(tk + dur, x_after);
                      });
        sim.samples[static_cast<std::size_t>(idx)] = {out.exit_time, out.terminal_state,
                                                      out.exited};
        return out.exit_time;
    });
    return sim;
}

McEstimate expected_exit_time(double x, double t, const ScalarField2& sigma, double horizon,
                              const McConfig& cfg) {
    return simulate_exit(x, t, sigma, nullptr, horizon, cfg).exit_time_estimate();
}

McEstimate fk_estimate(const ScalarField2& source, const BoundaryData& boundary,
                       const ScalarField2& sigma, double x, double t, double horizon,
                       const McConfig& cfg) {
    cfg.require_valid(horizon);
    if (x < 0.0) throw PreconditionError("fk_estimate: x must be >= 0");
    if (t < 0.0 || t > horizon)
        throw PreconditionError("fk_estimate: t must lie in [0, horizon]");

    const Welford acc = run_reduce(cfg.n_paths, cfg, [&](std::int64_t, std::mt19937_64& rng) {
        double integral = 0.0;
        const WalkOutcome out = walk_path(x, t, horizon, sigma, nullptr, cfg, rng,
                                          [&](double xk, double tk, double dur, double) {
                                              integral += source(xk, tk) * dur;
                                          });
        const double payoff = out.exited ? boundary.lateral(out.exit_time)
                                         : boundary.terminal(out.terminal_state);
        return payoff + integral;
    });
    return acc.estimate();
}

McEstimate evaluate_policy(const FeedbackPolicy& policy, const ProblemSpec& spec, double x,
                           double t, const McConfig& cfg) {
    spec.require_valid();
    cfg.require_valid(spec.horizon);
    if (x < 0.0) throw PreconditionError("evaluate_policy: x must be >= 0");
    if (t < 0.0 || t > spec.horizon)
        throw PreconditionError("evaluate_policy: t must lie in [0, horizon]");
    for (double a : policy.values())
        if (!spec.controls.contains(a))
            throw DataError("evaluate_policy: policy control " + std::to_string(a) +
                            " lies outside the problem's control set");

    const DriftFn drift = [&](double xs, double ts) {
        return spec.drift(xs, ts, policy(xs, ts));
    };

    const Welford acc = run_reduce(cfg.n_paths, cfg, [&](std::int64_t, std::mt19937_64& rng) {
        double discount = 0.0;  // running integral of h along the path
        double reward = 0.0;
        const WalkOutcome out = walk_path(
            x, t, spec.horizon, spec.sigma, drift, cfg, rng,
            [&](double xk, double tk, double dur, double) {
                const double a = policy(xk, tk);
                reward += std::exp(discount) * spec.running_reward(xk, tk, a) * dur;
                discount += spec.discount(xk, tk, a) * dur;
            });
        const double beta = out.exited ? spec.boundary.lateral(out.exit_time)
                                       : spec.boundary.terminal(out.terminal_state);
        return reward + std::exp(discount) * beta;
    });
    return acc.estimate();
}

}  // namespace halfline
