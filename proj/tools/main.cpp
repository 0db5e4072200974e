// halfline: finite-horizon exit-time stochastic control on the half-line.
//
// Subcommands:
//   validate  check the standing assumptions of a problem config
//   solve     run the fixed-point solver, write value/derivative/policy CSVs
//   verify    cross-check a solved problem against Monte Carlo / benchmarks
//   simulate  Monte Carlo estimates at a single point
//   bench     refinement and timing table for the standard benchmark
//
// Exit codes: 0 success, 1 validation/verification failure, 2 solver did not
// converge, 3 usage or config error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "halfline/analytic.hpp"
#include "halfline/config.hpp"
#include "halfline/io.hpp"

namespace hl = halfline;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitUsage = 3;

void print_report(const hl::ValidationReport& rep) {
    for (const auto& e : rep.entries) {
        const char* tag = !e.checked ? "SKIP" : (e.pass ? "PASS" : "FAIL");
        // Controlled problems check B1)-B4), which mirror A1)-A4); print both
        // names so either can be grepped.
        std::string label = e.id;
        if (!e.id.empty() && e.id[0] == 'B') label += "/A" + e.id.substr(1);
        std::cout << "[" << tag << "] " << label << ": " << e.detail << "\n";
        if (e.checked && !e.pass && !e.worst_pair.empty())
            std::cout << "       worst pair: " << e.worst_pair << "\n";
    }
}

int cmd_validate(const std::string& config_path) {
    const hl::RunConfig rc = hl::load_config(config_path);
    const hl::ValidationReport rep = hl::validate_assumptions(rc.spec, rc.plan, rc.bounds);
    print_report(rep);
    std::cout << (rep.all_pass() ? "all checked assumptions pass" : "assumption check failed")
              << "\n";
    return rep.all_pass() ? kExitOk : kExitCheckFailed;
}

struct SolveFlags {
    std::optional<double> x_max, kappa, tol;
    std::optional<int> nx, nt, max_iter;
    std::optional<std::uint64_t> seed;
    std::string out_dir = "out";
};

int cmd_solve(const std::string& config_path, const SolveFlags& flags) {
    hl::RunConfig rc = hl::load_config(config_path);
    if (flags.x_max || flags.nx || flags.nt)
        rc.mesh = hl::Mesh(flags.x_max.value_or(rc.mesh.x_max), flags.nx.value_or(rc.mesh.n_x),
                           flags.nt.value_or(rc.mesh.n_t), rc.spec.horizon);
    if (flags.kappa) rc.solve.kappa = *flags.kappa;
    if (flags.tol) rc.solve.tol = *flags.tol;
    if (flags.max_iter) rc.solve.max_iter = *flags.max_iter;
    if (flags.seed) rc.solve.seed = *flags.seed;

    std::filesystem::create_directories(flags.out_dir);
    std::ofstream diag(flags.out_dir + "/diagnostics.jsonl", std::ios::binary);
    if (!diag) throw hl::DataError("cannot write diagnostics in " + flags.out_dir);

    const hl::Solution sol = hl::solve_control_problem(
        rc.spec, rc.mesh, rc.scheme, rc.solve,
        [&diag](const hl::IterationRecord& rec) { diag << hl::diagnostics_json_line(rec) << "\n"; });

    hl::write_grid_csv(flags.out_dir + "/value.csv", sol.value, &sol.derivative);
    hl::write_grid_csv(flags.out_dir + "/derivative.csv", sol.derivative);
    if (sol.policy) hl::write_policy_csv(flags.out_dir + "/policy.csv", *sol.policy);

    const auto& recs = sol.diagnostics.records;
    std::cout << "kappa = " << sol.kappa_used << ", iterations = " << recs.size()
              << ", last bielecki_diff = " << (recs.empty() ? 0.0 : recs.back().bielecki_diff)
              << ", converged = " << (sol.converged ? "yes" : "no") << "\n";
    return sol.converged ? kExitOk : kExitNotConverged;
}

struct VerifyFlags {
    std::optional<long long> paths;
    std::optional<double> dt;
    std::optional<int> workers;
    int points = 6;
    std::string solution_dir = "out";
};

// Three-way consistency: solved grid vs Monte Carlo under the stored policy,
// vs the closed-form benchmark when the config is a driftless constant-sigma
// constant-source problem with zero boundary data.
int cmd_verify(const std::string& config_path, const VerifyFlags& flags) {
    const hl::RunConfig rc = hl::load_config(config_path);
    auto [value, deriv] = hl::read_grid_csv(flags.solution_dir + "/value.csv");
    const hl::FeedbackPolicy policy =
        hl::read_policy_csv(flags.solution_dir + "/policy.csv", rc.spec.controls);
    if (!(value.mesh() == policy.mesh()))
        throw hl::DataError("value and policy files disagree on the mesh");

    hl::McConfig mc = rc.mc;
    if (flags.paths) mc.n_paths = *flags.paths;
    if (flags.dt) mc.dt = *flags.dt;
    if (flags.workers) mc.n_workers = *flags.workers;

    const hl::Mesh& mesh = value.mesh();
    const bool analytic_ok = rc.hints.sigma_constant && rc.hints.drift_zero &&
                             rc.hints.discount_zero && rc.hints.reward_constant &&
                             rc.hints.beta_zero && rc.hints.sigma_value > 0.0;

    bool all_pass = true;
    const int n_pts = std::max(1, flags.points);
    for (int k = 0; k < n_pts; ++k) {
        // Sample nodes spread over x in (0, x_max/2], t in [0, 3T/4].
        const int i = 1 + (k * (mesh.n_x / 2 - 1)) / std::max(1, n_pts - 1);
        const int j = (k * (3 * (mesh.n_t - 1) / 4)) / std::max(1, n_pts - 1);
        const double x = mesh.x(i), t = mesh.t(j);

        const hl::McEstimate est = hl::evaluate_policy(policy, rc.spec, x, t, mc);
        const double pde = value(j, i);
        const double tol_mc = 3.0 * est.stderr_ + 5e-3;
        const bool ok_mc = std::abs(pde - est.mean) <= tol_mc;
        all_pass = all_pass && ok_mc;

        std::printf("[%s] (x=%.4g, t=%.4g): pde=%.6f mc=%.6f (se %.2g)", ok_mc ? "PASS" : "FAIL",
                    x, t, pde, est.mean, est.stderr_);
        if (analytic_ok) {
            const double scale = rc.hints.sigma_value;
            const double ana = rc.hints.reward_value *
                               (hl::bm_truncated_exit(x / scale, t, rc.spec.horizon) - t);
            const bool ok_ana = std::abs(pde - ana) <= 5e-3 &&
                                std::abs(est.mean - ana) <= 3.0 * est.stderr_ + 5e-3;
            all_pass = all_pass && ok_ana;
            std::printf(" analytic=%.6f [%s]", ana, ok_ana ? "PASS" : "FAIL");
        }
        std::printf("\n");
    }

    // Policy optimality against the five fixed comparison policies.
    const double x0 = mesh.x_max / 8.0, t0 = 0.0;
    const double xmid = mesh.x_max / 4.0, tmid = rc.spec.horizon / 2.0;
    const hl::McEstimate ours = hl::evaluate_policy(policy, rc.spec, x0, t0, mc);
    const double lo = rc.spec.controls.lo(), hi = rc.spec.controls.hi();
    const std::vector<std::pair<std::string, hl::FeedbackPolicy>> rivals = [&] {
        auto constant_policy = [&](double a) {
            return hl::FeedbackPolicy(
                mesh,
                std::vector<double>(static_cast<std::size_t>(mesh.n_x) *
                                        static_cast<std::size_t>(mesh.n_t),
                                    a),
                rc.spec.controls);
        };
        auto grid_policy = [&](auto&& fn) {
            std::vector<double> v;
            v.reserve(static_cast<std::size_t>(mesh.n_x) * static_cast<std::size_t>(mesh.n_t));
            for (int j = 0; j < mesh.n_t; ++j)
                for (int i = 0; i < mesh.n_x; ++i) v.push_back(fn(mesh.x(i), mesh.t(j)));
            return hl::FeedbackPolicy(mesh, std::move(v), rc.spec.controls);
        };
        const double mid_alpha = rc.spec.controls.contains(0.0) ? 0.0 : lo;
        std::vector<std::pair<std::string, hl::FeedbackPolicy>> out;
        out.emplace_back("alpha=lo", constant_policy(lo));
        out.emplace_back("alpha=mid", constant_policy(mid_alpha));
        out.emplace_back("alpha=hi", constant_policy(hi));
        out.emplace_back("bang-bang in t",
                         grid_policy([&](double, double t) { return t < tmid ? hi : lo; }));
        out.emplace_back("bang-bang in x",
                         grid_policy([&](double x, double) { return x < xmid ? hi : lo; }));
        return out;
    }();

    for (const auto& [name, rival] : rivals) {
        const hl::McEstimate theirs = hl::evaluate_policy(rival, rc.spec, x0, t0, mc);
        const double margin = 3.0 * std::hypot(ours.stderr_, theirs.stderr_);
        const bool ok = ours.mean >= theirs.mean - margin;
        all_pass = all_pass && ok;
        std::printf("[%s] policy vs %s: %.6f >= %.6f - %.2g\n", ok ? "PASS" : "FAIL",
                    name.c_str(), ours.mean, theirs.mean, margin);
    }

    std::cout << (all_pass ? "verification passed" : "verification failed") << "\n";
    return all_pass ? kExitOk : kExitCheckFailed;
}

struct SimulateFlags {
    double x = 1.0, t = 0.0;
    std::optional<long long> paths;
    std::optional<double> dt;
    std::optional<int> workers;
    std::string policy_dir;
};

int cmd_simulate(const std::string& config_path, const SimulateFlags& flags) {
    const hl::RunConfig rc = hl::load_config(config_path);
    hl::McConfig mc = rc.mc;
    if (flags.paths) mc.n_paths = *flags.paths;
    if (flags.dt) mc.dt = *flags.dt;
    if (flags.workers) mc.n_workers = *flags.workers;

    if (!flags.policy_dir.empty()) {
        const hl::FeedbackPolicy policy =
            hl::read_policy_csv(flags.policy_dir + "/policy.csv", rc.spec.controls);
        const hl::McEstimate est = hl::evaluate_policy(policy, rc.spec, flags.x, flags.t, mc);
        std::cout << hl::estimate_json(est) << "\n";
    } else {
        const hl::McEstimate est =
            hl::expected_exit_time(flags.x, flags.t, rc.spec.sigma, rc.spec.horizon, mc);
        std::cout << hl::estimate_json(est) << "\n";
    }
    return kExitOk;
}

struct BenchFlags {
    int levels = 3;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string out;
};

// Refinement table on the closed-form benchmark (sigma=1, source=1, beta=0)
// plus one seeded Monte Carlo row.
int cmd_bench(const BenchFlags& flags) {
    std::ostringstream csv;
    csv << "kind,level,n_x,n_t,paths,dt,value,error,seconds\n";

    const hl::BoundaryData zero{hl::make_constant1(0.0), hl::make_constant1(0.0)};
    const auto one2 = hl::make_constant2(1.0);
    int nx = 81, nt = 101;
    for (int level = 1; level <= flags.levels; ++level) {
        const auto start = std::chrono::steady_clock::now();
        const hl::Mesh mesh(8.0, nx, nt, 1.0);
        const hl::GridFunction u = hl::solve_linear(one2, one2, zero, mesh, hl::SchemeConfig{});
        double err = 0.0;
        for (int j = 0; j < mesh.n_t - 1; ++j)
            for (int i = 1; i < mesh.n_x / 2; ++i)
                err = std::max(err, std::abs(u(j, i) - (hl::bm_truncated_exit(mesh.x(i), mesh.t(j),
                                                                             1.0) -
                                                        mesh.t(j))));
        const std::chrono::duration<double> dur = std::chrono::steady_clock::now() - start;
        char row[160];
        std::snprintf(row, sizeof(row), "pde,%d,%d,%d,0,0,%.17g,%.17g,%.3f\n", level, nx, nt,
                      u(0, nx / 8), err, dur.count());
        csv << row;
        nx = 2 * (nx - 1) + 1;
        nt = 2 * (nt - 1) + 1;
    }

    // Truncation check: doubling x_max at the base resolution should leave
    // the benchmark error unchanged.
    {
        const auto start = std::chrono::steady_clock::now();
        const hl::Mesh mesh(16.0, 161, 101, 1.0);
        const hl::GridFunction u = hl::solve_linear(one2, one2, zero, mesh, hl::SchemeConfig{});
        double err = 0.0;
        for (int j = 0; j < mesh.n_t - 1; ++j)
            for (int i = 1; i < mesh.n_x / 4; ++i)
                err = std::max(err, std::abs(u(j, i) - (hl::bm_truncated_exit(mesh.x(i), mesh.t(j),
                                                                             1.0) -
                                                        mesh.t(j))));
        const std::chrono::duration<double> dur = std::chrono::steady_clock::now() - start;
        char row[160];
        std::snprintf(row, sizeof(row), "pde_wide,1,%d,%d,0,0,%.17g,%.17g,%.3f\n", mesh.n_x,
                      mesh.n_t, u(0, mesh.n_x / 16), err, dur.count());
        csv << row;
    }

    {
        hl::McConfig mc;
        mc.n_paths = 100000;
        mc.dt = 1e-3;
        mc.seed = flags.seed;
        mc.n_workers = flags.workers;
        const auto start = std::chrono::steady_clock::now();
        const hl::McEstimate est = hl::expected_exit_time(1.0, 0.0, one2, 1.0, mc);
        const std::chrono::duration<double> dur = std::chrono::steady_clock::now() - start;
        char row[160];
        std::snprintf(row, sizeof(row), "mc,1,0,0,%lld,%.17g,%.17g,%.17g,%.3f\n",
                      static_cast<long long>(mc.n_paths), mc.dt, est.mean, est.stderr_,
                      dur.count());
        csv << row;
    }

    if (flags.out.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream out(flags.out, std::ios::binary);
        if (!out) throw hl::DataError("cannot write " + flags.out);
        out << csv.str();
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exit-time stochastic control solver on the half-line"};
    app.require_subcommand(1);

    std::string config_path;

    auto* validate = app.add_subcommand("validate", "check standing assumptions");
    validate->add_option("config", config_path, "problem config file")->required();

    SolveFlags sf;
    auto* solve = app.add_subcommand("solve", "run the fixed-point solver");
    solve->add_option("config", config_path, "problem config file")->required();
    solve->add_option("--x-max", sf.x_max, "truncation of the half-line");
    solve->add_option("--nx", sf.nx, "spatial nodes");
    solve->add_option("--nt", sf.nt, "time levels");
    solve->add_option("--kappa", sf.kappa, "norm weight (default: derived)");
    solve->add_option("--tol", sf.tol, "stopping tolerance");
    solve->add_option("--max-iter", sf.max_iter, "iteration cap");
    solve->add_option("--out-dir", sf.out_dir, "output directory");
    solve->add_option("--seed", sf.seed, "seed for K estimation sampling");

    VerifyFlags vf;
    auto* verify = app.add_subcommand("verify", "cross-check a solved problem");
    verify->add_option("config", config_path, "problem config file")->required();
    verify->add_option("solution_dir", vf.solution_dir, "directory written by solve")->required();
    verify->add_option("--paths", vf.paths, "Monte Carlo paths per check");
    verify->add_option("--dt", vf.dt, "Monte Carlo step size");
    verify->add_option("--points", vf.points, "number of sampled points");
    verify->add_option("--workers", vf.workers, "worker threads");

    SimulateFlags mf;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate at a point");
    simulate->add_option("config", config_path, "problem config file")->required();
    simulate->add_option("--x", mf.x, "start state");
    simulate->add_option("--t", mf.t, "start time");
    simulate->add_option("--paths", mf.paths, "paths");
    simulate->add_option("--dt", mf.dt, "step size");
    simulate->add_option("--workers", mf.workers, "worker threads");
    simulate->add_option("--policy-dir", mf.policy_dir,
                         "evaluate the policy stored in this directory instead of exit time");

    BenchFlags bf;
    auto* bench = app.add_subcommand("bench", "refinement/timing table");
    bench->add_option("--levels", bf.levels, "refinement levels");
    bench->add_option("--seed", bf.seed, "Monte Carlo seed");
    bench->add_option("--workers", bf.workers, "worker threads");
    bench->add_option("--out", bf.out, "write the CSV here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (validate->parsed()) return cmd_validate(config_path);
        if (solve->parsed()) return cmd_solve(config_path, sf);
        if (verify->parsed()) return cmd_verify(config_path, vf);
        if (simulate->parsed()) return cmd_simulate(config_path, mf);
        if (bench->parsed()) return cmd_bench(bf);
    } catch (const hl::ConfigError& e) {
        std::cerr << "config error";
        if (e.line > 0) std::cerr << " (line " << e.line << ")";
        std::cerr << ": " << e.what() << "\n";
        return kExitUsage;
    } catch (const hl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    }
    return kExitUsage;
}
