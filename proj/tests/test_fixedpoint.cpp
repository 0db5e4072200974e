#include <doctest.h>

#include <cmath>

#include "halfline/fixedpoint.hpp"
#include "halfline/hamiltonian.hpp"
#include "halfline/io.hpp"
#include "halfline/solver.hpp"
#include "oracles.hpp"

#include <json.hpp>

using namespace halfline;

namespace {

const BoundaryData kZero{make_constant1(0.0), make_constant1(0.0)};

GeneralProblem semilinear(Hamiltonian h) {
    GeneralProblem g;
    g.sigma = make_constant2(1.0);
    g.hamiltonian = std::move(h);
    g.boundary = kZero;
    g.horizon = 1.0;
    return g;
}

ProblemSpec drift_control_benchmark() {
    ProblemSpec s;
    s.sigma = make_constant2(1.0);
    s.drift = [](double, double, double a) { return a; };
    s.discount = make_constant3(0.0);
    s.running_reward = make_constant3(1.0);
    s.boundary = kZero;
    s.controls = ControlSet::interval(-1.0, 1.0);
    s.horizon = 1.0;
    return s;
}

}  // namespace

TEST_CASE("kappa selection formula") {
    CHECK(choose_kappa(0.0, 2.0, 1.5) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(choose_kappa(1.0, 2.0, 1.5) == doctest::Approx(12.0).epsilon(1e-15));
    CHECK(choose_kappa(1.0, 1.0, 2.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(choose_kappa(-1.0, 1.0, 1.0), PreconditionError);
    CHECK_THROWS_AS(choose_kappa(1.0, 0.0, 1.0), PreconditionError);
    CHECK_THROWS_AS(choose_kappa(1.0, 1.0, 0.5), PreconditionError);
}

TEST_CASE("constant Hamiltonian makes the operator a constant map") {
    const GeneralProblem g = semilinear([](double, double, double, double) { return 0.0; });
    const Mesh mesh(4.0, 41, 21, 1.0);

    GridFunction u0(mesh);
    for (int j = 0; j < mesh.n_t; ++j)
        for (int i = 0; i < mesh.n_x; ++i) u0.at(j, i) = std::sin(0.5 * mesh.x(i)) + 0.1 * j;

    const GridFunction once = apply_T(u0, g, mesh, {});
    const GridFunction twice = apply_T(once, g, mesh, {});
    for (std::size_t k = 0; k < once.values().size(); ++k)
        CHECK(once.values()[k] == twice.values()[k]);
}

TEST_CASE("unit Hamiltonian reproduces the truncated exit-time benchmark") {
    const GeneralProblem g = semilinear([](double, double, double, double) { return 1.0; });
    const Mesh mesh(8.0, 161, 401, 1.0);
    const GridFunction u = apply_T(GridFunction(mesh), g, mesh, {});
    double err = 0.0;
    for (int j = 0; j < mesh.n_t - 1; ++j)
        for (int i = 1; i <= mesh.n_x / 2; ++i)
            err = std::max(err, std::abs(u(j, i) - (oracles::exit_time_closed_form(
                                                        mesh.x(i), mesh.t(j), 1.0) -
                                                    mesh.t(j))));
    CHECK(err <= 5e-3);
}

TEST_CASE("gradient Hamiltonian applied to the zero iterate stays zero") {
    const GeneralProblem g = semilinear([](double p, double, double, double) { return p; });
    const Mesh mesh(4.0, 41, 21, 1.0);
    const GridFunction u = apply_T(GridFunction(mesh), g, mesh, {});
    CHECK(u.sup_norm() == 0.0);
}

TEST_CASE("constant Hamiltonian converges on the second iteration") {
    const GeneralProblem g = semilinear([](double, double, double, double) { return 1.0; });
    const Mesh mesh(6.0, 61, 61, 1.0);
    const Solution sol = iterate(g, mesh, {}, 8.0, 1e-10, 20, GridFunction(mesh));
    CHECK(sol.converged);
    REQUIRE(sol.diagnostics.records.size() == 2);
    CHECK(sol.diagnostics.records[1].bielecki_diff <= 1e-13);
}

TEST_CASE("drift-control benchmark contracts and is self-consistent") {
    const ProblemSpec spec = drift_control_benchmark();
    const GeneralProblem g = to_general(spec);
    const Mesh mesh(8.0, 161, 201, 1.0);

    const double k_hat = estimate_K(g);
    const double m_cal = calibrate_M(spec.sigma, mesh, {});
    CHECK(m_cal > 0.1);
    CHECK(m_cal < 1.5);
    const double kappa = choose_kappa(k_hat, m_cal, 1.5);

    const Solution sol = iterate(g, mesh, {}, kappa, 1e-8, 100);
    CHECK(sol.converged);
    CHECK(sol.kappa_used == kappa);

    const double rate = contraction_rate(sol.diagnostics);
    CHECK(rate < 1.0);
    for (std::size_t k = sol.diagnostics.records.size() / 2;
         k < sol.diagnostics.records.size(); ++k)
        CHECK(sol.diagnostics.records[k].q_estimate < 1.0);

    // Fixed-point residual in the iteration norm.
    const GridFunction t_u = apply_T(sol.value, g, mesh, {});
    GridFunction resid = t_u - sol.value;
    const GridFunction dresid = dx(resid);
    CHECK(bielecki_norm(resid, &dresid, kappa) <= 2e-8);

    // Self-consistency: freezing the optimal source and re-solving the linear
    // problem reproduces the fixed point.
    const ScalarField2 frozen = [&](double x, double t) {
        const Mesh& m = sol.value.mesh();
        const int i = static_cast<int>(std::lround(x / m.dx()));
        const int j = static_cast<int>(std::lround(t / m.dt()));
        return std::abs(sol.derivative(j, i)) + 1.0;
    };
    const GridFunction resolved = solve_linear(spec.sigma, frozen, spec.boundary, mesh, {});
    CHECK((resolved - sol.value).sup_norm() <= 1e-4);
}

TEST_CASE("distinct initializations reach the same fixed point") {
    const ProblemSpec spec = drift_control_benchmark();
    const GeneralProblem g = to_general(spec);
    const Mesh mesh(6.0, 81, 101, 1.0);
    const double tol = 1e-8;

    const Solution a = iterate(g, mesh, {}, 12.0, tol, 100);  // default init (= 0 here)
    const Solution b = iterate(g, mesh, {}, 12.0, tol, 100, GridFunction(mesh, 1.0));
    CHECK(a.converged);
    CHECK(b.converged);
    CHECK((a.value - b.value).sup_norm() <= 10.0 * tol);
}

TEST_CASE("iterates keep the boundary rows bit-exact") {
    ProblemSpec spec = drift_control_benchmark();
    spec.boundary = {[](double x) { return 0.5 / (1.0 + x); }, [](double t) { return 0.5 + 0.0 * t; }};
    const GeneralProblem g = to_general(spec);
    const Mesh mesh(6.0, 41, 31, 1.0);
    const Solution sol = iterate(g, mesh, {}, 6.0, 1e-7, 60);
    REQUIRE(sol.converged);
    for (int i = 0; i < mesh.n_x; ++i)
        CHECK(sol.value(mesh.n_t - 1, i) == spec.boundary.terminal(mesh.x(i)));
    for (int j = 0; j < mesh.n_t; ++j)
        CHECK(sol.value(j, 0) == spec.boundary.lateral(mesh.t(j)));
}

TEST_CASE("max_iter exhaustion reports non-convergence without throwing") {
    const ProblemSpec spec = drift_control_benchmark();
    const GeneralProblem g = to_general(spec);
    const Mesh mesh(6.0, 41, 41, 1.0);
    const Solution sol = iterate(g, mesh, {}, 12.0, 1e-12, 1);
    CHECK_FALSE(sol.converged);
    CHECK(sol.diagnostics.records.size() == 1);
}

TEST_CASE("sustained growth of the diffs raises a divergence error") {
    const GeneralProblem g = semilinear(
        [](double p, double, double, double) { return 60.0 * p + 1.0; });
    const Mesh mesh(6.0, 81, 81, 1.0);
    CHECK_THROWS_AS(iterate(g, mesh, {}, 0.0, 1e-12, 60), DivergenceError);
    try {
        iterate(g, mesh, {}, 0.0, 1e-12, 60);
    } catch (const DivergenceError& e) {
        CHECK(e.last_q_estimate > 1.0);
    }
}

TEST_CASE("contraction rate over the diff tail") {
    IterationDiagnostics d;
    int n = 0;
    for (double v : {1.0, 0.5, 0.25, 0.125}) d.records.push_back({++n, v, v, 0.0, 0.0});
    CHECK(contraction_rate(d) == doctest::Approx(0.5).epsilon(1e-12));

    IterationDiagnostics short_d;
    short_d.records.push_back({1, 1.0, 1.0, 0.0, 0.0});
    short_d.records.push_back({2, 0.0, 0.0, 0.0, 0.0});
    CHECK_THROWS_AS(contraction_rate(short_d), InsufficientDataError);
}

TEST_CASE("operator contracts on random bounded pairs at the derived weight") {
    const ProblemSpec spec = drift_control_benchmark();
    const GeneralProblem g = to_general(spec);
    const Mesh mesh(6.0, 61, 61, 1.0);
    const double kappa = choose_kappa(1.0, calibrate_M(spec.sigma, mesh, {}), 1.5);

    oracles::PropertyRng rng(31);
    int contracting = 0;
    const int trials = 40;
    for (int trial = 0; trial < trials; ++trial) {
        GridFunction u(mesh), v(mesh);
        // Smooth random iterates bounded by the a-priori scale of the problem.
        const double au = rng.uniform(-1, 1), bu = rng.uniform(0.2, 1.5);
        const double av = rng.uniform(-1, 1), bv = rng.uniform(0.2, 1.5);
        for (int j = 0; j < mesh.n_t; ++j)
            for (int i = 0; i < mesh.n_x; ++i) {
                const double x = mesh.x(i), t = mesh.t(j);
                u.at(j, i) = au * (1.0 - std::exp(-bu * x)) * (1.0 - t);
                v.at(j, i) = av * (1.0 - std::exp(-bv * x)) * (1.0 - t);
            }
        const GridFunction tu = apply_T(u, g, mesh, {});
        const GridFunction tv = apply_T(v, g, mesh, {});
        GridFunction dnum = tu - tv;
        GridFunction dden = u - v;
        const GridFunction ddnum = dx(dnum);
        const GridFunction ddden = dx(dden);
        const double num = bielecki_norm(dnum, &ddnum, kappa);
        const double den = bielecki_norm(dden, &ddden, kappa);
        if (den > 0.0 && num < den) ++contracting;
    }
    CHECK(contracting >= trials * 95 / 100);
}

TEST_CASE("operator is monotone for Hamiltonians nondecreasing in u") {
    const GeneralProblem g = semilinear(
        [](double, double u, double, double) { return 0.5 * u + 1.0; });
    const Mesh mesh(6.0, 41, 41, 1.0);
    // Monotone closure; the extrapolating closure is not order-preserving at
    // the far-field node for rough (nodewise-random) iterates.
    SchemeConfig scheme;
    scheme.far_field = FarField::homogeneous_neumann;
    oracles::PropertyRng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        GridFunction u(mesh), v(mesh);
        for (std::size_t k = 0; k < u.values().size(); ++k) {
            const double lo = rng.uniform(-1, 1);
            u.values()[k] = lo;
            v.values()[k] = lo + rng.uniform(0, 1);
        }
        const GridFunction tu = apply_T(u, g, mesh, scheme);
        const GridFunction tv = apply_T(v, g, mesh, scheme);
        for (std::size_t k = 0; k < tu.values().size(); ++k)
            CHECK(tu.values()[k] <= tv.values()[k] + 1e-12);
    }
}

TEST_CASE("diagnostics records serialize as JSON lines") {
    const IterationRecord rec{3, 0.25, 0.5, 0.8, 0.01};
    const auto parsed = nlohmann::json::parse(diagnostics_json_line(rec));
    CHECK(parsed.at("n") == 3);
    CHECK(parsed.at("bielecki_diff") == doctest::Approx(0.25));
    CHECK(parsed.at("sup_diff") == doctest::Approx(0.5));
    CHECK(parsed.at("q_estimate") == doctest::Approx(0.8));
}

TEST_CASE("end-to-end control solve attaches a policy") {
    const ProblemSpec spec = drift_control_benchmark();
    const Mesh mesh(6.0, 61, 61, 1.0);
    SolveSettings st;
    st.tol = 1e-7;
    const Solution sol = solve_control_problem(spec, mesh, {}, st);
    CHECK(sol.converged);
    REQUIRE(sol.policy.has_value());
    CHECK(sol.policy->mesh() == mesh);
}
