#include <doctest.h>

#include <cmath>

#include "halfline/analytic.hpp"
#include "halfline/montecarlo.hpp"
#include "oracles.hpp"

using namespace halfline;

TEST_CASE("truncated exit time: boundary and empty-horizon cases") {
    CHECK(bm_truncated_exit(0.0, 0.4, 1.0) == 0.4);
    CHECK(bm_truncated_exit(2.0, 1.0, 1.0) == 1.0);
    CHECK_THROWS_AS(bm_truncated_exit(-0.1, 0.0, 1.0), PreconditionError);
    CHECK_THROWS_AS(bm_truncated_exit(1.0, 2.0, 1.0), PreconditionError);
}

TEST_CASE("truncated exit time agrees with two independent routes") {
    // Frozen closed-form values (scaled Gaussian algebra, 17 significant digits).
    CHECK(bm_truncated_exit(1.0, 0.0, 1.0) ==
          doctest::Approx(0.84932043331245849).epsilon(1e-11));
    CHECK(bm_truncated_exit(0.5, 0.0, 1.0) ==
          doctest::Approx(0.58072147994933224).epsilon(1e-11));
    CHECK(bm_truncated_exit(2.0, 0.0, 1.0) ==
          doctest::Approx(0.98846254657096014).epsilon(1e-11));
    CHECK(bm_truncated_exit(1.0, 0.25, 1.0) ==
          doctest::Approx(0.92039233349601131).epsilon(1e-11));
    CHECK(bm_truncated_exit(0.3, 0.1, 0.7) ==
          doctest::Approx(0.39002502270530763).epsilon(1e-11));

    for (double x : {0.05, 0.3, 0.8, 1.7, 3.0})
        for (double t : {0.0, 0.2, 0.6}) {
            const double v = bm_truncated_exit(x, t, 1.0);
            CHECK(v == doctest::Approx(oracles::exit_time_closed_form(x, t, 1.0)).epsilon(1e-10));
            CHECK(v == doctest::Approx(oracles::exit_time_simpson(x, t, 1.0)).epsilon(1e-6));
        }
}

TEST_CASE("truncated exit time is monotone in x and bounded by [t, T]") {
    double prev = 0.0;
    for (double x = 0.0; x <= 4.0; x += 0.05) {
        const double v = bm_truncated_exit(x, 0.0, 1.0);
        CHECK(v >= prev - 1e-12);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-12);
        prev = v;
    }
}

TEST_CASE("exit-time quadrature matches Monte Carlo with a fine grid") {
    McConfig cfg;
    cfg.n_paths = 1000000;
    cfg.dt = 5e-4;
    cfg.seed = 10007;
    cfg.n_workers = 4;
    const McEstimate mc = expected_exit_time(1.0, 0.0, make_constant2(1.0), 1.0, cfg);
    CHECK(std::abs(mc.mean - bm_truncated_exit(1.0, 0.0, 1.0)) <= 3.0 * mc.stderr_);
}

TEST_CASE("step-one constants") {
    CHECK(bm_lipschitz_bound(M_PI) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(bm_lipschitz_bound(0.0) == 0.0);
    CHECK(bm_lipschitz_bound(1.0) == doctest::Approx(0.5641895835477563).epsilon(1e-14));
    CHECK(bm_exit_sharp_lipschitz_bound(1.0) ==
          doctest::Approx(1.5957691216057308).epsilon(1e-14));
}

TEST_CASE("difference quotients respect the sharp bound everywhere and the printed "
          "constant away from the boundary") {
    const double printed = bm_lipschitz_bound(1.0);
    const double sharp = bm_exit_sharp_lipschitz_bound(1.0);
    double worst_all = 0.0, worst_far = 0.0;
    for (double a = 0.0; a < 3.0; a += 0.1)
        for (double b = a + 0.1; b <= 3.0; b += 0.1) {
            const double q = std::abs(bm_truncated_exit(b, 0.0, 1.0) -
                                      bm_truncated_exit(a, 0.0, 1.0)) /
                             (b - a);
            worst_all = std::max(worst_all, q);
            if (a >= 1.0) worst_far = std::max(worst_far, q);
        }
    CHECK(worst_all <= sharp + 1e-8);
    CHECK(worst_far <= printed + 1e-8);
    // Near the boundary the slope genuinely exceeds the printed constant.
    CHECK(worst_all > printed);
}

TEST_CASE("lamperti transform: constant volatilities") {
    const LampertiTransform unit([](double) { return 1.0; }, [](double) { return 0.0; }, -2.0,
                                 6.0);
    for (double x : {-1.0, 0.0, 0.5, 3.0}) {
        CHECK(unit.zeta(x) == doctest::Approx(x).epsilon(1e-12));
        CHECK(unit.transformed_drift(x) == 0.0);
    }

    const LampertiTransform twice([](double) { return 2.0; }, [](double) { return 0.0; }, -2.0,
                                  6.0);
    CHECK(twice.zeta(3.0) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(twice.zeta_inv(1.5) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(twice.transformed_drift(0.7) == 0.0);
}

TEST_CASE("lamperti transform: bounded smooth volatility round-trips") {
    const auto sigma = [](double x) { return 2.0 + 0.5 * std::tanh(x); };
    const auto sigma_prime = [](double x) {
        const double c = std::cosh(x);
        return 0.5 / (c * c);
    };
    const LampertiTransform lt(sigma, sigma_prime, -2.0, 6.0);

    // Frozen quadrature values for zeta.
    CHECK(lt.zeta(1.0) == doctest::Approx(0.4522574682331832).epsilon(1e-12));
    CHECK(lt.zeta(2.5) == doctest::Approx(1.0621292014766987).epsilon(1e-12));
    CHECK(lt.zeta(-0.5) == doctest::Approx(-0.2663131502730731).epsilon(1e-12));
    CHECK(lt.zeta(0.0) == 0.0);

    for (double x = -1.5; x <= 5.5; x += 0.25)
        CHECK(lt.zeta_inv(lt.zeta(x)) == doctest::Approx(x).epsilon(1e-10));

    CHECK(lt.transformed_drift(lt.zeta(1.0)) ==
          doctest::Approx(-0.5 * sigma_prime(1.0)).epsilon(1e-9));
}

TEST_CASE("lamperti transform rejects nonpositive volatility") {
    CHECK_THROWS_AS(LampertiTransform([](double x) { return x - 1.0; },
                                      [](double) { return 1.0; }, -1.0, 3.0),
                    PreconditionError);
}

TEST_CASE("lamperti equivalence: exit times agree between the two dynamics") {
    const auto sigma = [](double x) { return 2.0 + 0.5 * std::tanh(x); };
    const auto sigma_prime = [](double x) {
        const double c = std::cosh(x);
        return 0.5 / (c * c);
    };
    const LampertiTransform lt(sigma, sigma_prime, -6.0, 30.0);

    McConfig cfg;
    cfg.n_paths = 8000;
    cfg.dt = 2e-3;
    cfg.seed = 5;
    cfg.n_workers = 2;

    const double x0 = 1.0, T = 1.0;
    const McEstimate direct = expected_exit_time(
        x0, 0.0, [&](double x, double) { return sigma(x); }, T, cfg);

    McConfig cfg2 = cfg;
    cfg2.seed = 6;
    const ExitSimulation transformed = simulate_exit(
        lt.zeta(x0), 0.0, make_constant2(1.0),
        [&](double y, double) { return lt.transformed_drift(y); }, T, cfg2);
    const McEstimate mapped = transformed.exit_time_estimate();

    CHECK(std::abs(direct.mean - mapped.mean) <=
          3.0 * std::hypot(direct.stderr_, mapped.stderr_) + 3e-3);
}

TEST_CASE("time change: identity and constant factors") {
    const TimeChange id([](double) { return 1.0; }, 1.0);
    CHECK(id.t0() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(id.map(1.0) == 1.0);
    for (double t : {0.0, 0.3, 0.8}) CHECK(id.map(t) == doctest::Approx(t).epsilon(1e-10));

    const double c = 0.7, T = 2.0;
    const TimeChange scaled([c](double) { return c; }, T);
    CHECK(scaled.t0() == doctest::Approx(T * (1.0 - c * c)).epsilon(1e-10));
    for (double t : {0.0, 0.5, 1.3, 2.0})
        CHECK(scaled.map(t) == doctest::Approx(T - c * c * (T - t)).epsilon(1e-10));
}

TEST_CASE("time change: linear ramp against frozen quadrature values") {
    const TimeChange tc([](double s) { return 1.0 + s; }, 1.0);
    CHECK(tc.t0() == doctest::Approx(-4.0 / 3.0).epsilon(1e-10));
    CHECK(tc.map(0.5) == doctest::Approx(-13.0 / 24.0).epsilon(1e-10));
    CHECK(tc.map(1.0) == 1.0);
    CHECK(tc.map(0.0) == doctest::Approx(tc.t0()).epsilon(1e-12));
    for (double t : {0.05, 0.4, 0.77})
        CHECK(tc.inverse(tc.map(t)) == doctest::Approx(t).epsilon(1e-9));
}

TEST_CASE("time change rejects vanishing factors") {
    CHECK_THROWS_AS(TimeChange([](double s) { return s - 0.5; }, 1.0), PreconditionError);
}
