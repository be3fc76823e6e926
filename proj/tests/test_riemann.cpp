#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ftlab/errors.hpp"
#include "ftlab/fit.hpp"
#include "ftlab/riemann.hpp"

#include <cmath>
#include <random>

using namespace ftlab;

TEST_CASE("interpolation cutoff") {
    CHECK(interpolation_phi(-3.0) == 1.0);
    CHECK(interpolation_phi(-2.0) == 1.0);
    CHECK(interpolation_phi(0.0) == 0.0);
    CHECK(interpolation_phi(-1.0) == 0.0);
    double prev = 1.0;
    for (double s = -2.0; s <= -1.0; s += 0.01) {
        const double p = interpolation_phi(s);
        CHECK(p <= prev + 1e-15);
        prev = p;
        const double h = 1e-6;
        const double fd = (interpolation_phi(s + h) - interpolation_phi(s - h)) / (2 * h);
        CHECK(interpolation_phi_derivative(s) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("grid index snaps round-off") {
    CHECK(grid_index(3 * 0.1, 0.1) == 3);
    CHECK(grid_index(0.7 * 0.1, 0.1) == 0);
    CHECK(grid_index(-0.05, 0.1) == -1);
    CHECK(grid_index(-0.1, 0.1) == -1);
}

TEST_CASE("interpolated curve matches the exact branches") {
    const FluxSystem& p = system_by_name("p-system-gamma2");
    const double nu = 0.01;
    const Vec2 v = riemann_invariants(p, p.center);
    const Vec2 up = interpolated_curve(p, v, 1, 0.3, nu);
    CHECK(up == v + Vec2(0.3, 0.0));
    const Vec2 dn = interpolated_curve(p, v, 1, -0.3, nu);
    const RiemannShock sh = shock_in_riemann(p, make_state(p, p.center), 1, -0.3);
    CHECK((dn - sh.state.v).norm() == 0.0);
    CHECK(sh.state.v[0] - v[0] == doctest::Approx(-0.3).epsilon(1e-12));
}

TEST_CASE("grid fan for a rarefaction spanning 2.5 nu") {
    const FluxSystem& b = system_by_name("decoupled-burgers");
    const double nu = 0.01;
    const RiemannFan fan = solve_riemann(b, nu, State(0.2 * nu, 0.0), State(2.7 * nu, 0.0));
    REQUIRE(fan.waves.size() == 3);
    const double strengths[] = {0.8 * nu, nu, 0.7 * nu};
    const double speeds[] = {0.5 * nu, 1.5 * nu, 2.5 * nu};  // lambda_1 = u at cell midpoints
    for (int k = 0; k < 3; ++k) {
        CHECK(fan.waves[k].kind == WaveKind::RarefactionPiece);
        CHECK(fan.waves[k].family == 1);
        CHECK(fan.waves[k].strength == doctest::Approx(strengths[k]).epsilon(1e-12));
        CHECK(fan.waves[k].speed == doctest::Approx(speeds[k]).epsilon(1e-12));
    }
}

TEST_CASE("strong shock uses the Rankine-Hugoniot speed") {
    const double nu = 1e-4;
    const FluxSystem& b = system_by_name("decoupled-burgers");
    const RiemannFan fb = solve_riemann(b, nu, State(0.05, 0.0), State(0.05 - 3 * std::sqrt(nu), 0.0));
    REQUIRE(fb.waves.size() == 1);
    CHECK(fb.waves[0].kind == WaveKind::Shock);
    CHECK(fb.waves[0].speed == doctest::Approx(0.035).epsilon(1e-12));

    const FluxSystem& p = system_by_name("p-system-gamma2");
    const StatePoint L = make_state(p, State(1.02, 0.01));
    const RiemannShock sh = shock_in_riemann(p, L, 1, -3 * std::sqrt(nu));
    const RiemannFan f = solve_riemann(p, nu, L, sh.state);
    REQUIRE(f.waves.size() == 1);
    CHECK(f.waves[0].speed == doctest::Approx(sh.rh_speed).epsilon(1e-12));
    const WaveCurvePoint S = shock_curve(p, L.u, 1, (sh.state.u - L.u).norm());
    CHECK((S.state - sh.state.u).norm() < 1e-10);
    CHECK(S.sigma == doctest::Approx(sh.rh_speed).epsilon(1e-10));
}

TEST_CASE("interpolated shock speed") {
    const double nu = 1e-4;
    const FluxSystem& b = system_by_name("decoupled-burgers");
    const double sigma = -1.5 * std::sqrt(nu);
    const double ul = 0.0305;
    const RiemannFan f = solve_riemann(b, nu, State(ul, 0.0), State(ul + sigma, 0.0));
    REQUIRE(f.waves.size() == 1);
    const double ph = interpolation_phi(-1.5);
    const double rh = ul + 0.5 * sigma;
    const double grid = grid_average_speed(b, 1, ul + sigma, ul, 0.0, nu);
    CHECK(f.waves[0].speed == doctest::Approx(ph * rh + (1 - ph) * grid).epsilon(1e-12));
    // average of cell midpoints weighted by overlap equals the mean of u up to nu/2
    CHECK(std::abs(grid - (ul + 0.5 * sigma)) <= 0.5 * nu);
}

TEST_CASE("approximation errors") {
    const FluxSystem& p = system_by_name("p-system-gamma2");
    const Vec2 v = riemann_invariants(p, State(1.01, 0.0));
    std::vector<double> ratios;
    for (double nu : {4e-3, 2e-3, 1e-3, 5e-4, 2.5e-4}) {
        const ApproxErrors e = approx_speed_error(p, v, -1.5 * std::sqrt(nu), nu);
        ratios.push_back(e.speed_error / nu);
    }
    for (double r : ratios) CHECK(r < 2.0);

    std::vector<double> ss, errs;
    const double nu = 0.01;
    for (double s = 0.004; s < 0.09; s *= 1.4) {
        ss.push_back(s);
        errs.push_back(approx_speed_error(p, v, -s, nu).curve_error);
    }
    CHECK(fit_loglog(ss, errs).slope >= 2.5);
    CHECK(approx_speed_error(p, v, -0.3, nu).curve_error == 0.0);
    CHECK(approx_speed_error(p, v, 0.1, nu).curve_error == 0.0);
}

TEST_CASE("random fans are consistent") {
    std::mt19937_64 rng(11);
    const double nu = 1e-3;
    for (const char* name : {"p-system-gamma2", "appendix-a-quadratic", "decoupled-burgers"}) {
        const FluxSystem& sys = system_by_name(name);
        std::uniform_real_distribution<double> d(-0.02, 0.02);
        for (int k = 0; k < 40; ++k) {
            const StatePoint L = make_state(sys, sys.center + State(d(rng), d(rng)));
            const StatePoint R = make_state(sys, L.u + State(d(rng), d(rng)));
            const RiemannFan f = solve_riemann(sys, nu, L, R);
            REQUIRE_FALSE(f.waves.empty());
            CHECK((f.waves.front().left.u - L.u).norm() == 0.0);
            CHECK((f.waves.back().right.u - R.u).norm() < 1e-12);
            double s1 = 0.0, s2 = 0.0;
            for (std::size_t w = 0; w < f.waves.size(); ++w) {
                const ElementaryWave& e = f.waves[w];
                if (w > 0) {
                    CHECK(e.speed > f.waves[w - 1].speed);
                    CHECK((e.left.u - f.waves[w - 1].right.u).norm() < 1e-12);
                }
                if (e.kind == WaveKind::RarefactionPiece) {
                    CHECK(e.strength > 0.0);
                    CHECK(e.strength <= nu * (1 + 1e-9));
                } else {
                    CHECK(e.strength < 0.0);
                }
                (e.family == 1 ? s1 : s2) += e.strength;
            }
            CHECK(s1 == doctest::Approx(f.sigma1).epsilon(1e-12).scale(1.0));
            CHECK(s2 == doctest::Approx(f.sigma2).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("trivial and linear problems") {
    const FluxSystem& lin = system_by_name("linear-advection2");
    const RiemannFan same = solve_riemann(lin, 1e-3, State(0.1, 0.1), State(0.1, 0.1));
    CHECK(same.waves.empty());
    const RiemannFan f = solve_riemann(lin, 1e-3, State(0.0, 0.0), State(0.0005, 0.0005));
    REQUIRE(f.waves.size() == 2);
    CHECK(f.waves[0].speed == -1.0);
    CHECK(f.waves[1].speed == 1.0);
}
