#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ftlab/errors.hpp"
#include "ftlab/system.hpp"

#include <cmath>
#include <random>

using namespace ftlab;

TEST_CASE("quadratic flux eigensystem at the origin") {
    const FluxSystem& s = system_by_name("appendix-a-quadratic");
    const EigenData e = eigensystem(s, State(0, 0));
    CHECK(e.lambda[0] == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(e.lambda[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK((e.r[0] - Vec2(1, 0)).norm() < 1e-14);
    CHECK((e.r[1] - Vec2(0, 1)).norm() < 1e-14);
}

TEST_CASE("p-system eigenvalues at (1,0)") {
    // J = [[0,-1],[p'(1),0]], p'(1) = -2 -> lambda^2 = 2
    const FluxSystem& s = system_by_name("p-system-gamma2");
    const EigenData e = eigensystem(s, State(1, 0));
    CHECK(e.lambda[0] == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-14));
    CHECK(e.lambda[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("eigen decomposition is consistent on random states") {
    std::mt19937_64 rng(3);
    for (const FluxSystem& s : builtin_systems()) {
        std::uniform_real_distribution<double> d(-0.7 * s.radius, 0.7 * s.radius);
        for (int k = 0; k < 50; ++k) {
            const State u = s.center + State(d(rng), d(rng));
            const EigenData e = eigensystem(s, u);
            const Mat2 J = s.jacobian(u);
            CHECK(e.lambda[0] < e.lambda[1]);
            for (int i = 0; i < 2; ++i) {
                CHECK((J * e.r[i] - e.lambda[i] * e.r[i]).norm() < 1e-12);
                CHECK(std::abs(e.r[i].norm() - 1.0) < 1e-12);
                for (int j = 0; j < 2; ++j) CHECK(std::abs(e.l[i].dot(e.r[j]) - (i == j)) < 1e-12);
            }
            CHECK(wave_speed(s, u, 1) == doctest::Approx(e.lambda[0]));
        }
    }
}

TEST_CASE("analytic jacobians agree with finite differences") {
    for (const FluxSystem& s : builtin_systems()) {
        const State u = s.center + State(0.3, -0.2) * s.radius;
        const Mat2 fd = fd_jacobian(s.flux, u, 1e-3);
        CHECK((fd - s.jacobian(u)).norm() < 1e-9);
    }
}

TEST_CASE("domain and hyperbolicity errors") {
    const FluxSystem& s = system_by_name("appendix-a-quadratic");
    CHECK_THROWS_AS(eigensystem(s, State(1, 1)), OutOfDomain);
    CHECK_NOTHROW(eigensystem(s, State(1, 1), false));
    CHECK_THROWS_AS(eigensystem(s, State(NAN, 0)), OutOfDomain);
    CHECK_THROWS_AS(system_by_name("no-such-system"), ConfigError);
    CHECK_THROWS_AS(p_system(1.0), ConfigError);

    FluxSystem deg = linear_advection_system();
    deg.jacobian = [](const State&) { return Mat2::Identity().eval(); };
    CHECK_THROWS_AS(eigensystem(deg, State(0, 0)), NonHyperbolic);
}

TEST_CASE("genuine nonlinearity values") {
    const FluxSystem& q = system_by_name("appendix-a-quadratic");
    const auto g0 = check_genuine_nonlinearity(q, {State(0, 0)});
    REQUIRE(g0.size() == 2);
    CHECK(g0[0].value == doctest::Approx(2.0));
    CHECK(g0[1].value == doctest::Approx(2.0));

    const FluxSystem& b = system_by_name("decoupled-burgers");
    for (const GnlEntry& e : check_genuine_nonlinearity(b, {State(0, 0), State(0.1, -0.2)})) {
        CHECK(e.value == doctest::Approx(1.0));
        CHECK_FALSE(e.flagged);
    }

    const FluxSystem& lin = system_by_name("linear-advection2");
    for (const GnlEntry& e : check_genuine_nonlinearity(lin, {State(0, 0)})) {
        CHECK(e.value == 0.0);
        CHECK(e.flagged);
    }
}

TEST_CASE("Smoller-Johnson cross terms") {
    const FluxSystem& q = system_by_name("appendix-a-quadratic");
    const SjReport r = check_smoller_johnson(q, {State(0, 0)});
    REQUIRE(r.entries.size() == 2);
    for (const SjEntry& e : r.entries)
        if (e.i == 1 && e.j == 2) CHECK(e.value == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK_FALSE(r.passes);

    const SjReport lin = check_smoller_johnson(system_by_name("linear-advection2"), ball_grid(State(0, 0), 0.5, 5));
    CHECK(lin.passes);
    CHECK(lin.min_value == 0.0);

    // p-system: f'' only has d2p in the second component, so l_i f''(r_j, r_j) = l_i[1] p''(v) r_j[0]^2
    const FluxSystem& p = system_by_name("p-system-gamma2");
    const State u(1.1, 0.05);
    const EigenData e = eigensystem(p, u);
    const double d2p = 6.0 * std::pow(u[0], -4.0);
    const SjReport pr = check_smoller_johnson(p, {u});
    for (const SjEntry& s : pr.entries) {
        const Vec2& rj = e.r[s.j - 1];
        CHECK(s.value == doctest::Approx(e.l[s.i - 1][1] * d2p * rj[0] * rj[0]).epsilon(1e-12));
    }
}

TEST_CASE("entropy pairs are compatible") {
    for (const FluxSystem& s : builtin_systems()) {
        if (!s.has_entropy()) {
            CHECK_THROWS_AS(check_entropy_pair(s, {s.center}), NoEntropy);
            continue;
        }
        const EntropyCheck c = check_entropy_pair(s, ball_grid(s.center, s.radius, 12));
        CHECK(c.passes);
        CHECK(c.max_residual < 1e-10);
    }
}

TEST_CASE("builtin registry") {
    const FluxSystem& q = system_by_name("appendix-a-quadratic");
    CHECK(q.center.norm() == 0.0);
    CHECK_FALSE(q.has_entropy());
    CHECK(system_by_name("p-system-gamma2").has_entropy());
    CHECK(builtin_systems().size() == 4);
}

TEST_CASE("ball grid stays in the disc") {
    const auto g = ball_grid(State(1, 0), 0.3, 20);
    CHECK(g.size() > 200);
    CHECK(g.size() < 400);
    for (const State& u : g) CHECK((u - State(1, 0)).norm() <= 0.3);
}
