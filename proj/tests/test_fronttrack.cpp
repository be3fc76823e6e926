#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ftlab/errors.hpp"
#include "ftlab/fronttrack.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace ftlab;

namespace {

Front make(int family, double sigma, bool shock) {
    Front f;
    f.family = family;
    f.sigma = sigma;
    f.kind = shock ? WaveKind::Shock : WaveKind::RarefactionPiece;
    return f;
}

// Random jumps around the center, all inside B_{amp}.
std::vector<std::pair<double, State>> random_jumps(std::mt19937_64& rng, const FluxSystem& sys, int n, double amp) {
    std::uniform_real_distribution<double> d(-amp, amp);
    std::vector<std::pair<double, State>> out;
    for (int k = 0; k < n; ++k) out.push_back({-1.0 + 2.0 * (k + 0.5) / n, sys.center + State(d(rng), d(rng))});
    return out;
}

}  // namespace

TEST_CASE("single shock jump gives one front at the solver speed") {
    const FluxSystem& p = system_by_name("p-system-gamma2");
    const double nu = 1e-3;
    const StatePoint L = make_state(p, p.center);
    const RiemannShock sh = shock_in_riemann(p, L, 1, -0.08);  // below -2 sqrt(nu)
    const PiecewiseSolution sol = init_solution(p, nu, L.u, {{0.0, sh.state.u}});
    REQUIRE(sol.fronts.size() == 1);
    const RiemannFan fan = solve_riemann(p, nu, L.u, sh.state.u);
    CHECK(sol.fronts[0].speed == fan.waves[0].speed);
    CHECK(sol.fronts[0].family == 1);
    CHECK_FALSE(next_interaction(sol).has_value());

    PiecewiseSolution moved = sol;
    advance(moved, 2.0);
    CHECK(moved.position(0) == doctest::Approx(2.0 * fan.waves[0].speed));
    CHECK(moved.interactions == 0);
}

TEST_CASE("next interaction is the earliest adjacent collision, leftmost on ties") {
    // Burgers 1-shocks with RH speeds 0.35, 0.25, 0.15, 0.05
    const FluxSystem& b = system_by_name("decoupled-burgers");
    const double nu = 1e-4;
    PiecewiseSolution s = init_solution(b, nu, State(0.4, 0),
                                        {{0.0, State(0.3, 0)}, {0.1, State(0.2, 0)}, {0.5, State(0.1, 0)},
                                         {0.6, State(0.0, 0)}});
    REQUIRE(s.fronts.size() == 4);
    auto ev = next_interaction(s);
    REQUIRE(ev);
    CHECK(ev->time == doctest::Approx(1.0));
    CHECK(ev->first == 0);
    CHECK(ev->last == 1);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> du(0.0, 0.05), dx(0.02, 0.3);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::pair<double, State>> jumps;
        double u = 0.5, x = 0.0;
        for (int k = 0; k < 5; ++k) {
            u -= 0.02 + du(rng);
            x += dx(rng);
            jumps.push_back({x, State(u, 0)});
        }
        const PiecewiseSolution sol = init_solution(b, nu, State(0.5, 0), jumps);
        double best = kInf;
        std::size_t first = 0;
        for (std::size_t k = 0; k + 1 < sol.fronts.size(); ++k) {
            const double closing = sol.fronts[k].speed - sol.fronts[k + 1].speed;
            if (closing <= 0) continue;
            const double t = (sol.position(k + 1) - sol.position(k)) / closing;
            if (t < best) {
                best = t;
                first = k;
            }
        }
        const auto e = next_interaction(sol);
        REQUIRE(e);
        CHECK(e->time == doctest::Approx(best).epsilon(1e-12));
        CHECK(e->first == first);
    }
}

TEST_CASE("Glimm functionals count approaching pairs") {
    // two rarefaction pieces of one family do not approach
    std::vector<Front> r{make(1, 1e-3, false), make(1, 2e-3, false)};
    GlimmFunctionals g = glimm_functionals(r, 40.0);
    CHECK(g.Q == 0.0);
    CHECK(g.V == doctest::Approx(3e-3));
    // 2-wave left of 1-wave approaches
    std::vector<Front> h{make(2, 0.01, false), make(1, -0.02, true)};
    g = glimm_functionals(h, 40.0);
    CHECK(g.Q == doctest::Approx(2e-4));
    CHECK(g.U == doctest::Approx(0.03 + 40.0 * 2e-4));
    // 1-wave left of 2-wave does not
    std::vector<Front> o{make(1, -0.02, true), make(2, 0.01, false)};
    CHECK(glimm_functionals(o, 40.0).Q == 0.0);
    // same family with a shock approaches
    std::vector<Front> s{make(1, 0.01, false), make(1, -0.02, true), make(1, 0.03, false)};
    CHECK(glimm_functionals(s, 40.0).Q == doctest::Approx(0.01 * 0.02 + 0.02 * 0.03));
}

TEST_CASE("head-on shock interaction decreases U") {
    const FluxSystem& p = system_by_name("p-system-gamma2");
    const double nu = 1e-3, kappa = 40.0;
    const StatePoint L = make_state(p, p.center);
    const StatePoint M = state_from_riemann(p, interpolated_curve(p, L.v, 2, -0.04, nu));
    const StatePoint R = state_from_riemann(p, interpolated_curve(p, M.v, 1, -0.03, nu));
    TrackOptions opts;
    opts.kappa = kappa;
    PiecewiseSolution sol = init_solution(p, nu, L.u, {{-0.1, M.u}, {0.1, R.u}}, opts);
    REQUIRE(sol.fronts.size() == 2);
    const auto ev = next_interaction(sol);
    REQUIRE(ev);
    resolve_interaction(sol, *ev);
    REQUIRE(sol.log.size() == 1);
    const InteractionRecord& rec = sol.log[0];
    CHECK(rec.approaching);
    CHECK(rec.outgoing.size() == 2);
    CHECK(rec.delta_U <= -0.5 * kappa * 0.04 * 0.03 + 1e-10);
    CHECK(sol.time == doctest::Approx(ev->time));
}

TEST_CASE("U is monotone and comparable to the total variation") {
    std::mt19937_64 rng(21);
    for (const char* name : {"p-system-gamma2", "appendix-a-quadratic", "decoupled-burgers"}) {
        const FluxSystem& sys = system_by_name(name);
        for (int run = 0; run < 4; ++run) {
            PiecewiseSolution sol = init_solution(sys, 2e-3, sys.center, random_jumps(rng, sys, 6, 0.02));
            const double bv = bv_norm(sol, -kInf, kInf);
            const double V = glimm_functionals(sol).V;
            CHECK(V / bv > 0.2);
            CHECK(V / bv < 5.0);
            double prev = glimm_functionals(sol).U;
            while (auto ev = next_interaction(sol)) {
                if (ev->time > 5.0) break;
                resolve_interaction(sol, *ev);
                const double U = glimm_functionals(sol).U;
                CHECK(U <= prev + 1e-10);
                prev = U;
            }
        }
    }
}

TEST_CASE("profile queries") {
    const FluxSystem& b = system_by_name("decoupled-burgers");
    const PiecewiseSolution s = init_solution(b, 1e-4, State(0.3, 0), {{0.0, State(0.2, 0)}, {1.0, State(0.1, 0)}});
    CHECK(s.lower_front(-1.0) == 0);
    CHECK(s.lower_front(0.5) == 1);
    CHECK(s.lower_front(2.0) == 2);
    CHECK(s.left_limit(0.5).u[0] == doctest::Approx(0.2));
    CHECK(s.right_limit(-0.5).u[0] == doctest::Approx(0.3));
    CHECK(l1_distance(s, s, -2, 2) == 0.0);

    const PiecewiseSolution t = init_solution(b, 1e-4, State(0.3, 0), {{0.5, State(0.2, 0)}, {1.0, State(0.1, 0)}});
    // differs by 0.1 on [0, 0.5]
    CHECK(l1_distance(s, t, -2, 2) == doctest::Approx(0.05));
    CHECK(l1_distance(t, s, -2, 2) == doctest::Approx(0.05));
    CHECK(l2_distance(s, t, -2, 2) == doctest::Approx(0.1 * std::sqrt(0.5)));
    CHECK(linf_deviation(s, State(0.3, 0), -2, 2) == doctest::Approx(0.2));
    CHECK(tv_window(s, 0.5) == doctest::Approx(0.1));
    CHECK(tv_window(s, 1.0) == doctest::Approx(0.2));
    const Cells c = cells_on(s, -1, 2);
    CHECK(c.values.size() == 3);
    CHECK(c.x.front() == -1.0);
    CHECK(c.x.back() == 2.0);
}

TEST_CASE("front tracking errors") {
    const FluxSystem& b = system_by_name("decoupled-burgers");
    CHECK_THROWS_AS(init_solution(b, 1e-3, State(0, 0), {{0.5, State(0.1, 0)}, {0.2, State(0, 0)}}), ConfigError);
    TrackOptions tight;
    tight.epsilon = 1e-3;
    CHECK_THROWS_AS(init_solution(b, 1e-3, State(0, 0), {{0.0, State(-0.1, 0)}}, tight), DomainViolation);
    TrackOptions capped;
    capped.max_interactions = 2;
    std::mt19937_64 rng(1);
    PiecewiseSolution sol = init_solution(b, 1e-3, State(0, 0), random_jumps(rng, b, 8, 0.05), capped);
    CHECK_THROWS_AS(advance(sol, 100.0), InteractionOverflow);
    PiecewiseSolution later = init_solution(b, 1e-3, State(0, 0), {{0.0, State(-0.1, 0)}});
    advance(later, 1.0);
    CHECK_THROWS_AS(advance(later, 0.5), ConfigError);
}
