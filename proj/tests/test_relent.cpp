#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ftlab/curves.hpp"
#include "ftlab/errors.hpp"
#include "ftlab/relent.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace ftlab;

namespace {

// Piecewise constant sampling of ubar(t, .) with n cells across the fan.
PiecewiseSolution sampled_fan(const RarefactionProfile& p, double t, int n, double nu) {
    const double xl = p.v_left() * t, xr = p.v_right() * t;
    std::vector<std::pair<double, State>> jumps;
    for (int k = 0; k < n; ++k) {
        const double x = xl + (xr - xl) * k / n;
        jumps.push_back({x, p.ubar(t, x + 0.5 * (xr - xl) / n)});
    }
    jumps.push_back({xr, p.u_right()});
    PiecewiseSolution s = init_solution(p.system(), nu, p.u_left(), jumps);
    s.time = t;
    for (Front& f : s.fronts) f.t0 = t;
    return s;
}

}  // namespace

TEST_CASE("relative quantities vanish at coincidence") {
    const FluxSystem& p = system_by_name("p-system-gamma2");
    const RelativeQuantities r = relative_quantities(p, State(1.1, 0.1), State(1.1, 0.1));
    CHECK(r.eta_rel == 0.0);
    CHECK(r.q_rel == 0.0);
    CHECK(r.f_rel.norm() == 0.0);
    CHECK_THROWS_AS(relative_quantities(system_by_name("appendix-a-quadratic"), State(0, 0), State(0, 0)), NoEntropy);
}

TEST_CASE("quadratic entropy on decoupled Burgers") {
    const FluxSystem& b = system_by_name("decoupled-burgers");
    const State a(0.1, -0.2), c(-0.05, 0.15);
    const RelativeQuantities r = relative_quantities(b, a, c);
    const Vec2 d = a - c;
    CHECK(r.eta_rel == doctest::Approx(0.5 * d.squaredNorm()).epsilon(1e-14));
    CHECK((r.f_rel - Vec2(0.5 * d[0] * d[0], 0.5 * d[1] * d[1])).norm() < 1e-15);
    // q(a;b) = q(a) - q(b) - grad eta(b) (f(a) - f(b))
    const EntropyPair& e = *b.entropy;
    const double q = e.q(a) - e.q(c) - c.dot(b.flux(a) - b.flux(c));
    CHECK(r.q_rel == doctest::Approx(q).epsilon(1e-13));
}

TEST_CASE("relative entropy is equivalent to the squared distance") {
    const FluxSystem& p = system_by_name("p-system-gamma2");
    const EquivalenceConstants k = measure_equivalence(p);
    // hess eta = diag(2 v^-3, 1) and v in [0.7, 1.3], so eta(a|b)/|a-b|^2 lies in [1.3^-3, 0.7^-3]
    CHECK(k.eta_lower >= std::pow(1.3, -3.0) * 0.99);
    CHECK(k.eta_upper <= std::pow(0.7, -3.0) * 1.01);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ang(0.0, 2 * M_PI), pos(-0.15, 0.15);
    for (int n = 0; n < 200; ++n) {
        const State b = p.center + State(pos(rng), pos(rng));
        const double th = ang(rng);
        const State a = b + 0.05 * State(std::cos(th), std::sin(th));
        const double ratio = relative_entropy(p, a, b) / (a - b).squaredNorm();
        CHECK(ratio >= k.eta_lower * 0.95);
        CHECK(ratio <= k.eta_upper * 1.05);
    }
    CHECK(information_speed(p) >= k.max_speed);
}

TEST_CASE("shock pseudodistance") {
    const FluxSystem& p = system_by_name("p-system-gamma2");
    const WaveCurvePoint S = shock_curve(p, p.center, 1, 0.04);
    const PiecewiseSolution exact = init_solution(p, 1e-4, p.center, {{0.0, S.state}});
    CHECK(shock_pseudodistance(exact, p.center, S.state, 0.0, 1.0, 1.02, -1, 1) == 0.0);
    const PiecewiseSolution flat = init_solution(p, 1e-4, p.center, {});
    CHECK(shock_pseudodistance(flat, p.center, S.state, 0.0, 1.0, 1.02, -1, 1) ==
          doctest::Approx(1.02 * relative_entropy(p, p.center, S.state)));
}

TEST_CASE("shock dissipation slope") {
    const FluxSystem& p = system_by_name("p-system-gamma2");
    const WaveCurvePoint S = shock_curve(p, p.center, 1, 0.04);
    const State tl = p.center, tr = p.center;
    const double a1 = std::exp(0.03), a2 = 1.0;
    const double d0 = shock_dissipation(p, tl, tr, p.center, S.state, 0.0, a1, a2);
    const double d1 = shock_dissipation(p, tl, tr, p.center, S.state, 1.0, a1, a2);
    CHECK(std::isfinite(d0));
    const double slope = a1 * relative_entropy(p, tl, p.center) - a2 * relative_entropy(p, tr, S.state);
    CHECK(d1 - d0 == doctest::Approx(slope).epsilon(1e-12));
    CHECK_THROWS_AS(shock_dissipation_checked(p, 1, 0.04, 1.0, tl, tr, p.center, S.state, 0.0, 1.0, 1.0),
                    WeightBracketViolation);
}

TEST_CASE("rarefaction profile and weight") {
    const FluxSystem& p = system_by_name("p-system-gamma2");
    const double C = 2.0, s0 = 0.05;
    const RarefactionProfile r(p, p.center, 1, s0, C, C);
    CHECK(r.v_left() == doctest::Approx(wave_speed(p, p.center, 1)));
    CHECK(r.v_right() == doctest::Approx(wave_speed(p, r.u_right(), 1)));
    CHECK((r.u_right() - rarefaction_curve(p, p.center, 1, s0).state).norm() < 1e-10);
    CHECK(rarefaction_weight(r, 1.0, r.v_left() - 0.1) == 1.0);
    CHECK(rarefaction_weight(r, 1.0, r.v_right() + 0.1) == doctest::Approx(std::exp(-C * s0)));
    CHECK(rarefaction_weight(r, 1.0, r.v_left()) / rarefaction_weight(r, 1.0, r.v_right()) ==
          doctest::Approx(std::exp(C * s0)));
    double prev = -1.0;
    for (int k = 0; k <= 20; ++k) {
        const double xi = r.v_left() + (r.v_right() - r.v_left()) * k / 20.0;
        const double y = r.y_at(xi);
        CHECK(y >= prev);
        CHECK(r.lambda_at_y(y) == doctest::Approx(xi).epsilon(1e-9));
        prev = y;
    }
    CHECK(r.y_at(r.v_right()) == doctest::Approx(s0));
    // continuity across the fan edges
    CHECK((r.ubar(1.0, r.v_left() - 1e-12) - r.ubar(1.0, r.v_left() + 1e-12)).norm() < 1e-9);
    CHECK((r.ubar(1.0, r.v_right() - 1e-12) - r.ubar(1.0, r.v_right() + 1e-12)).norm() < 1e-9);

    CHECK_THROWS_AS(RarefactionProfile(p, p.center, 1, s0, 0.1, 1.0), CRangeViolation);
    CHECK_THROWS_AS(RarefactionProfile(p, p.center, 1, s0, 4.5, 1.0), CRangeViolation);
}

TEST_CASE("rarefaction pseudodistance") {
    const FluxSystem& p = system_by_name("p-system-gamma2");
    const RarefactionProfile r(p, p.center, 2, 0.05, 1.0, 1.0);
    const double d1 = rarefaction_pseudodistance(sampled_fan(r, 1.0, 50, 1e-8), r, -2, 4);
    const double d2 = rarefaction_pseudodistance(sampled_fan(r, 1.0, 100, 1e-8), r, -2, 4);
    CHECK(d1 < 1e-6);
    CHECK(d1 / d2 > 3.0);

    // vanishing fan: a == 1 and D is the plain relative entropy integral
    const RarefactionProfile z(p, p.center, 1, 1e-9, 1.0, 1.0);
    const State u = p.center + State(0.01, -0.02);
    const PiecewiseSolution flat = init_solution(p, 1e-3, u, {});
    PiecewiseSolution at1 = flat;
    at1.time = 1.0;
    const double expected = 2.0 * relative_entropy(p, u, p.center);
    CHECK(rarefaction_pseudodistance(at1, z, -1, 1) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("positivity scan") {
    const FluxSystem& p = system_by_name("p-system-gamma2");
    const auto grid = ball_grid(p.center, 0.5 * p.radius, 9);
    const auto rings = ring_offsets({1e-3, 4e-3, 1.6e-2}, 16);
    CHECK(rings.size() == 48);
    for (int family : {1, 2}) {
        const double C2 = choose_c2(p, family, grid, rings);
        const PositivityScan lo = positivity_scan(p, family, grid, rings, 0.25 * C2);
        const PositivityScan mid = positivity_scan(p, family, grid, rings, C2);
        const PositivityScan hi = positivity_scan(p, family, grid, rings, 4.0 * C2);
        CHECK(lo.passes);
        CHECK(mid.passes);
        CHECK(hi.passes);
        CHECK(lo.min_quotient > 0.0);
        CHECK(lo.K3_estimate > 0.0);
        CHECK(lo.min_quotient < mid.min_quotient);
    }
    // along the transversal eigenvector the C-term carries the quotient
    const EigenData e = eigensystem(p, p.center);
    const std::vector<Vec2> along{1e-3 * e.r[1]};
    const double q1 = positivity_scan(p, 1, {p.center}, along, 1.0).min_quotient;
    const double q2 = positivity_scan(p, 1, {p.center}, along, 2.0).min_quotient;
    CHECK(q2 > q1);
    CHECK(q2 - q1 > 0.5 * q1);
}

TEST_CASE("fan estimate on the approximate rarefaction") {
    const FluxSystem& p = system_by_name("p-system-gamma2");
    const RarefactionProfile r(p, p.center, 1, 0.05, 1.0, 1.0);
    std::vector<double> lhs;
    for (double nu : {4e-3, 2e-3, 1e-3}) {
        const PiecewiseSolution u = init_solution(p, nu, p.center, {{0.0, r.u_right()}});
        const double v = 0.5 * (r.v_left() + r.v_right());
        const FanEstimate f = fan_estimate_terms(u, r, v, 1.0, 1.0, 400);
        CHECK(f.dissipation_mass <= 1e-2 * f.sigma_bar_sq_t);
        lhs.push_back(std::abs(f.lhs));
    }
    const double mx = *std::max_element(lhs.begin(), lhs.end());
    CHECK(mx < 10.0 * r.sigma_bar() * r.sigma_bar());
    // just left of the fan both traces are u_L and only the u_R term survives
    const PiecewiseSolution u = init_solution(p, 1e-3, p.center, {{0.0, r.u_right()}});
    const double v = r.v_left() - 1e-3;
    const FanEstimate edge = fan_estimate_terms(u, r, v, 1.0, 1.0, 100);
    const RelativeQuantities q = relative_quantities(p, p.center, r.u_right());
    CHECK(edge.lhs == doctest::Approx(edge.a2 * (q.q_rel - v * q.eta_rel)).epsilon(1e-10));
}
