#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ftlab/weight.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace ftlab;

namespace {

PiecewiseSolution burgers(const State& left, const std::vector<std::pair<double, State>>& jumps, double nu = 1e-4) {
    TrackOptions opts;
    opts.kappa = 40.0;
    return init_solution(system_by_name("decoupled-burgers"), nu, left, jumps, opts);
}

}  // namespace

TEST_CASE("weight ratio across a single front") {
    const double C1 = 1.0;
    const PiecewiseSolution s1 = burgers(State(0.1, 0), {{0.0, State(0.0, 0)}});
    REQUIRE(s1.fronts.size() == 1);
    const WeightProfile w1 = weight_profile(s1, C1, 40.0);
    CHECK(w1.right_limit(0) / w1.left_limit(0) == doctest::Approx(std::exp(-0.75 * C1 * 0.1)));
    // V = 0.1, Q = 0: the weight is largest left of the 1-wave
    CHECK(global_bounds(w1).sup_a == doctest::Approx(std::exp(0.75 * C1 * 0.1)));
    CHECK(w1.at(-1.0) == doctest::Approx(std::exp(0.075)));
    CHECK(w1.at(1.0) == doctest::Approx(1.0));

    const PiecewiseSolution s2 = burgers(State(0, 0.05), {{0.0, State(0, 0.0)}});
    REQUIRE(s2.fronts.size() == 1);
    CHECK(s2.fronts[0].family == 2);
    const WeightProfile w2 = weight_profile(s2, 2.0, 40.0);
    CHECK(w2.right_limit(0) / w2.left_limit(0) == doctest::Approx(std::exp(0.75 * 2.0 * 0.05)));
}

TEST_CASE("front brackets hold for weak fronts and fail for strong ones") {
    const PiecewiseSolution weak = burgers(State(1e-3, 0), {{0.0, State(0.0, 0)}}, 1e-8);
    const WeightProfile w = weight_profile(weak, 1.0, 40.0);
    const double ratio = w.right_limit(0) / w.left_limit(0);
    CHECK(ratio == doctest::Approx(0.99925).epsilon(1e-5));
    CHECK(ratio >= 0.998);
    CHECK(ratio <= 0.9995);
    const BracketReport ok = check_front_brackets(w, weak);
    CHECK(ok.checked == 1);
    CHECK(ok.violations.empty());

    // the bracket depends on C1 |s| only; at C1 |s| = 0.5 it still holds, at 1.5 it fails
    const PiecewiseSolution strong = burgers(State(0.5, 0), {{0.0, State(0.0, 0)}});
    CHECK(check_front_brackets(weight_profile(strong, 1.0, 40.0), strong).violations.empty());
    const BracketReport bad = check_front_brackets(weight_profile(strong, 3.0, 40.0), strong);
    CHECK(bad.violations.size() == 1);
}

TEST_CASE("log prefactor includes the interaction potential") {
    // 2-wave left of a 1-wave: Q = |s1 s2|
    const PiecewiseSolution s = burgers(State(0, 0.02), {{-0.5, State(0, 0.0)}, {0.5, State(-0.03, 0.0)}});
    const WeightProfile w = weight_profile(s, 1.0, 40.0);
    CHECK(w.Q == doctest::Approx(0.02 * 0.03));
    CHECK(w.log_prefactor() == doctest::Approx(0.75 * (0.05 + 1.5 * 40.0 * 0.02 * 0.03)));
}

TEST_CASE("pointwise decay across interactions") {
    // two 1-shocks merging
    PiecewiseSolution merge = burgers(State(0.2, 0), {{0.0, State(0.1, 0)}, {0.1, State(0.0, 0)}});
    const DecayReport d = check_interaction_decay(merge, 5.0, 1.0, 40.0);
    CHECK(d.interactions >= 1);
    CHECK(d.violations.empty());
    CHECK(d.max_log_increase <= 1e-12);

    std::mt19937_64 rng(9);
    for (const char* name : {"p-system-gamma2", "appendix-a-quadratic"}) {
        const FluxSystem& sys = system_by_name(name);
        std::uniform_real_distribution<double> u(-0.02, 0.02);
        for (int run = 0; run < 3; ++run) {
            std::vector<std::pair<double, State>> jumps;
            for (int k = 0; k < 6; ++k) jumps.push_back({-1.0 + 0.4 * k, sys.center + State(u(rng), u(rng))});
            PiecewiseSolution sol = init_solution(sys, 2e-3, sys.center, jumps);
            const WeightProfile w0 = weight_profile(sol, 1.0, 40.0);
            const GlobalBounds g = global_bounds(w0);
            CHECK(g.sup_a * g.sup_inv_a <= g.cumulative_bound * (1 + 1e-12));
            CHECK(check_front_brackets(w0, sol).violations.empty());
            const DecayReport r = check_interaction_decay(sol, 4.0, 1.0, 40.0);
            CHECK(r.violations.empty());
        }
    }
}

TEST_CASE("weight csv") {
    const PiecewiseSolution s = burgers(State(0.1, 0), {{0.0, State(0.0, 0)}});
    const std::string csv = weight_csv(weight_profile(s, 1.0, 40.0));
    CHECK(csv.find('\n') != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') >= 2);
}
