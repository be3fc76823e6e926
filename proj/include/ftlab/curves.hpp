#pragma once

#include "ftlab/system.hpp"

#include <vector>

namespace ftlab {

enum class CurveKind { Rarefaction, Shock };

// Which end of the shock the base state sits on. Left: base is u_L and the
// branch leaves along -r_i. Right: base is u_R and the branch leaves along +r_i.
enum class ShockSide { Left, Right };

struct WaveCurvePoint {
    double s = 0.0;
    State state = State::Zero();
    double sigma = 0.0;  // Rankine-Hugoniot speed, NaN for rarefaction points
    CurveKind kind = CurveKind::Rarefaction;
};

inline constexpr double kRk4Step = 1e-3;
inline constexpr double kShockStep = 1e-3;
inline constexpr double kNewtonTol = 1e-12;

// Integrates dR/ds = r_i(R) with classical RK4 (|step| <= h). s may be negative.
State integrate_rarefaction(const FluxSystem& sys, const State& base, int family, double s,
                            double h = kRk4Step, bool check_domain = true);

WaveCurvePoint rarefaction_curve(const FluxSystem& sys, const State& base, int family, double s);

WaveCurvePoint shock_curve(const FluxSystem& sys, const State& base, int family, double s,
                           ShockSide side = ShockSide::Left);

// Shock curve by a single Newton solve warm-started at (theta, sigma); returns
// false when Newton fails. Used on hot paths; shock_curve() is the robust one.
struct ShockSolve {
    double theta = 0.0;
    double sigma = 0.0;
    State state = State::Zero();
    bool ok = false;
};
ShockSolve shock_direct(const FluxSystem& sys, const State& base, int family, double s, ShockSide side,
                        const ShockSolve* warm = nullptr);

// Second-order shock-curve expansion base - r s + (s^2/2)(Dr r); the sign of the
// linear term follows `side`.
State shock_expansion(const FluxSystem& sys, const State& base, int family, double s, ShockSide side);

Vec2 riemann_invariants(const FluxSystem& sys, const State& u);
State riemann_invariants_inverse(const FluxSystem& sys, const Vec2& v);
// Jacobian d v / d u by central differences of the chart.
Mat2 riemann_invariants_jacobian(const FluxSystem& sys, const State& u);

struct StrengtheningPoint {
    double s = 0.0;
    double deta_ds = 0.0;
    double dsigma_ds = 0.0;
    bool ok = false;
};

struct StrengtheningReport {
    int family = 1;
    std::vector<StrengtheningPoint> points;
    bool all_ok = true;
};

StrengtheningReport check_strengthening(const FluxSystem& sys, const State& base, int family,
                                        const std::vector<double>& s_grid);

}  // namespace ftlab
