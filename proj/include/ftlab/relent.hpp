#pragma once

#include "ftlab/fronttrack.hpp"
#include "ftlab/system.hpp"

#include <vector>

namespace ftlab {

struct RelativeQuantities {
    double eta_rel = 0.0;  // eta(a|b)
    double q_rel = 0.0;    // q(a;b)
    Vec2 f_rel = Vec2::Zero();  // f(a|b)
};

RelativeQuantities relative_quantities(const FluxSystem& sys, const State& a, const State& b);
double relative_entropy(const FluxSystem& sys, const State& a, const State& b);
double relative_entropy_flux(const FluxSystem& sys, const State& a, const State& b);

// Entropy production [q] - s[eta] of a front, optionally relative to a fixed state.
double entropy_production(const FluxSystem& sys, const State& ul, const State& ur, double speed);
double relative_entropy_production(const FluxSystem& sys, const State& ul, const State& ur, double speed,
                                   const State& ref);

// Sup/inf of eta(a|b)/|a-b|^2, sup |q(a;b)|/eta(a|b) and the Lipschitz constant of
// q(a; .) measured on pairs drawn from an n x n grid of the validated ball.
struct EquivalenceConstants {
    double eta_lower = 0.0;
    double eta_upper = 0.0;
    double q_over_eta = 0.0;
    double q_lipschitz = 0.0;
    double max_speed = 0.0;
};
EquivalenceConstants measure_equivalence(const FluxSystem& sys, int n = 14, double radius_scale = 1.0);

// Speed c dominating every wave speed and |q(a;b)|/eta(a|b) on the ball.
double information_speed(const FluxSystem& sys, int n = 14, double radius_scale = 1.0);

// E_t = a1 int_lo^h eta(u|u_L) + a2 int_h^hi eta(u|u_R), exact for piecewise constant u.
double shock_pseudodistance(const PiecewiseSolution& u, const State& u_left, const State& u_right, double h,
                            double a1, double a2, double lo, double hi);

// a2 [q(u+;u_R) - hdot eta(u+|u_R)] - a1 [q(u-;u_L) - hdot eta(u-|u_L)]
double shock_dissipation(const FluxSystem& sys, const State& trace_left, const State& trace_right,
                         const State& u_left, const State& u_right, double hdot, double a1, double a2);

// Throws WeightBracketViolation unless the ratio a1/a2 lies in the bracket
// [1 + C s0/2, 1 + 2 C s0] (family 1) or a2/a1 lies in it (family 2).
void check_shock_weights(int family, double s0, double a1, double a2, double C1);

double shock_dissipation_checked(const FluxSystem& sys, int family, double s0, double C1, const State& trace_left,
                                 const State& trace_right, const State& u_left, const State& u_right, double hdot,
                                 double a1, double a2);

// Self-similar rarefaction u_bar(t,x) = R^i_{u_L}(y(t,x)) with weight exp((-1)^i C y).
class RarefactionProfile {
public:
    RarefactionProfile(const FluxSystem& sys, const State& u_left, int family, double s0, double C, double C2);

    const FluxSystem& system() const { return *sys_; }
    int family() const { return family_; }
    double s0() const { return s0_; }
    double C() const { return C_; }
    const State& u_left() const { return u_left_; }
    const State& u_right() const { return u_right_; }
    double v_left() const { return v_left_; }
    double v_right() const { return v_right_; }

    State state_at_y(double y) const;
    double lambda_at_y(double y) const;
    double dlambda_dy(double y) const;
    double y_at(double xi) const;  // xi = x / t
    State ubar(double t, double x) const;
    double weight_at_y(double y) const;
    // sup over the fan of |u_L - u_bar| plus |v_L - v_R|
    double sigma_bar() const;

private:
    const FluxSystem* sys_;
    State u_left_, u_right_;
    int family_;
    double s0_, C_;
    double v_left_ = 0.0, v_right_ = 0.0;
    double h_ = 0.0;
    std::vector<State> R_;
    std::vector<Vec2> dR_;
    std::vector<double> lambda_;
};

double rarefaction_weight(const RarefactionProfile& p, double t, double x);

// D_t = int_lo^hi a eta(u|u_bar); fan part by 5-point Gauss-Legendre in y on
// panels cut at 64 uniform y points and at the images of the fronts of u.
double rarefaction_pseudodistance(const PiecewiseSolution& u, const RarefactionProfile& p, double lo, double hi);

struct PositivityScan {
    double min_quotient = 0.0;
    double K3_estimate = 0.0;
    bool passes = false;
    State worst_ubar = State::Zero();
    Vec2 worst_offset = Vec2::Zero();
};

// Minimum over ubar_grid x offsets of
// [(-1)^{i+1} C (q(u;ub) - lambda_i(ub) eta(u|ub)) + r_i^T H(ub) f(u|ub)] / |u - ub|^2.
PositivityScan positivity_scan(const FluxSystem& sys, int family, const std::vector<State>& ubar_grid,
                               const std::vector<Vec2>& offsets, double C);

// Offsets on rings of the given radii with `directions` angles each.
std::vector<Vec2> ring_offsets(const std::vector<double>& radii, int directions);

// Smallest C2 from a geometric ladder for which the scan is positive at C2/4, C2 and 4 C2.
double choose_c2(const FluxSystem& sys, int family, const std::vector<State>& ubar_grid,
                 const std::vector<Vec2>& offsets);

struct FanEstimate {
    double lhs = 0.0;
    double sigma_bar = 0.0;
    double sigma_bar_sq_t = 0.0;
    double dissipation_mass = 0.0;  // |mu_u| over the fan cone
    double a1 = 1.0, a2 = 1.0;
};

// Evolves `u` (copied, at time 0) to time t, integrating the flux difference
// along the ray x = v tau with `steps` midpoint samples.
FanEstimate fan_estimate_terms(PiecewiseSolution u, const RarefactionProfile& p, double v, double t,
                               double C2, int steps = 2000);

}  // namespace ftlab
