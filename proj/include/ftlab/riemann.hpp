#pragma once

#include "ftlab/curves.hpp"
#include "ftlab/system.hpp"

#include <utility>
#include <vector>

namespace ftlab {

// A state stored in physical variables u and Riemann coordinates v.
struct StatePoint {
    State u = State::Zero();
    Vec2 v = Vec2::Zero();
};

StatePoint make_state(const FluxSystem& sys, const State& u);
StatePoint state_from_riemann(const FluxSystem& sys, const Vec2& v);

enum class WaveKind { Shock, RarefactionPiece };

struct ElementaryWave {
    int family = 1;
    WaveKind kind = WaveKind::Shock;
    StatePoint left;
    StatePoint right;
    double speed = 0.0;
    double strength = 0.0;  // signed: negative for shocks
};

struct RiemannFan {
    StatePoint left, middle, right;
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    std::vector<ElementaryWave> waves;
};

// Smooth cutoff: 1 for s <= -2, 0 for s >= -1.
double interpolation_phi(double s);
double interpolation_phi_derivative(double s);

// Physical i-shock through `base` whose Riemann coordinate v_i moved by sigma < 0.
struct RiemannShock {
    StatePoint state;
    double rh_speed = 0.0;
};
RiemannShock shock_in_riemann(const FluxSystem& sys, const StatePoint& base, int family, double sigma);

// Phi_i^nu(v, sigma) in Riemann coordinates.
Vec2 interpolated_curve(const FluxSystem& sys, const Vec2& v, int family, double sigma, double nu);

RiemannFan solve_riemann(const FluxSystem& sys, double nu, const StatePoint& ul, const StatePoint& ur);
RiemannFan solve_riemann(const FluxSystem& sys, double nu, const State& ul, const State& ur);

// Speed lambda_i(omega-hat) averaged over the nu-grid cells crossed by [a, b] in
// the i-th Riemann coordinate; `other` is the fixed coordinate.
double grid_average_speed(const FluxSystem& sys, int family, double a, double b, double other, double nu);

struct ApproxErrors {
    double curve_error = 0.0;
    double speed_error = 0.0;
};
ApproxErrors approx_speed_error(const FluxSystem& sys, const Vec2& v_l, double sigma, double nu, int family = 1);

// Index j with j*nu <= x < (j+1)*nu, snapping values within round-off of a grid point.
long grid_index(double x, double nu);

}  // namespace ftlab
