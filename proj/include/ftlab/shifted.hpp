#pragma once

#include "ftlab/fronttrack.hpp"
#include "ftlab/system.hpp"

#include <vector>

namespace ftlab {

// Admissible shift speeds: 1-shocks in [-c, lambda1_sup], 2-shocks in [lambda2_inf, c].
struct ShiftOptions {
    double c = 1.0;
    double lambda1_sup = 0.0;
    double lambda2_inf = 0.0;
    double C1 = 1.0;
    double weak = 1e-10;  // shocks weaker than this keep the classical speed
};

// Fills c and the lambda bounds from the system's validated ball.
ShiftOptions default_shift_options(const FluxSystem& sys, double C1 = 1.0);

struct ShockWeights {
    double a1 = 1.0;
    double a2 = 1.0;
};
// a(+)/a(-) = exp(-+3 C1 s0 / 4) across a 1- or 2-shock of strength s0.
ShockWeights shock_weights(int family, double s0, double C1);

struct ShiftChoice {
    double hdot = 0.0;
    double dissipation = 0.0;
};

// Minimises D(hdot) = a2[q(tr;uR) - hdot eta(tr|uR)] - a1[q(tl;uL) - hdot eta(tl|uL)]
// over [lo, hi]. D is affine, so the minimiser is an endpoint; a flat D keeps
// the Rankine-Hugoniot speed clipped to the interval.
ShiftChoice shift_speed(const FluxSystem& sys, const State& u_left, const State& u_right, double rh_speed,
                        const State& trace_left, const State& trace_right, double a1, double a2, double lo, double hi);

struct DissipationSample {
    double time = 0.0;
    double duration = 0.0;
    long front_id = 0;
    int family = 1;
    double s0 = 0.0;
    double hdot = 0.0;
    double rh_speed = 0.0;
    double dissipation = 0.0;
    bool sliding = false;
};

// A shifted front-tracking solution evolved together with its companion. Shocks
// of the shifted solution move at the speed chosen against the companion's
// exact traces; everything else keeps classical speeds.
class ShiftedRun {
public:
    ShiftedRun(PiecewiseSolution shifted, PiecewiseSolution companion, ShiftOptions opts);

    void advance(double t_target);
    double time() const { return shifted_.time; }
    const PiecewiseSolution& shifted() const { return shifted_; }
    const PiecewiseSolution& companion() const { return companion_; }
    const std::vector<DissipationSample>& samples() const { return samples_; }
    const ShiftOptions& options() const { return opts_; }
    std::size_t events() const { return events_; }

    // Physical shock (u_L, u_R, RH speed, strength) attached to front k.
    struct ShockData {
        State u_left, u_right;
        double rh_speed = 0.0;
        double s0 = 0.0;
    };
    ShockData shock_data(std::size_t k) const;

private:
    void choose_speeds();
    double next_crossing() const;
    void move_to(double t);

    PiecewiseSolution shifted_;
    PiecewiseSolution companion_;
    ShiftOptions opts_;
    std::vector<DissipationSample> samples_;
    std::vector<DissipationSample> open_;
    std::size_t events_ = 0;
};

ShiftedRun set_shifted_mode(PiecewiseSolution sol, PiecewiseSolution companion, const ShiftOptions& opts);

}  // namespace ftlab
