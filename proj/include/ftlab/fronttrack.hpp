#pragma once

#include "ftlab/riemann.hpp"
#include "ftlab/system.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace ftlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Mode { Classical, Shifted };

struct Front {
    long id = 0;
    int family = 1;
    WaveKind kind = WaveKind::Shock;
    double sigma = 0.0;
    double x0 = 0.0;  // position at time t0
    double t0 = 0.0;
    double speed = 0.0;
    double classical_speed = 0.0;
    double hit_time = kInf;  // collision with the right neighbour

    double position(double t) const { return x0 + speed * (t - t0); }
};

struct WaveTag {
    int family = 1;
    double sigma = 0.0;
    WaveKind kind = WaveKind::Shock;
};

struct InteractionRecord {
    double time = 0.0;
    double position = 0.0;
    std::vector<WaveTag> incoming;
    std::vector<WaveTag> outgoing;
    double delta_U = 0.0;
    double delta_Q = 0.0;
    double delta_V = 0.0;
    double U_before = 0.0;
    double U_after = 0.0;
    bool approaching = false;  // exactly two incoming fronts forming an approaching pair
};

struct GlimmFunctionals {
    double V = 0.0;
    double Q = 0.0;
    double U = 0.0;
    double kappa = 0.0;
};

struct TrackOptions {
    double kappa = 40.0;
    std::size_t max_interactions = 1000000;
    bool record_log = true;
    double epsilon = kInf;  // upper bound on U at initialisation
};

// Piecewise constant profile: states[k] | fronts[k] | states[k+1].
class PiecewiseSolution {
public:
    const FluxSystem* sys = nullptr;
    double nu = 1e-3;
    double time = 0.0;
    Mode mode = Mode::Classical;
    TrackOptions opts;
    std::vector<StatePoint> states;
    std::vector<Front> fronts;
    std::vector<InteractionRecord> log;
    std::size_t interactions = 0;

    const StatePoint& leftmost() const { return states.front(); }
    double position(std::size_t k) const { return fronts[k].position(time); }
    std::vector<double> positions() const;

    // Limits u(time, x-) and u(time, x+).
    const StatePoint& left_limit(double x) const;
    const StatePoint& right_limit(double x) const;
    // Index of the first front with position >= x (at the current time).
    std::size_t lower_front(double x) const;

    // Re-anchor front k at the current time with a new speed.
    void set_speed(std::size_t k, double speed);
    void refresh_hit_time(std::size_t k);
    void refresh_all_hit_times();

    long next_id = 0;
};

PiecewiseSolution init_solution(const FluxSystem& sys, double nu, const State& leftmost,
                                const std::vector<std::pair<double, State>>& jumps, const TrackOptions& opts = {});

struct NextInteraction {
    double time = 0.0;
    double position = 0.0;
    std::size_t first = 0;  // leftmost front taking part
    std::size_t last = 0;   // rightmost front taking part
};

std::optional<NextInteraction> next_interaction(const PiecewiseSolution& sol);

// Resolve one interaction (the result of next_interaction) and move time to it.
void resolve_interaction(PiecewiseSolution& sol, const NextInteraction& ev);

void advance(PiecewiseSolution& sol, double t_target);

GlimmFunctionals glimm_functionals(const PiecewiseSolution& sol);
GlimmFunctionals glimm_functionals(const std::vector<Front>& fronts, double kappa);

double bv_norm(const PiecewiseSolution& sol, double a, double b);
double tv_window(const PiecewiseSolution& sol, double L);
double l1_distance(const PiecewiseSolution& a, const PiecewiseSolution& b, double lo, double hi);
double l2_distance(const PiecewiseSolution& a, const PiecewiseSolution& b, double lo, double hi);
double linf_deviation(const PiecewiseSolution& sol, const State& ref, double lo, double hi);
double max_abs_speed(const PiecewiseSolution& sol);

// Uniform samples (x, u1, u2) of the profile at the current time.
std::vector<std::pair<double, State>> sample_profile(const PiecewiseSolution& sol, double lo, double hi, int n);

// Breakpoints of a piecewise constant function on [lo, hi] with values.
struct Cells {
    std::vector<double> x;      // size m+1, x[0]=lo, x[m]=hi
    std::vector<State> values;  // size m
};
Cells cells_on(const PiecewiseSolution& sol, double lo, double hi);

}  // namespace ftlab
