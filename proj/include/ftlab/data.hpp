#pragma once

#include "ftlab/fronttrack.hpp"
#include "ftlab/system.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace ftlab {

// Values at the uniform grid x_k = x0 + k hx, k = 0..n-1. Each sample stands for
// the cell [x_k - hx/2, x_k + hx/2). Scalar data live in component 0.
struct SampledFunction {
    double x0 = 0.0;
    double hx = 1.0;
    std::vector<State> values;
    bool periodic = false;

    std::size_t size() const { return values.size(); }
    double x(std::size_t k) const { return x0 + hx * static_cast<double>(k); }
    double lo() const { return x0 - 0.5 * hx; }
    double hi() const { return x0 + hx * (static_cast<double>(values.size()) - 0.5); }
    double sup_norm() const;
    double sup_deviation(const State& ref) const;
};

SampledFunction make_sampled(double lo, double hi, std::size_t n, bool periodic = false);

// Normalisation of exp(-1/(1-x^2)) on (-1,1).
inline constexpr double kMollifierMass = 0.44399381616807943;

double mollifier_density(double x);  // unit mass, support [-1,1]

// gamma_delta(k hx) hx for |k| <= floor(delta/hx), renormalised to sum one.
std::vector<double> mollifier_kernel(double delta, double hx);

// u * gamma_delta. Non-periodic data are extended by their edge values.
SampledFunction mollify(const SampledFunction& u, double delta);

double tv_exact(const SampledFunction& u, double L);
double tv_total(const SampledFunction& u);

struct SeminormResult {
    double value = 0.0;
    double truncation = 0.0;  // offsets below this were excluded
};
// Gagliardo seminorm (int int |u(x)-u(y)|^p / |x-y|^{1+sp})^{1/p} by double sum.
SeminormResult sobolev_seminorm(const SampledFunction& u, double s, double p);

// Uniform-norm and integral norms of sampled data (cell quadrature).
double lp_norm(const SampledFunction& u, double p);
double lp_distance(const SampledFunction& a, const SampledFunction& b, double p);

struct CommutatorPoint {
    double delta = 0.0;
    double derivative_l3 = 0.0;
    double commutator_l32 = 0.0;
    double product = 0.0;
};
CommutatorPoint commutator_quantity(const FluxSystem& sys, const SampledFunction& u, double delta);

struct CommutatorReport {
    std::vector<CommutatorPoint> points;
    double slope = 0.0;
    double r2 = 0.0;
    double threshold = 0.0;
    bool conclusive = false;
    bool passes = false;
    bool skipped = false;  // commutator at round-off floor
};
CommutatorReport besov_commutator_decay(const FluxSystem& sys, const SampledFunction& u, double alpha,
                                        const std::vector<double>& deltas);

// Generators. All are deterministic in the seed.
SampledFunction fbm_path(double hurst, std::uint64_t seed, double lo, double hi, std::size_t n);
SampledFunction weierstrass(double alpha, std::uint64_t seed, std::size_t n);  // periodic on [0,1)
struct StepSpec {
    std::size_t n_jumps = 5;
    double min_gap = 0.0;
};
SampledFunction random_step(std::uint64_t seed, const StepSpec& spec, double lo, double hi, std::size_t n);

// Affine map sending the data into the ball B_eps(center) (sup deviation = eps).
SampledFunction rescale_into_ball(const SampledFunction& u, const State& center, double eps);

// Dyadic oscillation fit: slope of log max|u(x+h)-u(x)| against log h.
double holder_exponent(const SampledFunction& u, int min_level = 2, int max_level = 8);

// Piecewise-constant initial data for front tracking from the cells inside [lo, hi];
// outside it the edge values continue.
struct StepData {
    State leftmost = State::Zero();
    std::vector<std::pair<double, State>> jumps;
};
StepData to_step_data(const SampledFunction& u, double lo, double hi);

// Subsample by averaging blocks of `factor` cells.
SampledFunction coarsen(const SampledFunction& u, std::size_t factor);

// Exact L1 distance on [lo, hi] between a front-tracking profile and sampled cells.
double l1_distance_sampled(const PiecewiseSolution& sol, const SampledFunction& u, double lo, double hi);

std::string sampled_csv(const SampledFunction& u);

}  // namespace ftlab
