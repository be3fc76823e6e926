#pragma once

#include "ftlab/fronttrack.hpp"

#include <string>
#include <vector>

namespace ftlab {

// a(t,x) = exp((3 C1 / 4) (V + (3 kappa / 2) Q + mu((-inf, x)))) with
// mu = -sum_{1-waves} |sigma| delta + sum_{2-waves} |sigma| delta.
struct WeightProfile {
    double time = 0.0;
    std::vector<double> breakpoints;
    std::vector<double> signed_masses;
    std::vector<double> cumulative;  // size n+1: mass strictly left of each cell
    double V = 0.0;
    double Q = 0.0;
    double C1 = 1.0;
    double kappa = 40.0;

    double log_prefactor() const;
    // log a on cell k (between breakpoints k-1 and k)
    double log_cell(std::size_t k) const;
    double cell(std::size_t k) const;
    double at(double x) const;  // mass at x_i counts for x > x_i
    double left_limit(std::size_t front) const { return cell(front); }
    double right_limit(std::size_t front) const { return cell(front + 1); }
};

WeightProfile weight_profile(const PiecewiseSolution& sol, double C1, double kappa);

struct BracketViolation {
    std::size_t front = 0;
    int family = 1;
    double sigma = 0.0;
    double ratio = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct BracketReport {
    std::size_t checked = 0;
    std::vector<BracketViolation> violations;
};

// 1-fronts: a(+)/a(-) in [1 - 2 C1|s|, 1 - C1|s|/2]; 2-fronts: in [1 + C1|s|/2, 1 + 2 C1|s|].
BracketReport check_front_brackets(const WeightProfile& profile, const PiecewiseSolution& sol);

struct DecayViolation {
    double time = 0.0;
    double x = 0.0;
    double log_increase = 0.0;
};

struct DecayReport {
    std::size_t interactions = 0;
    std::size_t comparisons = 0;
    double max_log_increase = -kInf;
    std::vector<DecayViolation> violations;
};

// Evolves sol to t_end one interaction at a time and checks a(t+,x) <= a(t-,x)(1 + 1e-10)
// everywhere except the interaction point.
DecayReport check_interaction_decay(PiecewiseSolution& sol, double t_end, double C1, double kappa);

// Pointwise comparison of two profiles taken just before and after an interaction at x_star.
void compare_profiles(const WeightProfile& before, const WeightProfile& after, double x_star, double time,
                      DecayReport& report);

struct GlobalBounds {
    double sup_a = 1.0;
    double sup_inv_a = 1.0;
    double cumulative_bound = 1.0;  // exp((3 C1/4)(2V + 3 kappa Q))
};
GlobalBounds global_bounds(const WeightProfile& profile);

std::string weight_csv(const WeightProfile& profile);

}  // namespace ftlab
