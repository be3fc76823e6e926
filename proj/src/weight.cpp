#include "ftlab/weight.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ftlab {

double WeightProfile::log_prefactor() const { return 0.75 * C1 * (V + 1.5 * kappa * Q); }

double WeightProfile::log_cell(std::size_t k) const { return log_prefactor() + 0.75 * C1 * cumulative[k]; }

double WeightProfile::cell(std::size_t k) const { return std::exp(log_cell(k)); }

double WeightProfile::at(double x) const {
    // number of breakpoints strictly left of x
    const auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), x);
    return cell(static_cast<std::size_t>(it - breakpoints.begin()));
}

WeightProfile weight_profile(const PiecewiseSolution& sol, double C1, double kappa) {
    WeightProfile p;
    p.time = sol.time;
    p.C1 = C1;
    p.kappa = kappa;
    const GlimmFunctionals g = glimm_functionals(sol.fronts, kappa);
    p.V = g.V;
    p.Q = g.Q;
    p.cumulative.push_back(0.0);
    for (std::size_t k = 0; k < sol.fronts.size(); ++k) {
        const Front& f = sol.fronts[k];
        const double m = f.family == 1 ? -std::abs(f.sigma) : std::abs(f.sigma);
        p.breakpoints.push_back(sol.position(k));
        p.signed_masses.push_back(m);
        p.cumulative.push_back(p.cumulative.back() + m);
    }
    return p;
}

BracketReport check_front_brackets(const WeightProfile& profile, const PiecewiseSolution& sol) {
    BracketReport rep;
    for (std::size_t k = 0; k < sol.fronts.size(); ++k) {
        const Front& f = sol.fronts[k];
        const double s = std::abs(f.sigma);
        const double ratio = std::exp(profile.log_cell(k + 1) - profile.log_cell(k));
        const double C = profile.C1;
        const double lo = f.family == 1 ? 1.0 - 2.0 * C * s : 1.0 + 0.5 * C * s;
        const double hi = f.family == 1 ? 1.0 - 0.5 * C * s : 1.0 + 2.0 * C * s;
        ++rep.checked;
        const double tol = 1e-15;
        if (!(ratio >= lo - tol && ratio <= hi + tol)) rep.violations.push_back({k, f.family, f.sigma, ratio, lo, hi});
    }
    return rep;
}

void compare_profiles(const WeightProfile& before, const WeightProfile& after, double x_star, double time,
                      DecayReport& report) {
    std::vector<double> cuts;
    cuts.reserve(before.breakpoints.size() + after.breakpoints.size() + 1);
    std::merge(before.breakpoints.begin(), before.breakpoints.end(), after.breakpoints.begin(),
               after.breakpoints.end(), std::back_inserter(cuts));
    cuts.push_back(x_star);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<double> probes;
    probes.push_back(cuts.front() - 1.0);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) probes.push_back(0.5 * (cuts[k] + cuts[k + 1]));
    probes.push_back(cuts.back() + 1.0);
    const double tol = 1e-12 * std::max(1.0, std::abs(x_star));
    for (double x : probes) {
        if (std::abs(x - x_star) <= tol) continue;
        auto count_left = [x](const WeightProfile& p) {
            return static_cast<std::size_t>(std::lower_bound(p.breakpoints.begin(), p.breakpoints.end(), x) -
                                            p.breakpoints.begin());
        };
        const double lb = before.log_cell(count_left(before));
        const double la = after.log_cell(count_left(after));
        const double inc = la - lb;
        ++report.comparisons;
        report.max_log_increase = std::max(report.max_log_increase, inc);
        if (inc > std::log1p(1e-10)) report.violations.push_back({time, x, inc});
    }
}

DecayReport check_interaction_decay(PiecewiseSolution& sol, double t_end, double C1, double kappa) {
    DecayReport rep;
    while (true) {
        const auto ev = next_interaction(sol);
        if (!ev || ev->time > t_end) break;
        sol.time = std::max(sol.time, ev->time);
        const WeightProfile before = weight_profile(sol, C1, kappa);
        resolve_interaction(sol, *ev);
        const WeightProfile after = weight_profile(sol, C1, kappa);
        compare_profiles(before, after, ev->position, ev->time, rep);
        ++rep.interactions;
    }
    sol.time = std::max(sol.time, t_end);
    return rep;
}

GlobalBounds global_bounds(const WeightProfile& profile) {
    GlobalBounds b;
    double hi = -kInf, lo = kInf;
    for (std::size_t k = 0; k < profile.cumulative.size(); ++k) {
        hi = std::max(hi, profile.log_cell(k));
        lo = std::min(lo, profile.log_cell(k));
    }
    b.sup_a = std::exp(hi);
    b.sup_inv_a = std::exp(-lo);
    b.cumulative_bound = std::exp(0.75 * profile.C1 * (2.0 * profile.V + 3.0 * profile.kappa * profile.Q));
    return b;
}

std::string weight_csv(const WeightProfile& profile) {
    std::ostringstream os;
    os.precision(17);
    os << "x_breakpoint,a_left,a_right\n";
    for (std::size_t k = 0; k < profile.breakpoints.size(); ++k)
        os << profile.breakpoints[k] << ',' << profile.cell(k) << ',' << profile.cell(k + 1) << '\n';
    return os.str();
}

}  // namespace ftlab
