#include "ftlab/relent.hpp"

#include "ftlab/curves.hpp"
#include "ftlab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace ftlab {

namespace {

const EntropyPair& entropy_of(const FluxSystem& sys) {
    if (!sys.entropy) throw NoEntropy(sys.name + " carries no entropy pair");
    return *sys.entropy;
}

constexpr std::array<double, 5> kGLx = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                        0.9061798459386640};
constexpr std::array<double, 5> kGLw = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                        0.4786286704993665, 0.2369268850561891};

}  // namespace

RelativeQuantities relative_quantities(const FluxSystem& sys, const State& a, const State& b) {
    const EntropyPair& e = entropy_of(sys);
    RelativeQuantities r;
    const Vec2 gb = e.grad(b);
    const Vec2 fa = sys.flux(a), fb = sys.flux(b);
    r.eta_rel = e.eta(a) - e.eta(b) - gb.dot(a - b);
    r.q_rel = e.q(a) - e.q(b) - gb.dot(fa - fb);
    r.f_rel = fa - fb - sys.jacobian(b) * (a - b);
    return r;
}

double relative_entropy(const FluxSystem& sys, const State& a, const State& b) {
    const EntropyPair& e = entropy_of(sys);
    return e.eta(a) - e.eta(b) - e.grad(b).dot(a - b);
}

double relative_entropy_flux(const FluxSystem& sys, const State& a, const State& b) {
    const EntropyPair& e = entropy_of(sys);
    return e.q(a) - e.q(b) - e.grad(b).dot(sys.flux(a) - sys.flux(b));
}

double entropy_production(const FluxSystem& sys, const State& ul, const State& ur, double speed) {
    const EntropyPair& e = entropy_of(sys);
    return (e.q(ur) - e.q(ul)) - speed * (e.eta(ur) - e.eta(ul));
}

double relative_entropy_production(const FluxSystem& sys, const State& ul, const State& ur, double speed,
                                   const State& ref) {
    return (relative_entropy_flux(sys, ur, ref) - relative_entropy_flux(sys, ul, ref)) -
           speed * (relative_entropy(sys, ur, ref) - relative_entropy(sys, ul, ref));
}

EquivalenceConstants measure_equivalence(const FluxSystem& sys, int n, double radius_scale) {
    const auto grid = ball_grid(sys.center, sys.radius * radius_scale, n);
    EquivalenceConstants c;
    c.eta_lower = kInf;
    for (const State& u : grid) {
        const EigenData e = eigensystem(sys, u);
        c.max_speed = std::max({c.max_speed, std::abs(e.lambda[0]), std::abs(e.lambda[1])});
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = 0; j < grid.size(); ++j) {
            if (i == j) continue;
            const RelativeQuantities r = relative_quantities(sys, grid[i], grid[j]);
            const double d2 = (grid[i] - grid[j]).squaredNorm();
            c.eta_lower = std::min(c.eta_lower, r.eta_rel / d2);
            c.eta_upper = std::max(c.eta_upper, r.eta_rel / d2);
            c.q_over_eta = std::max(c.q_over_eta, std::abs(r.q_rel) / r.eta_rel);
        }
    }
    for (std::size_t i = 0; i < grid.size(); i += 4) {
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double qj = relative_entropy_flux(sys, grid[i], grid[j]);
            for (std::size_t k = j + 1; k < grid.size(); ++k) {
                const double qk = relative_entropy_flux(sys, grid[i], grid[k]);
                c.q_lipschitz = std::max(c.q_lipschitz, std::abs(qj - qk) / (grid[j] - grid[k]).norm());
            }
        }
    }
    return c;
}

double information_speed(const FluxSystem& sys, int n, double radius_scale) {
    const EquivalenceConstants c = measure_equivalence(sys, n, radius_scale);
    return std::max(c.max_speed, c.q_over_eta);
}

double shock_pseudodistance(const PiecewiseSolution& u, const State& u_left, const State& u_right, double h,
                            double a1, double a2, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    const FluxSystem& sys = *u.sys;
    const Cells c = cells_on(u, lo, hi);
    double acc = 0.0;
    for (std::size_t k = 0; k < c.values.size(); ++k) {
        const double x0 = c.x[k], x1 = c.x[k + 1];
        const double left_len = std::max(0.0, std::min(x1, h) - x0);
        const double right_len = std::max(0.0, x1 - std::max(x0, h));
        if (left_len > 0.0) acc += a1 * relative_entropy(sys, c.values[k], u_left) * left_len;
        if (right_len > 0.0) acc += a2 * relative_entropy(sys, c.values[k], u_right) * right_len;
    }
    return acc;
}

double shock_dissipation(const FluxSystem& sys, const State& trace_left, const State& trace_right,
                         const State& u_left, const State& u_right, double hdot, double a1, double a2) {
    const RelativeQuantities r = relative_quantities(sys, trace_right, u_right);
    const RelativeQuantities l = relative_quantities(sys, trace_left, u_left);
    return a2 * (r.q_rel - hdot * r.eta_rel) - a1 * (l.q_rel - hdot * l.eta_rel);
}

void check_shock_weights(int family, double s0, double a1, double a2, double C1) {
    const double ratio = family == 1 ? a1 / a2 : a2 / a1;
    const double lo = 1.0 + 0.5 * C1 * s0, hi = 1.0 + 2.0 * C1 * s0;
    const double tol = 1e-14;
    if (!(ratio >= lo - tol && ratio <= hi + tol)) {
        std::ostringstream os;
        os.precision(17);
        os << "weight ratio " << ratio << " outside [" << lo << ", " << hi << "] for family " << family;
        throw WeightBracketViolation(os.str());
    }
}

double shock_dissipation_checked(const FluxSystem& sys, int family, double s0, double C1, const State& trace_left,
                                 const State& trace_right, const State& u_left, const State& u_right, double hdot,
                                 double a1, double a2) {
    check_shock_weights(family, s0, a1, a2, C1);
    return shock_dissipation(sys, trace_left, trace_right, u_left, u_right, hdot, a1, a2);
}

RarefactionProfile::RarefactionProfile(const FluxSystem& sys, const State& u_left, int family, double s0, double C,
                                       double C2)
    : sys_(&sys), u_left_(u_left), u_right_(u_left), family_(family), s0_(s0), C_(C) {
    if (!(s0 >= 0.0)) throw ConfigError("rarefaction strength must be nonnegative");
    if (!(C >= 0.25 * C2 && C <= 4.0 * C2)) {
        std::ostringstream os;
        os << "weight constant C=" << C << " outside [C2/4, 4 C2] with C2=" << C2;
        throw CRangeViolation(os.str());
    }
    const int n = s0 > 0.0 ? static_cast<int>(std::ceil(s0 / 1e-4 - 1e-12)) : 0;
    h_ = n > 0 ? s0 / n : 0.0;
    R_.push_back(u_left);
    for (int k = 0; k < n; ++k) R_.push_back(integrate_rarefaction(sys, R_.back(), family, h_, h_, false));
    for (const State& r : R_) {
        const EigenData e = eigensystem(sys, r);
        dR_.push_back(e.r[family - 1]);
        lambda_.push_back(e.lambda[family - 1]);
    }
    u_right_ = R_.back();
    v_left_ = lambda_.front();
    v_right_ = lambda_.back();
}

State RarefactionProfile::state_at_y(double y) const {
    if (R_.size() == 1) return R_[0];
    y = std::clamp(y, 0.0, s0_);
    const std::size_t n = R_.size() - 1;
    std::size_t k = std::min(n - 1, static_cast<std::size_t>(y / h_));
    const double tau = (y - static_cast<double>(k) * h_) / h_;
    const double t2 = tau * tau, t3 = t2 * tau;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + tau, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * R_[k] + h10 * h_ * dR_[k] + h01 * R_[k + 1] + h11 * h_ * dR_[k + 1];
}

double RarefactionProfile::lambda_at_y(double y) const { return wave_speed(*sys_, state_at_y(y), family_); }

double RarefactionProfile::dlambda_dy(double y) const {
    const double e = 1e-6;
    const double a = std::max(0.0, y - e), b = std::min(s0_, y + e);
    if (!(b > a)) return 0.0;
    return (lambda_at_y(b) - lambda_at_y(a)) / (b - a);
}

double RarefactionProfile::y_at(double xi) const {
    if (xi <= v_left_) return 0.0;
    if (xi >= v_right_) return s0_;
    const auto it = std::upper_bound(lambda_.begin(), lambda_.end(), xi);
    const std::size_t k1 = static_cast<std::size_t>(it - lambda_.begin());
    const std::size_t k0 = k1 - 1;
    double a = static_cast<double>(k0) * h_, b = std::min(s0_, static_cast<double>(k1) * h_);
    double fa = lambda_[k0] - xi, fb = lambda_[k1] - xi;
    if (fa == 0.0) return a;
    int side = 0;
    for (int it2 = 0; it2 < 100 && b - a > 1e-16; ++it2) {
        const double c = (a * fb - b * fa) / (fb - fa);
        const double fc = lambda_at_y(c) - xi;
        if (fc == 0.0) return c;
        if ((fc > 0.0) == (fb > 0.0)) {
            b = c;
            fb = fc;
            if (side == -1) fa *= 0.5;
            side = -1;
        } else {
            a = c;
            fa = fc;
            if (side == 1) fb *= 0.5;
            side = 1;
        }
        if (std::abs(fc) < 1e-15) return c;
    }
    return 0.5 * (a + b);
}

State RarefactionProfile::ubar(double t, double x) const {
    if (t <= 0.0) return x < 0.0 ? u_left_ : u_right_;
    return state_at_y(y_at(x / t));
}

double RarefactionProfile::weight_at_y(double y) const {
    const double sign = family_ == 1 ? -1.0 : 1.0;
    return std::exp(sign * C_ * y);
}

double RarefactionProfile::sigma_bar() const {
    double m = 0.0;
    for (const State& r : R_) m = std::max(m, (r - u_left_).norm());
    return std::abs(v_left_ - v_right_) + m;
}

double rarefaction_weight(const RarefactionProfile& p, double t, double x) {
    if (t <= 0.0) return p.weight_at_y(x < 0.0 ? 0.0 : p.s0());
    return p.weight_at_y(p.y_at(x / t));
}

double rarefaction_pseudodistance(const PiecewiseSolution& u, const RarefactionProfile& p, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    const FluxSystem& sys = p.system();
    const double t = u.time;
    const double xa = t * p.v_left(), xb = t * p.v_right();
    const double a_right = p.weight_at_y(p.s0());
    const Cells c = cells_on(u, lo, hi);
    double acc = 0.0;
    for (std::size_t k = 0; k < c.values.size(); ++k) {
        const double x0 = c.x[k], x1 = c.x[k + 1];
        const State& w = c.values[k];
        const double left_len = std::max(0.0, std::min(x1, xa) - x0);
        const double right_len = std::max(0.0, x1 - std::max(x0, xb));
        if (left_len > 0.0) acc += relative_entropy(sys, w, p.u_left()) * left_len;
        if (right_len > 0.0) acc += a_right * relative_entropy(sys, w, p.u_right()) * right_len;
        const double fl = std::max(x0, xa), fr = std::min(x1, xb);
        if (!(t > 0.0) || !(fr > fl)) continue;
        const double y0 = p.y_at(fl / t), y1 = p.y_at(fr / t);
        std::vector<double> cuts{y0};
        const int panels = 64;
        for (int j = 1; j < panels; ++j) {
            const double yj = p.s0() * j / panels;
            if (yj > y0 && yj < y1) cuts.push_back(yj);
        }
        cuts.push_back(y1);
        for (std::size_t m = 0; m + 1 < cuts.size(); ++m) {
            const double mid = 0.5 * (cuts[m] + cuts[m + 1]), half = 0.5 * (cuts[m + 1] - cuts[m]);
            if (!(half > 0.0)) continue;
            double panel = 0.0;
            for (int g = 0; g < 5; ++g) {
                const double y = mid + half * kGLx[g];
                panel += kGLw[g] * p.weight_at_y(y) * relative_entropy(sys, w, p.state_at_y(y)) * t * p.dlambda_dy(y);
            }
            acc += half * panel;
        }
    }
    return acc;
}

PositivityScan positivity_scan(const FluxSystem& sys, int family, const std::vector<State>& ubar_grid,
                               const std::vector<Vec2>& offsets, double C) {
    const EntropyPair& ent = entropy_of(sys);
    const double sign = family == 1 ? 1.0 : -1.0;
    PositivityScan out;
    out.min_quotient = kInf;
    for (const State& ub : ubar_grid) {
        const EigenData e = eigensystem(sys, ub);
        const Vec2 r = e.r[family - 1];
        const Vec2 Hr = ent.hess(ub) * r;
        const double lam = e.lambda[family - 1];
        for (const Vec2& off : offsets) {
            const double d2 = off.squaredNorm();
            if (d2 == 0.0) continue;
            const RelativeQuantities rq = relative_quantities(sys, ub + off, ub);
            const double val = sign * C * (rq.q_rel - lam * rq.eta_rel) + Hr.dot(rq.f_rel);
            const double quotient = val / d2;
            if (quotient < out.min_quotient) {
                out.min_quotient = quotient;
                out.worst_ubar = ub;
                out.worst_offset = off;
            }
        }
    }
    out.passes = out.min_quotient > 0.0;
    out.K3_estimate = out.passes ? 2.0 * out.min_quotient : 0.0;
    return out;
}

std::vector<Vec2> ring_offsets(const std::vector<double>& radii, int directions) {
    std::vector<Vec2> out;
    for (double r : radii) {
        for (int k = 0; k < directions; ++k) {
            const double th = 2.0 * M_PI * (k + 0.5) / directions;
            out.emplace_back(r * std::cos(th), r * std::sin(th));
        }
    }
    return out;
}

double choose_c2(const FluxSystem& sys, int family, const std::vector<State>& ubar_grid,
                 const std::vector<Vec2>& offsets) {
    for (int k = 0; k < 24; ++k) {
        const double C2 = 0.125 * std::pow(2.0, k);
        bool ok = true;
        for (double C : {0.25 * C2, C2, 4.0 * C2}) {
            if (!positivity_scan(sys, family, ubar_grid, offsets, C).passes) {
                ok = false;
                break;
            }
        }
        if (ok) return C2;
    }
    throw CRangeViolation(sys.name + ": no weight constant makes the rarefaction quotient positive");
}

FanEstimate fan_estimate_terms(PiecewiseSolution u, const RarefactionProfile& p, double v, double t, double C2,
                               int steps) {
    const FluxSystem& sys = p.system();
    FanEstimate out;
    out.a2 = 1.0;
    out.a1 = p.family() == 1 ? 1.0 + C2 * p.s0() : 1.0 - C2 * p.s0();
    out.sigma_bar = p.sigma_bar();
    out.sigma_bar_sq_t = out.sigma_bar * out.sigma_bar * t;
    const double t0 = u.time;
    const double dt = (t - t0) / steps;
    for (int m = 0; m < steps; ++m) {
        const double tau = t0 + (m + 0.5) * dt;
        advance(u, tau);
        const double x = v * tau;
        const State& um = u.left_limit(x).u;
        const State& up = u.right_limit(x).u;
        const RelativeQuantities r = relative_quantities(sys, up, p.u_right());
        const RelativeQuantities l = relative_quantities(sys, um, p.u_left());
        out.lhs += dt * (out.a2 * (r.q_rel - v * r.eta_rel) - out.a1 * (l.q_rel - v * l.eta_rel));
        const double xl = p.v_left() * tau, xr = p.v_right() * tau;
        for (std::size_t k = 0; k < u.fronts.size(); ++k) {
            const double xk = u.position(k);
            if (xk < xl || xk > xr) continue;
            out.dissipation_mass +=
                dt * std::abs(entropy_production(sys, u.states[k].u, u.states[k + 1].u, u.fronts[k].speed));
        }
    }
    return out;
}

}  // namespace ftlab
