#include "ftlab/shifted.hpp"

#include "ftlab/errors.hpp"
#include "ftlab/relent.hpp"
#include "ftlab/riemann.hpp"

#include <algorithm>
#include <cmath>

namespace ftlab {

namespace {

constexpr double kAtFrontTol = 1e-12;

double at_tol(double x) { return kAtFrontTol * std::max(1.0, std::abs(x)); }

}  // namespace

ShiftOptions default_shift_options(const FluxSystem& sys, double C1) {
    ShiftOptions o;
    o.C1 = C1;
    o.c = information_speed(sys);
    o.lambda1_sup = -kInf;
    o.lambda2_inf = kInf;
    for (const State& u : ball_grid(sys.center, sys.radius, 50)) {
        const EigenData e = eigensystem(sys, u);
        o.lambda1_sup = std::max(o.lambda1_sup, e.lambda[0]);
        o.lambda2_inf = std::min(o.lambda2_inf, e.lambda[1]);
    }
    return o;
}

ShockWeights shock_weights(int family, double s0, double C1) {
    const double f = std::exp(0.75 * C1 * s0);
    return family == 1 ? ShockWeights{f, 1.0} : ShockWeights{1.0, f};
}

ShiftChoice shift_speed(const FluxSystem& sys, const State& u_left, const State& u_right, double rh_speed,
                        const State& trace_left, const State& trace_right, double a1, double a2, double lo, double hi) {
    const RelativeQuantities r = relative_quantities(sys, trace_right, u_right);
    const RelativeQuantities l = relative_quantities(sys, trace_left, u_left);
    const double A = a2 * r.q_rel - a1 * l.q_rel;
    const double B = a2 * r.eta_rel - a1 * l.eta_rel;
    ShiftChoice c;
    if (B > 0.0) c.hdot = hi;
    else if (B < 0.0) c.hdot = lo;
    else c.hdot = std::clamp(rh_speed, lo, hi);
    c.dissipation = A - B * c.hdot;
    return c;
}

ShiftedRun::ShiftedRun(PiecewiseSolution shifted, PiecewiseSolution companion, ShiftOptions opts)
    : shifted_(std::move(shifted)), companion_(std::move(companion)), opts_(opts) {
    if (std::abs(shifted_.time - companion_.time) > 1e-15) throw TraceUnavailable("companion is at a different time");
    shifted_.mode = Mode::Shifted;
    choose_speeds();
}

ShiftedRun::ShockData ShiftedRun::shock_data(std::size_t k) const {
    const Front& f = shifted_.fronts[k];
    ShockData d;
    d.u_left = shifted_.states[k].u;
    if (interpolation_phi(f.sigma / std::sqrt(shifted_.nu)) == 1.0) {
        d.u_right = shifted_.states[k + 1].u;
        d.rh_speed = f.classical_speed;
    } else {
        const RiemannShock sh = shock_in_riemann(*shifted_.sys, shifted_.states[k], f.family, f.sigma);
        d.u_right = sh.state.u;
        d.rh_speed = sh.rh_speed;
    }
    d.s0 = (d.u_right - d.u_left).norm();
    return d;
}

void ShiftedRun::choose_speeds() {
    const FluxSystem& sys = *shifted_.sys;
    open_.clear();
    for (std::size_t k = 0; k < shifted_.fronts.size(); ++k) {
        Front& f = shifted_.fronts[k];
        if (f.kind != WaveKind::Shock || std::abs(f.sigma) < opts_.weak) {
            if (f.speed != f.classical_speed) shifted_.set_speed(k, f.classical_speed);
            continue;
        }
        const ShockData sd = shock_data(k);
        const ShockWeights w = shock_weights(f.family, sd.s0, opts_.C1);
        const double lo = f.family == 1 ? -opts_.c : opts_.lambda2_inf;
        const double hi = f.family == 1 ? opts_.lambda1_sup : opts_.c;
        const double h = shifted_.position(k);
        const double tol = at_tol(h);
        std::size_t j = companion_.lower_front(h - tol);
        std::size_t m = j;
        while (m < companion_.fronts.size() && std::abs(companion_.position(m) - h) <= tol) ++m;

        ShiftChoice best;
        bool sliding = false;
        std::size_t slide_front = 0;
        if (m == j) {
            const State& u = companion_.states[j].u;
            best = shift_speed(sys, sd.u_left, sd.u_right, sd.rh_speed, u, u, w.a1, w.a2, lo, hi);
        } else {
            best.dissipation = kInf;
            // gaps between the fronts sitting at h, then sliding along each of them
            for (std::size_t g = j; g <= m; ++g) {
                const double gl = g == j ? -kInf : companion_.fronts[g - 1].speed;
                const double gh = g == m ? kInf : companion_.fronts[g].speed;
                const double a = std::max(lo, gl), b = std::min(hi, gh);
                if (!(b > a)) continue;
                const State& u = companion_.states[g].u;
                ShiftChoice c = shift_speed(sys, sd.u_left, sd.u_right, sd.rh_speed, u, u, w.a1, w.a2, a, b);
                const double nudge = std::min(1e-9 * (1.0 + std::abs(c.hdot)), 0.25 * (b - a));
                if (c.hdot == gl) c.hdot += nudge;
                if (c.hdot == gh) c.hdot -= nudge;
                c.dissipation = shock_dissipation(sys, u, u, sd.u_left, sd.u_right, c.hdot, w.a1, w.a2);
                if (c.dissipation < best.dissipation) {
                    best = c;
                    sliding = false;
                }
            }
            for (std::size_t p = j; p < m; ++p) {
                const double s = companion_.fronts[p].speed;
                if (s < lo || s > hi) continue;
                const double D = shock_dissipation(sys, companion_.states[p].u, companion_.states[p + 1].u,
                                                   sd.u_left, sd.u_right, s, w.a1, w.a2);
                if (D < best.dissipation) {
                    best = {s, D};
                    sliding = true;
                    slide_front = p;
                }
            }
        }
        shifted_.set_speed(k, best.hdot);
        if (sliding) {
            shifted_.fronts[k].x0 = companion_.position(slide_front);
            if (k > 0) shifted_.refresh_hit_time(k - 1);
            shifted_.refresh_hit_time(k);
        }
        DissipationSample s;
        s.time = shifted_.time;
        s.front_id = f.id;
        s.family = f.family;
        s.s0 = sd.s0;
        s.hdot = best.hdot;
        s.rh_speed = sd.rh_speed;
        s.dissipation = best.dissipation;
        s.sliding = sliding;
        open_.push_back(s);
    }
}

double ShiftedRun::next_crossing() const {
    double best = kInf;
    for (std::size_t k = 0; k < shifted_.fronts.size(); ++k) {
        const Front& f = shifted_.fronts[k];
        if (f.speed == f.classical_speed && f.kind != WaveKind::Shock) continue;
        const double h = shifted_.position(k);
        const double tol = at_tol(h);
        const std::size_t j = companion_.lower_front(h - tol);
        if (j > 0) {
            const double xl = companion_.position(j - 1), sl = companion_.fronts[j - 1].speed;
            if (sl > f.speed) best = std::min(best, shifted_.time + (h - xl) / (sl - f.speed));
        }
        std::size_t m = j;
        while (m < companion_.fronts.size() && std::abs(companion_.position(m) - h) <= tol) ++m;
        if (m < companion_.fronts.size()) {
            const double xr = companion_.position(m), sr = companion_.fronts[m].speed;
            if (f.speed > sr) best = std::min(best, shifted_.time + (xr - h) / (f.speed - sr));
        }
    }
    return best;
}

void ShiftedRun::move_to(double t) {
    for (DissipationSample& s : open_) {
        s.duration = t - s.time;
        samples_.push_back(s);
    }
    open_.clear();
    shifted_.time = t;
    companion_.time = t;
}

void ShiftedRun::advance(double t_target) {
    if (t_target < shifted_.time) throw ConfigError("advance target lies in the past");
    int stalled = 0;
    while (true) {
        const auto ev_s = next_interaction(shifted_);
        const auto ev_c = next_interaction(companion_);
        const double t_s = ev_s ? ev_s->time : kInf;
        const double t_c = ev_c ? ev_c->time : kInf;
        const double t_x = next_crossing();
        const double t_next = std::min({t_s, t_c, t_x});
        if (t_next > t_target) break;
        const double before = shifted_.time;
        move_to(std::max(t_next, shifted_.time));
        while (true) {
            const auto e = next_interaction(companion_);
            if (!e || e->time > companion_.time) break;
            resolve_interaction(companion_, *e);
        }
        while (true) {
            const auto e = next_interaction(shifted_);
            if (!e || e->time > shifted_.time) break;
            resolve_interaction(shifted_, *e);
        }
        ++events_;
        stalled = shifted_.time > before ? 0 : stalled + 1;
        if (stalled > 10000) throw InteractionOverflow("shift selection made no progress in time");
        choose_speeds();
    }
    move_to(t_target);
    choose_speeds();
}

ShiftedRun set_shifted_mode(PiecewiseSolution sol, PiecewiseSolution companion, const ShiftOptions& opts) {
    return ShiftedRun(std::move(sol), std::move(companion), opts);
}

}  // namespace ftlab
