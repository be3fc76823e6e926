#include "ftlab/riemann.hpp"

#include "ftlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ftlab {

StatePoint make_state(const FluxSystem& sys, const State& u) { return StatePoint{u, riemann_invariants(sys, u)}; }

StatePoint state_from_riemann(const FluxSystem& sys, const Vec2& v) {
    return StatePoint{riemann_invariants_inverse(sys, v), v};
}

double interpolation_phi(double s) {
    if (s <= -2.0) return 1.0;
    if (s >= -1.0) return 0.0;
    const double t = -1.0 - s;  // 0 at s=-1, 1 at s=-2
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double interpolation_phi_derivative(double s) {
    if (s <= -2.0 || s >= -1.0) return 0.0;
    const double t = -1.0 - s;
    return -30.0 * t * t * (1.0 - t) * (1.0 - t);
}

long grid_index(double x, double nu) {
    const double r = x / nu;
    const double j = std::nearbyint(r);
    if (std::abs(r - j) <= 1e-9) return static_cast<long>(j);
    return static_cast<long>(std::floor(r));
}

namespace {

State grid_state(const FluxSystem& sys, int family, double coord, double other) {
    const Vec2 v = family == 1 ? Vec2(coord, other) : Vec2(other, coord);
    return riemann_invariants_inverse(sys, v);
}

double hat_speed(const FluxSystem& sys, int family, long j, double other, double nu) {
    return wave_speed(sys, grid_state(sys, family, (static_cast<double>(j) + 0.5) * nu, other), family);
}

ShockSolve shock_at(const FluxSystem& sys, const State& base, int family, double s, const ShockSolve* warm) {
    ShockSolve sol = shock_direct(sys, base, family, s, ShockSide::Left, warm);
    if (sol.ok) return sol;
    const WaveCurvePoint p = shock_curve(sys, base, family, s, ShockSide::Left);
    sol.state = p.state;
    sol.sigma = p.sigma;
    const Vec2 d = (p.state - base) / s;
    sol.theta = std::atan2(d[1], d[0]);
    sol.ok = true;
    return sol;
}

}  // namespace

RiemannShock shock_in_riemann(const FluxSystem& sys, const StatePoint& base, int family, double sigma) {
    const int i = family - 1;
    RiemannShock out;
    if (sigma == 0.0) {
        out.state = base;
        out.rh_speed = wave_speed(sys, base.u, family);
        return out;
    }
    const EigenData e = eigensystem(sys, base.u, false);
    const Mat2 Jv = riemann_invariants_jacobian(sys, base.u);
    const double slope = -Jv.row(i).dot(e.r[i]);  // d v_i / ds along the shock branch
    if (!(slope < 0.0)) throw NewtonDivergence(sys.name + ": Riemann coordinate not monotone along shock curve");
    auto g = [&](const ShockSolve& sol) { return riemann_invariants(sys, sol.state)[i] - base.v[i] - sigma; };
    double s0 = sigma / slope;
    ShockSolve sol0 = shock_at(sys, base.u, family, s0, nullptr);
    double g0 = g(sol0);
    double s1 = s0 - g0 / slope;
    ShockSolve sol1 = shock_at(sys, base.u, family, s1, &sol0);
    double g1 = g(sol1);
    for (int it = 0; it < 60 && std::abs(g1) > 1e-15 * (1.0 + std::abs(base.v[i])); ++it) {
        const double denom = g1 - g0;
        double s2 = denom != 0.0 ? s1 - g1 * (s1 - s0) / denom : s1 - g1 / slope;
        if (!(s2 > 0.0)) s2 = 0.5 * s1;
        s0 = s1;
        g0 = g1;
        sol0 = sol1;
        s1 = s2;
        sol1 = shock_at(sys, base.u, family, s1, &sol0);
        g1 = g(sol1);
        if (std::abs(s1 - s0) < 1e-16) break;
    }
    if (std::abs(g1) > 1e-12) {
        std::ostringstream os;
        os << sys.name << ": shock parametrisation by Riemann coordinate failed, residual " << g1;
        throw NewtonDivergence(os.str());
    }
    Vec2 v = riemann_invariants(sys, sol1.state);
    v[i] = base.v[i] + sigma;
    out.state = StatePoint{sol1.state, v};
    out.rh_speed = sol1.sigma;
    return out;
}

Vec2 interpolated_curve(const FluxSystem& sys, const Vec2& v, int family, double sigma, double nu) {
    const int i = family - 1;
    Vec2 plus = v;
    plus[i] += sigma;
    const double ph = interpolation_phi(sigma / std::sqrt(nu));
    if (ph == 0.0) return plus;
    const RiemannShock sh = shock_in_riemann(sys, state_from_riemann(sys, v), family, sigma);
    if (ph == 1.0) return sh.state.v;
    return ph * sh.state.v + (1.0 - ph) * plus;
}

double grid_average_speed(const FluxSystem& sys, int family, double a, double b, double other, double nu) {
    const double lo = std::min(a, b), hi = std::max(a, b);
    const long j0 = grid_index(lo, nu);
    if (hi - lo <= 0.0) return hat_speed(sys, family, j0, other, nu);
    double acc = 0.0;
    for (long j = j0;; ++j) {
        const double cl = std::max(lo, static_cast<double>(j) * nu);
        const double cr = std::min(hi, static_cast<double>(j + 1) * nu);
        if (cl >= hi) break;
        if (cr > cl) acc += (cr - cl) * hat_speed(sys, family, j, other, nu);
    }
    return acc / (hi - lo);
}

namespace {

void append_family_waves(const FluxSystem& sys, double nu, int family, const StatePoint& A, const StatePoint& B,
                         double sigma, std::vector<ElementaryWave>& out) {
    if (sigma == 0.0) return;
    const int i = family - 1;
    const int o = 1 - i;
    const double other = A.v[o];
    if (sigma < 0.0) {
        ElementaryWave w;
        w.family = family;
        w.kind = WaveKind::Shock;
        w.left = A;
        w.right = B;
        w.strength = sigma;
        const double ph = interpolation_phi(sigma / std::sqrt(nu));
        double speed = 0.0;
        if (ph > 0.0) speed += ph * shock_in_riemann(sys, A, family, sigma).rh_speed;
        if (ph < 1.0) speed += (1.0 - ph) * grid_average_speed(sys, family, A.v[i] + sigma, A.v[i], other, nu);
        w.speed = speed;
        out.push_back(w);
        return;
    }
    const double a = A.v[i], b = B.v[i];
    const double tol = 1e-9 * nu;
    std::vector<double> cuts;
    const long h = grid_index(a, nu), k = grid_index(b, nu);
    for (long j = h + 1; j <= k; ++j) {
        const double c = static_cast<double>(j) * nu;
        if (c - a > tol && b - c > tol) cuts.push_back(c);
    }
    StatePoint left = A;
    double left_coord = a;
    for (size_t p = 0; p <= cuts.size(); ++p) {
        StatePoint right;
        if (p < cuts.size()) {
            Vec2 v = A.v;
            v[i] = cuts[p];
            right = state_from_riemann(sys, v);
        } else {
            right = B;
        }
        ElementaryWave w;
        w.family = family;
        w.kind = WaveKind::RarefactionPiece;
        w.left = left;
        w.right = right;
        w.strength = right.v[i] - left_coord;
        w.speed = hat_speed(sys, family, grid_index(left_coord, nu), other, nu);
        out.push_back(w);
        left = right;
        left_coord = right.v[i];
    }
}

}  // namespace

RiemannFan solve_riemann(const FluxSystem& sys, double nu, const StatePoint& L, const StatePoint& R) {
    RiemannFan fan;
    fan.left = L;
    fan.right = R;
    fan.middle = L;
    const Vec2 dv = R.v - L.v;
    if (dv[0] == 0.0 && dv[1] == 0.0) {
        fan.middle = R;
        return fan;
    }
    const double sq = std::sqrt(nu);
    double s1 = dv[0], s2 = dv[1];
    double g1 = 0.0, g2 = 0.0;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
        g1 = 0.0;
        const double ph1 = interpolation_phi(s1 / sq);
        if (ph1 > 0.0) g1 = ph1 * (shock_in_riemann(sys, L, 1, s1).state.v[1] - L.v[1]);
        const double s2n = dv[1] - g1;
        g2 = 0.0;
        const double ph2 = interpolation_phi(s2n / sq);
        if (ph2 > 0.0) {
            const Vec2 vm(L.v[0] + s1, L.v[1] + g1);
            g2 = ph2 * (shock_in_riemann(sys, state_from_riemann(sys, vm), 2, s2n).state.v[0] - vm[0]);
        }
        const double s1n = dv[0] - g2;
        const double change = std::abs(s1n - s1) + std::abs(s2n - s2);
        s1 = s1n;
        s2 = s2n;
        if (change <= 1e-16 * (1.0 + std::abs(s1) + std::abs(s2))) {
            converged = true;
            break;
        }
    }
    // Recompute g1 for the final s1 so that the middle state is consistent.
    g1 = 0.0;
    if (interpolation_phi(s1 / sq) > 0.0) {
        g1 = interpolation_phi(s1 / sq) * (shock_in_riemann(sys, L, 1, s1).state.v[1] - L.v[1]);
    }
    Vec2 vm(g2 == 0.0 ? R.v[0] : L.v[0] + s1, g1 == 0.0 ? L.v[1] : L.v[1] + g1);
    // chart round-off leaves strengths of order 1e-16; drop them
    const double snap = 1e-14;
    const bool no1 = std::abs(vm[0] - L.v[0]) <= snap, no2 = std::abs(R.v[1] - vm[1]) <= snap;
    if (no1 && no2) {
        fan.middle = R;
        return fan;
    }
    if (no1) vm = L.v;
    if (no2) vm = R.v;
    s1 = vm[0] - L.v[0];
    s2 = R.v[1] - vm[1];
    const Vec2 back = interpolated_curve(sys, vm, 2, s2, nu);
    const double resid = (back - R.v).norm();
    if (!converged && resid > 1e-12) {
        std::ostringstream os;
        os << sys.name << ": Riemann solver did not converge, residual " << resid;
        throw NewtonDivergence(os.str());
    }
    if (resid > 1e-12) {
        std::ostringstream os;
        os << sys.name << ": Riemann composition residual " << resid;
        throw NewtonDivergence(os.str());
    }
    StatePoint M;
    if (vm == L.v) {
        M = L;
    } else if (vm == R.v) {
        M = R;
    } else {
        M = state_from_riemann(sys, vm);
    }
    fan.middle = M;
    fan.sigma1 = s1;
    fan.sigma2 = s2;
    append_family_waves(sys, nu, 1, L, M, s1, fan.waves);
    append_family_waves(sys, nu, 2, M, R, s2, fan.waves);
    for (size_t k = 1; k < fan.waves.size(); ++k) {
        if (!(fan.waves[k].speed > fan.waves[k - 1].speed)) {
            std::ostringstream os;
            os.precision(17);
            os << sys.name << ": fan speeds not increasing (" << fan.waves[k - 1].speed << " then "
               << fan.waves[k].speed << ")";
            throw FanOrderingViolation(os.str());
        }
    }
    return fan;
}

RiemannFan solve_riemann(const FluxSystem& sys, double nu, const State& ul, const State& ur) {
    return solve_riemann(sys, nu, make_state(sys, ul), make_state(sys, ur));
}

ApproxErrors approx_speed_error(const FluxSystem& sys, const Vec2& v_l, double sigma, double nu, int family) {
    ApproxErrors out;
    if (!(sigma < 0.0)) return out;
    const int i = family - 1;
    const StatePoint base = state_from_riemann(sys, v_l);
    const RiemannShock sh = shock_in_riemann(sys, base, family, sigma);
    const Vec2 Phi = interpolated_curve(sys, v_l, family, sigma, nu);
    out.curve_error = (Phi - sh.state.v).norm();
    const double ph = interpolation_phi(sigma / std::sqrt(nu));
    const double lr = grid_average_speed(sys, family, v_l[i] + sigma, v_l[i], v_l[1 - i], nu);
    const double lphi = ph * sh.rh_speed + (1.0 - ph) * lr;
    out.speed_error = std::abs(lphi - sh.rh_speed);
    return out;
}

}  // namespace ftlab
