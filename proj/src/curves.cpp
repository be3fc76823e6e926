#include "ftlab/curves.hpp"

#include "ftlab/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ftlab {

namespace {

Vec2 unit_r(const FluxSystem& sys, const State& u, int family, bool check_domain) {
    return eigensystem(sys, u, check_domain).r[family - 1];
}

State rk4_step(const FluxSystem& sys, const State& x, int family, double h, bool check_domain) {
    const Vec2 k1 = unit_r(sys, x, family, check_domain);
    const Vec2 k2 = unit_r(sys, x + 0.5 * h * k1, family, check_domain);
    const Vec2 k3 = unit_r(sys, x + 0.5 * h * k2, family, check_domain);
    const Vec2 k4 = unit_r(sys, x + h * k3, family, check_domain);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vec2 dir(double theta) { return Vec2(std::cos(theta), std::sin(theta)); }
Vec2 dir_theta(double theta) { return Vec2(-std::sin(theta), std::cos(theta)); }

// Residual of the desingularised Rankine-Hugoniot system at parameter s > 0:
// (f(u + s d) - f(u)) / s - sigma d.
Vec2 rh_residual(const FluxSystem& sys, const State& u, const Vec2& fu, double s, double theta, double sigma) {
    const Vec2 d = dir(theta);
    return (sys.flux(u + s * d) - fu) / s - sigma * d;
}

bool newton_rh(const FluxSystem& sys, const State& u, double s, double& theta, double& sigma, int max_iter = 40) {
    const Vec2 fu = sys.flux(u);
    for (int it = 0; it < max_iter; ++it) {
        const Vec2 d = dir(theta);
        const Vec2 dt = dir_theta(theta);
        const State S = u + s * d;
        const Vec2 F = (sys.flux(S) - fu) / s - sigma * d;
        if (!F.allFinite()) return false;
        if (F.norm() < kNewtonTol) return true;
        Mat2 J;
        J.col(0) = sys.jacobian(S) * dt - sigma * dt;
        J.col(1) = -d;
        const Vec2 step = J.partialPivLu().solve(F);
        if (!step.allFinite()) return false;
        theta -= step[0];
        sigma -= step[1];
    }
    return rh_residual(sys, u, fu, s, theta, sigma).norm() < 10 * kNewtonTol;
}

double angle_of(const Vec2& v) { return std::atan2(v[1], v[0]); }

void check_lax(const FluxSystem& sys, const State& base, const State& S, double sigma, int family, ShockSide side) {
    const State& ul = side == ShockSide::Left ? base : S;
    const State& ur = side == ShockSide::Left ? S : base;
    const double ll = wave_speed(sys, ul, family);
    const double lr = wave_speed(sys, ur, family);
    const double tol = 1e-12;
    if (!(lr < sigma + tol && sigma < ll + tol)) {
        std::ostringstream os;
        os.precision(17);
        os << sys.name << ": Lax inequalities fail, lambda(uR)=" << lr << " sigma=" << sigma << " lambda(uL)=" << ll;
        throw LaxViolation(os.str());
    }
}

}  // namespace

State integrate_rarefaction(const FluxSystem& sys, const State& base, int family, double s, double h,
                            bool check_domain) {
    if (s == 0.0) return base;
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(s) / h - 1e-12)));
    const double step = s / n;
    State x = base;
    try {
        for (int k = 0; k < n; ++k) x = rk4_step(sys, x, family, step, check_domain);
    } catch (const OutOfDomain& e) {
        throw LeftDomain(std::string("rarefaction curve left the validated ball: ") + e.what());
    }
    if (check_domain && !sys.in_ball(x)) throw LeftDomain("rarefaction curve left the validated ball");
    return x;
}

WaveCurvePoint rarefaction_curve(const FluxSystem& sys, const State& base, int family, double s) {
    WaveCurvePoint p;
    p.s = s;
    p.state = integrate_rarefaction(sys, base, family, s);
    p.sigma = std::numeric_limits<double>::quiet_NaN();
    p.kind = CurveKind::Rarefaction;
    return p;
}

ShockSolve shock_direct(const FluxSystem& sys, const State& base, int family, double s, ShockSide side,
                        const ShockSolve* warm) {
    ShockSolve out;
    const EigenData e = eigensystem(sys, base, false);
    const Vec2 r = e.r[family - 1];
    const double sgn = side == ShockSide::Left ? -1.0 : 1.0;
    if (warm && warm->ok) {
        out.theta = warm->theta;
        out.sigma = warm->sigma;
    } else {
        out.theta = angle_of(sgn * r);
        const double g = e.l[family - 1].dot(sys.second_derivative(base, r, r));
        out.sigma = e.lambda[family - 1] + 0.5 * sgn * g * s;
    }
    if (s == 0.0) {
        out.theta = angle_of(sgn * r);
        out.sigma = e.lambda[family - 1];
        out.state = base;
        out.ok = true;
        return out;
    }
    out.ok = newton_rh(sys, base, s, out.theta, out.sigma);
    // The branch must stay close to the eigen-direction it leaves from.
    if (out.ok && dir(out.theta).dot(sgn * r) < 0.5) out.ok = false;
    out.state = base + s * dir(out.theta);
    return out;
}

WaveCurvePoint shock_curve(const FluxSystem& sys, const State& base, int family, double s, ShockSide side) {
    if (s < 0.0) throw ContinuationFailure("shock curve parameter must be nonnegative");
    WaveCurvePoint p;
    p.kind = CurveKind::Shock;
    p.s = s;
    ShockSolve cur = shock_direct(sys, base, family, 0.0, side);
    if (s == 0.0) {
        p.state = base;
        p.sigma = cur.sigma;
        return p;
    }
    const int n = std::max(1, static_cast<int>(std::ceil(s / kShockStep - 1e-12)));
    const double h = s / n;
    for (int k = 1; k <= n; ++k) {
        const double sk = h * k;
        ShockSolve next = shock_direct(sys, base, family, sk, side, &cur);
        if (!next.ok) {
            std::ostringstream os;
            os << sys.name << ": shock continuation stalled at s=" << sk;
            throw ContinuationFailure(os.str());
        }
        cur = next;
    }
    if (!sys.in_ball(cur.state)) throw LeftDomain("shock curve left the validated ball");
    check_lax(sys, base, cur.state, cur.sigma, family, side);
    p.state = cur.state;
    p.sigma = cur.sigma;
    return p;
}

State shock_expansion(const FluxSystem& sys, const State& base, int family, double s, ShockSide side) {
    const EigenData e = eigensystem(sys, base, false);
    const Vec2 r = e.r[family - 1];
    // directional derivative of the unit eigenvector field along itself
    const double h = 1e-5;
    const Vec2 rp = unit_r(sys, base + h * r, family, false);
    const Vec2 rm = unit_r(sys, base - h * r, family, false);
    const Vec2 rr = (rp - rm) / (2.0 * h);
    const double sgn = side == ShockSide::Left ? -1.0 : 1.0;
    return base + sgn * s * r + 0.5 * s * s * rr;
}

namespace {

// Finds (a, b) with R^i_P(a) = R^j_Q(b) by Newton, integrating both curves
// incrementally. Returns the meeting point.
struct Meeting {
    double a = 0.0;
    double b = 0.0;
    State point = State::Zero();
};

Meeting meet_curves(const FluxSystem& sys, const State& P, int fi, const State& Q, int fj) {
    Meeting m;
    State X = P, Y = Q;
    for (int it = 0; it < 60; ++it) {
        const Vec2 G = X - Y;
        if (G.norm() < 1e-14) {
            m.point = 0.5 * (X + Y);
            return m;
        }
        Mat2 J;
        J.col(0) = unit_r(sys, X, fi, false);
        J.col(1) = -unit_r(sys, Y, fj, false);
        const Vec2 step = J.partialPivLu().solve(-G);
        if (!step.allFinite()) break;
        X = integrate_rarefaction(sys, X, fi, step[0], kRk4Step, false);
        Y = integrate_rarefaction(sys, Y, fj, step[1], kRk4Step, false);
        m.a += step[0];
        m.b += step[1];
        if (std::abs(step[0]) + std::abs(step[1]) < 1e-15) {
            m.point = 0.5 * (X + Y);
            return m;
        }
    }
    if ((X - Y).norm() < 1e-11) {
        m.point = 0.5 * (X + Y);
        return m;
    }
    throw NoChart(sys.name + ": numeric Riemann chart failed to converge");
}

}  // namespace

Vec2 riemann_invariants(const FluxSystem& sys, const State& u) {
    if (sys.chart) return sys.chart->forward(u);
    if (!sys.in_ball(u)) throw NoChart(sys.name + ": numeric chart only defined inside the validated ball");
    // v1 is the position where the 2-curve through u meets the 1-curve through d,
    // v2 the position where the 1-curve through u meets the 2-curve through d.
    const Meeting m1 = meet_curves(sys, u, 2, sys.center, 1);
    const Meeting m2 = meet_curves(sys, u, 1, sys.center, 2);
    return Vec2(m1.b, m2.b);
}

State riemann_invariants_inverse(const FluxSystem& sys, const Vec2& v) {
    if (sys.chart) return sys.chart->inverse(v);
    const State P = integrate_rarefaction(sys, sys.center, 1, v[0], kRk4Step, false);
    const State Q = integrate_rarefaction(sys, sys.center, 2, v[1], kRk4Step, false);
    return meet_curves(sys, P, 2, Q, 1).point;
}

Mat2 riemann_invariants_jacobian(const FluxSystem& sys, const State& u) {
    const double h = sys.chart ? 1e-6 : 1e-5;
    Mat2 J;
    for (int k = 0; k < 2; ++k) {
        State e = State::Zero();
        e[k] = h;
        J.col(k) = (riemann_invariants(sys, u + e) - riemann_invariants(sys, u - e)) / (2.0 * h);
    }
    return J;
}

StrengtheningReport check_strengthening(const FluxSystem& sys, const State& base, int family,
                                        const std::vector<double>& s_grid) {
    if (!sys.entropy) throw NoEntropy(sys.name + " carries no entropy pair");
    const auto& ent = *sys.entropy;
    const ShockSide side = family == 1 ? ShockSide::Left : ShockSide::Right;
    auto rel = [&](const State& a, const State& b) {
        return ent.eta(a) - ent.eta(b) - ent.grad(b).dot(a - b);
    };
    StrengtheningReport rep;
    rep.family = family;
    for (double s : s_grid) {
        const double h = std::min(1e-4, 0.25 * s);
        const auto p = shock_curve(sys, base, family, s + h, side);
        const auto m = shock_curve(sys, base, family, std::max(0.0, s - h), side);
        const double span = (s + h) - std::max(0.0, s - h);
        StrengtheningPoint pt;
        pt.s = s;
        pt.deta_ds = (rel(base, p.state) - rel(base, m.state)) / span;
        pt.dsigma_ds = (p.sigma - m.sigma) / span;
        const bool sigma_ok = family == 1 ? pt.dsigma_ds < 0.0 : pt.dsigma_ds > 0.0;
        pt.ok = pt.deta_ds > 0.0 && sigma_ok;
        rep.all_ok = rep.all_ok && pt.ok;
        rep.points.push_back(pt);
    }
    return rep;
}

}  // namespace ftlab
