#include "ftlab/fronttrack.hpp"

#include "ftlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ftlab {

namespace {

constexpr double kMergeTol = 1e-12;

Front make_front(PiecewiseSolution& sol, const ElementaryWave& w, double x, double t) {
    Front f;
    f.id = sol.next_id++;
    f.family = w.family;
    f.kind = w.kind;
    f.sigma = w.strength;
    f.x0 = x;
    f.t0 = t;
    f.speed = w.speed;
    f.classical_speed = w.speed;
    return f;
}

std::vector<WaveTag> tags_of(const std::vector<Front>& fr, std::size_t a, std::size_t b) {
    std::vector<WaveTag> out;
    for (std::size_t k = a; k <= b && k < fr.size(); ++k) out.push_back({fr[k].family, fr[k].sigma, fr[k].kind});
    return out;
}

bool approaching_pair(const WaveTag& left, const WaveTag& right) {
    if (left.family > right.family) return true;
    if (left.family == right.family) return std::min(left.sigma, right.sigma) < 0.0;
    return false;
}

}  // namespace

std::vector<double> PiecewiseSolution::positions() const {
    std::vector<double> out(fronts.size());
    for (std::size_t k = 0; k < fronts.size(); ++k) out[k] = position(k);
    return out;
}

std::size_t PiecewiseSolution::lower_front(double x) const {
    std::size_t lo = 0, hi = fronts.size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (position(mid) < x) lo = mid + 1;
        else hi = mid;
    }
    return lo;
}

const StatePoint& PiecewiseSolution::left_limit(double x) const { return states[lower_front(x)]; }

const StatePoint& PiecewiseSolution::right_limit(double x) const {
    std::size_t k = lower_front(x);
    while (k < fronts.size() && position(k) <= x) ++k;
    return states[k];
}

void PiecewiseSolution::set_speed(std::size_t k, double speed) {
    Front& f = fronts[k];
    f.x0 = f.position(time);
    f.t0 = time;
    f.speed = speed;
    if (k > 0) refresh_hit_time(k - 1);
    refresh_hit_time(k);
}

void PiecewiseSolution::refresh_hit_time(std::size_t k) {
    if (k + 1 >= fronts.size()) {
        if (k < fronts.size()) fronts[k].hit_time = kInf;
        return;
    }
    const double ds = fronts[k].speed - fronts[k + 1].speed;
    if (!(ds > 0.0)) {
        fronts[k].hit_time = kInf;
        return;
    }
    const double gap = position(k + 1) - position(k);
    fronts[k].hit_time = time + std::max(gap, 0.0) / ds;
}

void PiecewiseSolution::refresh_all_hit_times() {
    for (std::size_t k = 0; k < fronts.size(); ++k) refresh_hit_time(k);
}

PiecewiseSolution init_solution(const FluxSystem& sys, double nu, const State& leftmost,
                                const std::vector<std::pair<double, State>>& jumps, const TrackOptions& opts) {
    PiecewiseSolution sol;
    sol.sys = &sys;
    sol.nu = nu;
    sol.opts = opts;
    sol.states.push_back(make_state(sys, leftmost));
    double last_x = -kInf;
    for (const auto& [x, u] : jumps) {
        if (!(x > last_x)) throw ConfigError("jump positions must be strictly increasing");
        last_x = x;
        const StatePoint R = make_state(sys, u);
        const StatePoint& L = sol.states.back();
        if (R.v == L.v) continue;
        const RiemannFan fan = solve_riemann(sys, nu, L, R);
        for (std::size_t k = 0; k < fan.waves.size(); ++k) {
            sol.fronts.push_back(make_front(sol, fan.waves[k], x, 0.0));
            sol.states.push_back(k + 1 < fan.waves.size() ? fan.waves[k].right : R);
        }
    }
    sol.refresh_all_hit_times();
    const GlimmFunctionals g = glimm_functionals(sol);
    if (!(g.U < opts.epsilon)) {
        std::ostringstream os;
        os << "initial Glimm functional U=" << g.U << " not below epsilon=" << opts.epsilon;
        throw DomainViolation(os.str());
    }
    return sol;
}

std::optional<NextInteraction> next_interaction(const PiecewiseSolution& sol) {
    double best = kInf;
    std::size_t k = 0;
    for (std::size_t i = 0; i < sol.fronts.size(); ++i) {
        if (sol.fronts[i].hit_time < best) {
            best = sol.fronts[i].hit_time;
            k = i;
        }
    }
    if (best == kInf) return std::nullopt;
    NextInteraction ev;
    ev.time = best;
    const double xa = sol.fronts[k].position(best);
    const double xb = sol.fronts[k + 1].position(best);
    ev.position = 0.5 * (xa + xb);
    std::size_t a = k, b = k + 1;
    const double tol = kMergeTol * std::max(1.0, std::abs(ev.position));
    while (a > 0 && std::abs(sol.fronts[a - 1].position(best) - ev.position) <= tol) --a;
    while (b + 1 < sol.fronts.size() && std::abs(sol.fronts[b + 1].position(best) - ev.position) <= tol) ++b;
    ev.first = a;
    ev.last = b;
    return ev;
}

void resolve_interaction(PiecewiseSolution& sol, const NextInteraction& ev) {
    if (sol.interactions >= sol.opts.max_interactions) {
        std::ostringstream os;
        os << "interaction cap " << sol.opts.max_interactions << " exceeded";
        throw InteractionOverflow(os.str());
    }
    const std::size_t a = ev.first, b = ev.last;
    sol.time = std::max(sol.time, ev.time);
    InteractionRecord rec;
    if (sol.opts.record_log) {
        rec.time = ev.time;
        rec.position = ev.position;
        rec.incoming = tags_of(sol.fronts, a, b);
        rec.approaching = rec.incoming.size() == 2 && approaching_pair(rec.incoming[0], rec.incoming[1]);
    }
    GlimmFunctionals before;
    if (sol.opts.record_log) before = glimm_functionals(sol);

    const StatePoint L = sol.states[a];
    const StatePoint R = sol.states[b + 1];
    const RiemannFan fan = solve_riemann(*sol.sys, sol.nu, L, R);

    std::vector<Front> fresh;
    std::vector<StatePoint> interior;
    for (std::size_t k = 0; k < fan.waves.size(); ++k) {
        fresh.push_back(make_front(sol, fan.waves[k], ev.position, ev.time));
        if (k + 1 < fan.waves.size()) interior.push_back(fan.waves[k].right);
    }
    sol.fronts.erase(sol.fronts.begin() + static_cast<long>(a), sol.fronts.begin() + static_cast<long>(b) + 1);
    sol.fronts.insert(sol.fronts.begin() + static_cast<long>(a), fresh.begin(), fresh.end());
    // states a+1 .. b are interior to the incoming group
    sol.states.erase(sol.states.begin() + static_cast<long>(a) + 1, sol.states.begin() + static_cast<long>(b) + 1);
    if (fresh.empty()) {
        sol.states.erase(sol.states.begin() + static_cast<long>(a) + 1);
    } else {
        sol.states.insert(sol.states.begin() + static_cast<long>(a) + 1, interior.begin(), interior.end());
    }
    ++sol.interactions;
    const std::size_t lo = a > 0 ? a - 1 : 0;
    const std::size_t hi = std::min(sol.fronts.size(), a + fresh.size() + 1);
    for (std::size_t k = lo; k < hi; ++k) sol.refresh_hit_time(k);

    if (sol.opts.record_log) {
        rec.outgoing = tags_of(sol.fronts, a, a + fresh.size() - 1);
        if (fresh.empty()) rec.outgoing.clear();
        const GlimmFunctionals after = glimm_functionals(sol);
        rec.delta_U = after.U - before.U;
        rec.delta_Q = after.Q - before.Q;
        rec.delta_V = after.V - before.V;
        rec.U_before = before.U;
        rec.U_after = after.U;
        sol.log.push_back(std::move(rec));
    }
}

void advance(PiecewiseSolution& sol, double t_target) {
    if (t_target < sol.time) throw ConfigError("advance target lies in the past");
    while (true) {
        const auto ev = next_interaction(sol);
        if (!ev || ev->time > t_target) break;
        resolve_interaction(sol, *ev);
    }
    sol.time = t_target;
}

GlimmFunctionals glimm_functionals(const std::vector<Front>& fronts, double kappa) {
    GlimmFunctionals g;
    g.kappa = kappa;
    double s2 = 0.0;               // |sigma| of 2-waves seen so far
    double all[2] = {0.0, 0.0};    // |sigma| per family seen so far
    double shock[2] = {0.0, 0.0};  // |sigma| of shocks per family seen so far
    for (const Front& f : fronts) {
        const double m = std::abs(f.sigma);
        const int i = f.family - 1;
        g.V += m;
        double partner = f.sigma < 0.0 ? all[i] : shock[i];
        if (f.family == 1) partner += s2;
        g.Q += m * partner;
        all[i] += m;
        if (f.sigma < 0.0) shock[i] += m;
        if (f.family == 2) s2 += m;
    }
    g.U = g.V + kappa * g.Q;
    return g;
}

GlimmFunctionals glimm_functionals(const PiecewiseSolution& sol) { return glimm_functionals(sol.fronts, sol.opts.kappa); }

double bv_norm(const PiecewiseSolution& sol, double a, double b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < sol.fronts.size(); ++k) {
        const double x = sol.position(k);
        if (x >= a && x <= b) acc += (sol.states[k + 1].u - sol.states[k].u).norm();
    }
    return acc;
}

double tv_window(const PiecewiseSolution& sol, double L) {
    const std::size_t n = sol.fronts.size();
    std::vector<double> x = sol.positions();
    std::vector<double> jump(n);
    for (std::size_t k = 0; k < n; ++k) jump[k] = (sol.states[k + 1].u - sol.states[k].u).norm();
    double best = 0.0, acc = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (j < n && x[j] - x[i] <= L) acc += jump[j++];
        best = std::max(best, acc);
        acc -= jump[i];
    }
    return best;
}

Cells cells_on(const PiecewiseSolution& sol, double lo, double hi) {
    Cells c;
    c.x.push_back(lo);
    std::size_t k = sol.lower_front(lo);
    // state at lo+: skip fronts sitting exactly at lo
    while (k < sol.fronts.size() && sol.position(k) <= lo) ++k;
    State cur = sol.states[k].u;
    for (; k < sol.fronts.size(); ++k) {
        const double x = sol.position(k);
        if (x >= hi) break;
        c.x.push_back(x);
        c.values.push_back(cur);
        cur = sol.states[k + 1].u;
    }
    c.x.push_back(hi);
    c.values.push_back(cur);
    return c;
}

namespace {

template <class F>
double merge_integrate(const PiecewiseSolution& A, const PiecewiseSolution& B, double lo, double hi, F&& g) {
    if (!(hi > lo)) return 0.0;
    const Cells ca = cells_on(A, lo, hi), cb = cells_on(B, lo, hi);
    std::size_t i = 0, j = 0;
    double x = lo, acc = 0.0;
    while (i < ca.values.size() && j < cb.values.size()) {
        const double xe = std::min(ca.x[i + 1], cb.x[j + 1]);
        if (xe > x) acc += g(ca.values[i] - cb.values[j]) * (xe - x);
        x = xe;
        if (ca.x[i + 1] <= xe) ++i;
        if (cb.x[j + 1] <= xe) ++j;
    }
    return acc;
}

}  // namespace

double l1_distance(const PiecewiseSolution& a, const PiecewiseSolution& b, double lo, double hi) {
    return merge_integrate(a, b, lo, hi, [](const Vec2& d) { return d.norm(); });
}

double l2_distance(const PiecewiseSolution& a, const PiecewiseSolution& b, double lo, double hi) {
    return std::sqrt(merge_integrate(a, b, lo, hi, [](const Vec2& d) { return d.squaredNorm(); }));
}

double linf_deviation(const PiecewiseSolution& sol, const State& ref, double lo, double hi) {
    const Cells c = cells_on(sol, lo, hi);
    double m = 0.0;
    for (const auto& v : c.values) m = std::max(m, (v - ref).norm());
    return m;
}

double max_abs_speed(const PiecewiseSolution& sol) {
    double m = 0.0;
    for (const auto& f : sol.fronts) m = std::max(m, std::abs(f.speed));
    return m;
}

std::vector<std::pair<double, State>> sample_profile(const PiecewiseSolution& sol, double lo, double hi, int n) {
    std::vector<std::pair<double, State>> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double x = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
        out.emplace_back(x, sol.right_limit(x).u);
    }
    return out;
}

}  // namespace ftlab
