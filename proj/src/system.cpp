#include "ftlab/system.hpp"

#include "ftlab/errors.hpp"

#include <cmath>
#include <sstream>

namespace ftlab {

Vec2 FluxSystem::second_derivative(const State& u, const Vec2& a, const Vec2& b) const {
    const auto H = hessians(u);
    return Vec2(a.dot(H[0] * b), a.dot(H[1] * b));
}

bool FluxSystem::in_ball(const State& u, double scale) const {
    return (u - center).norm() <= radius * scale * (1.0 + 1e-12);
}

namespace {

std::string fmt_state(const State& u) {
    std::ostringstream os;
    os.precision(17);
    os << "(" << u[0] << ", " << u[1] << ")";
    return os.str();
}

// Unit vector spanning the kernel of (J - lambda I).
Vec2 kernel_vector(const Mat2& J, double lambda) {
    const double a = J(0, 0) - lambda, b = J(0, 1);
    const double c = J(1, 0), d = J(1, 1) - lambda;
    Vec2 v1(b, -a), v2(d, -c);
    Vec2 v = v1.squaredNorm() >= v2.squaredNorm() ? v1 : v2;
    if (v.squaredNorm() == 0.0) {
        // J = lambda I cannot happen with a nonzero gap; keep a valid basis anyway.
        v = Vec2(1.0, 0.0);
    }
    return v.normalized();
}

}  // namespace

EigenData eigensystem(const FluxSystem& sys, const State& u, bool check_domain) {
    if (!u.allFinite()) throw OutOfDomain("non-finite state");
    if (check_domain && !sys.in_ball(u)) {
        throw OutOfDomain(sys.name + ": state " + fmt_state(u) + " outside validated ball");
    }
    const Mat2 J = sys.jacobian(u);
    const double tr = J.trace();
    const double det = J.determinant();
    const double disc = 0.25 * tr * tr - det;
    if (!(disc > 0.0) || 2.0 * std::sqrt(disc) < kHyperbolicGap) {
        throw NonHyperbolic(sys.name + ": eigenvalue gap below tolerance at " + fmt_state(u));
    }
    const double root = std::sqrt(disc);
    EigenData e;
    e.lambda = {0.5 * tr - root, 0.5 * tr + root};
    Mat2 R;
    for (int k = 0; k < 2; ++k) {
        e.r[k] = kernel_vector(J, e.lambda[k]);
        R.col(k) = e.r[k];
    }
    Mat2 L = R.inverse();
    for (int k = 0; k < 2; ++k) {
        Vec2 l = L.row(k).transpose();
        const Vec2 f2 = sys.second_derivative(u, e.r[k], e.r[k]);
        const double g = l.dot(f2);  // (grad lambda_k . r_k) with l.r = 1
        bool flip;
        if (std::abs(g) > 1e-12) {
            flip = g < 0.0;
        } else {
            const Vec2& r = e.r[k];
            flip = (std::abs(r[0]) > 1e-14) ? (r[0] < 0.0) : (r[1] < 0.0);
        }
        if (flip) {
            e.r[k] = -e.r[k];
            l = -l;
        }
        e.l[k] = l;
    }
    return e;
}

double wave_speed(const FluxSystem& sys, const State& u, int family) {
    const Mat2 J = sys.jacobian(u);
    const double tr = J.trace();
    const double disc = 0.25 * tr * tr - J.determinant();
    if (!(disc > 0.0)) throw NonHyperbolic(sys.name + ": complex eigenvalues at " + fmt_state(u));
    const double root = std::sqrt(disc);
    return family == 1 ? 0.5 * tr - root : 0.5 * tr + root;
}

std::vector<State> ball_grid(const State& center, double radius, int n) {
    std::vector<State> out;
    out.reserve(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double x = -radius + 2.0 * radius * (i + 0.5) / n;
            const double y = -radius + 2.0 * radius * (j + 0.5) / n;
            if (x * x + y * y <= radius * radius) out.emplace_back(center + State(x, y));
        }
    }
    return out;
}

std::vector<GnlEntry> check_genuine_nonlinearity(const FluxSystem& sys, const std::vector<State>& grid) {
    std::vector<GnlEntry> out;
    out.reserve(grid.size() * 2);
    for (const auto& u : grid) {
        const EigenData e = eigensystem(sys, u);
        for (int k = 0; k < 2; ++k) {
            GnlEntry g;
            g.state = u;
            g.family = k + 1;
            g.value = e.l[k].dot(sys.second_derivative(u, e.r[k], e.r[k]));
            g.flagged = !(g.value > 0.0) || std::abs(g.value) < 1e-12;
            out.push_back(g);
        }
    }
    return out;
}

SjReport check_smoller_johnson(const FluxSystem& sys, const std::vector<State>& grid) {
    SjReport rep;
    bool first = true;
    for (const auto& u : grid) {
        const EigenData e = eigensystem(sys, u);
        for (int i = 0; i < 2; ++i) {
            const int j = 1 - i;
            SjEntry s;
            s.state = u;
            s.i = i + 1;
            s.j = j + 1;
            s.value = e.l[i].dot(sys.second_derivative(u, e.r[j], e.r[j]));
            if (s.value < -1e-12) rep.passes = false;
            if (first) {
                rep.min_value = rep.max_value = s.value;
                first = false;
            } else {
                rep.min_value = std::min(rep.min_value, s.value);
                rep.max_value = std::max(rep.max_value, s.value);
            }
            rep.entries.push_back(s);
        }
    }
    return rep;
}

EntropyCheck check_entropy_pair(const FluxSystem& sys, const std::vector<State>& grid, double tol) {
    if (!sys.entropy) throw NoEntropy(sys.name + " carries no entropy pair");
    const auto& ent = *sys.entropy;
    EntropyCheck out;
    out.tolerance = tol;
    const double h = 1e-3;
    for (const auto& u : grid) {
        Vec2 gq;
        for (int k = 0; k < 2; ++k) {
            State e = State::Zero();
            e[k] = h;
            gq[k] = (8.0 * (ent.q(u + e) - ent.q(u - e)) - (ent.q(u + 2 * e) - ent.q(u - 2 * e))) / (12.0 * h);
        }
        const Vec2 rhs = (ent.grad(u).transpose() * sys.jacobian(u)).transpose();
        out.max_residual = std::max(out.max_residual, (gq - rhs).norm());
    }
    out.passes = out.max_residual < tol;
    return out;
}

Mat2 fd_jacobian(const std::function<Vec2(const State&)>& f, const State& u, double h) {
    Mat2 J;
    for (int k = 0; k < 2; ++k) {
        State e = State::Zero();
        e[k] = h;
        J.col(k) = (8.0 * (f(u + e) - f(u - e)) - (f(u + 2 * e) - f(u - 2 * e))) / (12.0 * h);
    }
    return J;
}

FluxSystem appendix_a_system() {
    FluxSystem s;
    s.name = "appendix-a-quadratic";
    s.description = "quadratic flux f(u,v) = ((u-1)^2 + 3uv - v^2, (v+1)^2 + 3uv - u^2); genuinely nonlinear, "
                    "fails the Smoller-Johnson sign condition at the origin";
    s.flux = [](const State& x) {
        const double u = x[0], v = x[1];
        return Vec2((u - 1) * (u - 1) + 3 * u * v - v * v, (v + 1) * (v + 1) + 3 * u * v - u * u);
    };
    s.jacobian = [](const State& x) {
        const double u = x[0], v = x[1];
        Mat2 J;
        J << 2 * u - 2 + 3 * v, 3 * u - 2 * v, 3 * v - 2 * u, 2 * v + 2 + 3 * u;
        return J;
    };
    s.hessians = [](const State&) {
        Mat2 H1, H2;
        H1 << 2, 3, 3, -2;
        H2 << -2, 3, 3, 2;
        return std::array<Mat2, 2>{H1, H2};
    };
    s.center = State(0.0, 0.0);
    s.radius = 0.15;
    s.s_max = 0.1;
    return s;
}

FluxSystem p_system(double gamma) {
    if (!(gamma > 1.0)) throw ConfigError("p-system requires gamma > 1");
    FluxSystem s;
    std::ostringstream nm;
    nm << "p-system-gamma" << gamma;
    s.name = nm.str();
    s.description = "p-system v_t - w_x = 0, w_t + p(v)_x = 0 with p(v) = v^-gamma";
    const double g = gamma;
    auto p = [g](double v) { return std::pow(v, -g); };
    auto dp = [g](double v) { return -g * std::pow(v, -g - 1.0); };
    auto d2p = [g](double v) { return g * (g + 1.0) * std::pow(v, -g - 2.0); };
    s.flux = [p](const State& x) { return Vec2(-x[1], p(x[0])); };
    s.jacobian = [dp](const State& x) {
        Mat2 J;
        J << 0.0, -1.0, dp(x[0]), 0.0;
        return J;
    };
    s.hessians = [d2p](const State& x) {
        Mat2 H1 = Mat2::Zero(), H2 = Mat2::Zero();
        H2(0, 0) = d2p(x[0]);
        return std::array<Mat2, 2>{H1, H2};
    };
    s.center = State(1.0, 0.0);
    s.radius = 0.3;
    s.s_max = 0.2;
    EntropyPair ent;
    ent.eta = [g](const State& x) { return 0.5 * x[1] * x[1] + std::pow(x[0], 1.0 - g) / (g - 1.0); };
    ent.grad = [p](const State& x) { return Vec2(-p(x[0]), x[1]); };
    ent.hess = [dp](const State& x) {
        Mat2 H = Mat2::Zero();
        H(0, 0) = -dp(x[0]);
        H(1, 1) = 1.0;
        return H;
    };
    ent.q = [p](const State& x) { return p(x[0]) * x[1]; };
    s.entropy = ent;
    const double k = 2.0 * std::sqrt(g) / (g - 1.0);
    const double e = 0.5 * (1.0 - g);
    auto phi = [k, e](double v) { return k * (1.0 - std::pow(v, e)); };
    InvariantChart ch;
    ch.forward = [phi](const State& x) {
        if (!(x[0] > 0.0)) throw NoChart("p-system chart requires v > 0");
        const double ph = phi(x[0]);
        return Vec2(x[1] + ph, x[1] - ph);
    };
    ch.inverse = [k, e](const Vec2& v) {
        const double w = 0.5 * (v[0] + v[1]);
        const double ph = 0.5 * (v[0] - v[1]);
        const double base = 1.0 - ph / k;
        if (!(base > 0.0)) throw NoChart("p-system chart inverse leaves v > 0");
        return State(std::pow(base, 1.0 / e), w);
    };
    s.chart = ch;
    return s;
}

FluxSystem linear_advection_system() {
    FluxSystem s;
    s.name = "linear-advection2";
    s.description = "decoupled linear advection f(u) = diag(-1, 1) u";
    s.flux = [](const State& x) { return Vec2(-x[0], x[1]); };
    s.jacobian = [](const State&) {
        Mat2 J;
        J << -1.0, 0.0, 0.0, 1.0;
        return J;
    };
    s.hessians = [](const State&) { return std::array<Mat2, 2>{Mat2::Zero(), Mat2::Zero()}; };
    s.center = State(0.0, 0.0);
    s.radius = 1.0;
    s.s_max = 0.0;
    EntropyPair ent;
    ent.eta = [](const State& x) { return 0.5 * x.squaredNorm(); };
    ent.grad = [](const State& x) { return x; };
    ent.hess = [](const State&) { return Mat2::Identity().eval(); };
    ent.q = [](const State& x) { return 0.5 * (-x[0] * x[0] + x[1] * x[1]); };
    s.entropy = ent;
    InvariantChart ch;
    ch.forward = [](const State& x) { return Vec2(x); };
    ch.inverse = [](const Vec2& v) { return State(v); };
    s.chart = ch;
    return s;
}

FluxSystem decoupled_burgers_system() {
    FluxSystem s;
    s.name = "decoupled-burgers";
    s.description = "two uncoupled Burgers equations f(u,v) = (u^2/2, 2v + v^2/2)";
    s.flux = [](const State& x) { return Vec2(0.5 * x[0] * x[0], 2.0 * x[1] + 0.5 * x[1] * x[1]); };
    s.jacobian = [](const State& x) {
        Mat2 J;
        J << x[0], 0.0, 0.0, 2.0 + x[1];
        return J;
    };
    s.hessians = [](const State&) {
        Mat2 H1 = Mat2::Zero(), H2 = Mat2::Zero();
        H1(0, 0) = 1.0;
        H2(1, 1) = 1.0;
        return std::array<Mat2, 2>{H1, H2};
    };
    s.center = State(0.0, 0.0);
    s.radius = 0.5;
    s.s_max = 0.3;
    EntropyPair ent;
    ent.eta = [](const State& x) { return 0.5 * x.squaredNorm(); };
    ent.grad = [](const State& x) { return x; };
    ent.hess = [](const State&) { return Mat2::Identity().eval(); };
    ent.q = [](const State& x) {
        return x[0] * x[0] * x[0] / 3.0 + x[1] * x[1] + x[1] * x[1] * x[1] / 3.0;
    };
    s.entropy = ent;
    InvariantChart ch;
    ch.forward = [](const State& x) { return Vec2(x); };
    ch.inverse = [](const Vec2& v) { return State(v); };
    s.chart = ch;
    return s;
}

std::vector<FluxSystem> builtin_systems() {
    return {appendix_a_system(), p_system(2.0), linear_advection_system(), decoupled_burgers_system()};
}

const FluxSystem& system_by_name(const std::string& name) {
    static const std::vector<FluxSystem> all = builtin_systems();
    for (const auto& s : all) {
        if (s.name == name) return s;
    }
    throw ConfigError("unknown system: " + name);
}

}  // namespace ftlab
