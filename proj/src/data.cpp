#include "ftlab/data.hpp"

#include "ftlab/errors.hpp"
#include "ftlab/fit.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>

namespace ftlab {

namespace {

// FFTW planning is not thread safe.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

class RealFFT {
public:
    explicit RealFFT(std::size_t n) : n_(n) {
        in_ = fftw_alloc_real(n);
        out_ = fftw_alloc_complex(n / 2 + 1);
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), out_, in_, FFTW_ESTIMATE);
    }
    ~RealFFT() {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(in_);
        fftw_free(out_);
    }
    RealFFT(const RealFFT&) = delete;
    RealFFT& operator=(const RealFFT&) = delete;

    std::vector<std::complex<double>> forward(const std::vector<double>& x) {
        std::copy(x.begin(), x.end(), in_);
        std::fill(in_ + x.size(), in_ + n_, 0.0);
        fftw_execute(fwd_);
        std::vector<std::complex<double>> out(n_ / 2 + 1);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = {out_[k][0], out_[k][1]};
        return out;
    }
    std::vector<double> backward(const std::vector<std::complex<double>>& X) {
        for (std::size_t k = 0; k < X.size(); ++k) {
            out_[k][0] = X[k].real();
            out_[k][1] = X[k].imag();
        }
        fftw_execute(bwd_);
        std::vector<double> y(in_, in_ + n_);
        for (double& v : y) v /= static_cast<double>(n_);
        return y;
    }

private:
    std::size_t n_;
    double* in_;
    fftw_complex* out_;
    fftw_plan fwd_, bwd_;
};

std::size_t fft_size(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

double SampledFunction::sup_norm() const {
    double m = 0.0;
    for (const State& v : values) m = std::max(m, v.norm());
    return m;
}

double SampledFunction::sup_deviation(const State& ref) const {
    double m = 0.0;
    for (const State& v : values) m = std::max(m, (v - ref).norm());
    return m;
}

SampledFunction make_sampled(double lo, double hi, std::size_t n, bool periodic) {
    SampledFunction f;
    f.hx = (hi - lo) / static_cast<double>(n);
    f.x0 = lo + 0.5 * f.hx;
    f.values.assign(n, State::Zero());
    f.periodic = periodic;
    return f;
}

double mollifier_density(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - x * x)) / kMollifierMass;
}

std::vector<double> mollifier_kernel(double delta, double hx) {
    if (!(delta > 0.0)) throw ConfigError("mollification width must be positive");
    if (hx > delta / 8.0 * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "grid spacing " << hx << " exceeds delta/8 = " << delta / 8.0;
        throw ResolutionTooCoarse(os.str());
    }
    const std::size_t m = static_cast<std::size_t>(std::floor(delta / hx));
    std::vector<double> w(2 * m + 1);
    double sum = 0.0;
    for (std::size_t k = 0; k <= 2 * m; ++k) {
        const double x = (static_cast<double>(k) - static_cast<double>(m)) * hx;
        w[k] = mollifier_density(x / delta) / delta * hx;
        sum += w[k];
    }
    for (std::size_t k = 0; k <= m; ++k) {
        // exact symmetry
        const double a = w[k] / sum;
        w[k] = a;
        w[2 * m - k] = a;
    }
    return w;
}

SampledFunction mollify(const SampledFunction& u, double delta) {
    const std::vector<double> w = mollifier_kernel(delta, u.hx);
    const std::size_t m = (w.size() - 1) / 2;
    const std::size_t n = u.size();
    SampledFunction out = u;
    if (n == 0) return out;
    if (u.periodic) {
        if (2 * m + 1 > n) throw ResolutionTooCoarse("mollifier wider than the periodic domain");
        RealFFT fft(n);
        std::vector<double> kern(n, 0.0);
        for (std::size_t k = 0; k < w.size(); ++k) kern[(k + n - m) % n] += w[k];
        const auto K = fft.forward(kern);
        for (int c = 0; c < 2; ++c) {
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i) x[i] = u.values[i][c];
            auto X = fft.forward(x);
            for (std::size_t k = 0; k < X.size(); ++k) X[k] *= K[k];
            const auto y = fft.backward(X);
            for (std::size_t i = 0; i < n; ++i) out.values[i][c] = y[i];
        }
        return out;
    }
    const std::size_t N = n + 2 * m;
    const std::size_t P = fft_size(N + 2 * m);
    RealFFT fft(P);
    std::vector<double> kern(P, 0.0);
    for (std::size_t k = 0; k < w.size(); ++k) kern[k] = w[k];
    const auto K = fft.forward(kern);
    for (int c = 0; c < 2; ++c) {
        std::vector<double> x(N);
        for (std::size_t i = 0; i < N; ++i) {
            const std::size_t j = i < m ? 0 : std::min(n - 1, i - m);
            x[i] = u.values[j][c];
        }
        auto X = fft.forward(x);
        for (std::size_t k = 0; k < X.size(); ++k) X[k] *= K[k];
        const auto y = fft.backward(X);
        // y[i + 2m] = sum_k w[k] x[i + 2m - k], centred on padded index i + m
        for (std::size_t i = 0; i < n; ++i) out.values[i][c] = y[i + 2 * m];
    }
    return out;
}

double tv_total(const SampledFunction& u) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) acc += (u.values[i + 1] - u.values[i]).norm();
    return acc;
}

double tv_exact(const SampledFunction& u, double L) {
    const std::size_t n = u.size();
    if (n < 2) return 0.0;
    const std::size_t ndiff = u.periodic ? n : n - 1;
    std::vector<double> d(ndiff);
    for (std::size_t i = 0; i < ndiff; ++i) d[i] = (u.values[(i + 1) % n] - u.values[i]).norm();
    std::size_t k = static_cast<std::size_t>(std::floor(L / u.hx + 1e-9));
    if (k == 0) return 0.0;
    if (k >= ndiff) return std::accumulate(d.begin(), d.end(), 0.0);
    double acc = std::accumulate(d.begin(), d.begin() + static_cast<long>(k), 0.0);
    double best = acc;
    const std::size_t windows = u.periodic ? ndiff : ndiff - k + 1;
    for (std::size_t i = 1; i < windows; ++i) {
        acc += d[(i + k - 1) % ndiff] - d[i - 1];
        best = std::max(best, acc);
    }
    return best;
}

SeminormResult sobolev_seminorm(const SampledFunction& u, double s, double p) {
    if (!(s > 0.0 && s < 1.0) || !(p >= 1.0)) throw ConfigError("seminorm needs 0 < s < 1 and p >= 1");
    const std::size_t n = u.size();
    const double expo = 1.0 + s * p;
    std::vector<double> kernel(n);
    for (std::size_t k = 2; k < n; ++k) kernel[k] = std::pow(static_cast<double>(k) * u.hx, -expo);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const State& ui = u.values[i];
        for (std::size_t j = i + 2; j < n; ++j) {
            const double d = (u.values[j] - ui).norm();
            if (d == 0.0) continue;
            acc += std::pow(d, p) * kernel[j - i];
        }
    }
    SeminormResult r;
    r.value = std::pow(2.0 * acc * u.hx * u.hx, 1.0 / p);
    r.truncation = 2.0 * u.hx;
    return r;
}

double lp_norm(const SampledFunction& u, double p) {
    double acc = 0.0;
    for (const State& v : u.values) acc += std::pow(v.norm(), p);
    return std::pow(acc * u.hx, 1.0 / p);
}

double lp_distance(const SampledFunction& a, const SampledFunction& b, double p) {
    if (a.size() != b.size()) throw ConfigError("sampled functions on different grids");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::pow((a.values[i] - b.values[i]).norm(), p);
    return std::pow(acc * a.hx, 1.0 / p);
}

CommutatorPoint commutator_quantity(const FluxSystem& sys, const SampledFunction& u, double delta) {
    const SampledFunction ud = mollify(u, delta);
    SampledFunction fu = u;
    for (std::size_t i = 0; i < u.size(); ++i) fu.values[i] = sys.flux(u.values[i]);
    const SampledFunction fud = mollify(fu, delta);
    const std::size_t n = u.size();
    double d3 = 0.0, c32 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t ip, im;
        if (u.periodic) {
            ip = (i + 1) % n;
            im = (i + n - 1) % n;
        } else {
            ip = std::min(n - 1, i + 1);
            im = i == 0 ? 0 : i - 1;
        }
        const double span = static_cast<double>(ip - im == 0 ? 1 : (u.periodic ? 2 : ip - im)) * u.hx;
        const Vec2 du = (ud.values[ip] - ud.values[im]) / span;
        d3 += std::pow(du.norm(), 3.0);
        c32 += std::pow((sys.flux(ud.values[i]) - fud.values[i]).norm(), 1.5);
    }
    CommutatorPoint pt;
    pt.delta = delta;
    pt.derivative_l3 = std::cbrt(d3 * u.hx);
    pt.commutator_l32 = std::pow(c32 * u.hx, 2.0 / 3.0);
    pt.product = pt.derivative_l3 * pt.commutator_l32;
    return pt;
}

CommutatorReport besov_commutator_decay(const FluxSystem& sys, const SampledFunction& u, double alpha,
                                        const std::vector<double>& deltas) {
    CommutatorReport rep;
    rep.threshold = 3.0 * alpha - 1.0 - 0.15;
    std::vector<double> xs, ys;
    double largest = 0.0;
    for (double d : deltas) {
        rep.points.push_back(commutator_quantity(sys, u, d));
        xs.push_back(d);
        ys.push_back(rep.points.back().product);
        largest = std::max(largest, rep.points.back().product);
    }
    if (largest < 1e-13) {
        rep.skipped = true;
        return rep;
    }
    const SlopeFit f = fit_loglog(xs, ys);
    rep.slope = f.slope;
    rep.r2 = f.r2;
    rep.conclusive = f.conclusive;
    rep.passes = f.conclusive && f.slope >= rep.threshold;
    return rep;
}

SampledFunction fbm_path(double hurst, std::uint64_t seed, double lo, double hi, std::size_t n) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw ConfigError("Hurst index must lie in (0,1)");
    if (n < 2) throw ConfigError("fbm path needs at least two points");
    SampledFunction f = make_sampled(lo, hi, n);
    const std::size_t m = n - 1;  // increments
    const std::size_t M = 2 * m;
    auto cov = [hurst](double k) {
        const double e = 2.0 * hurst;
        return 0.5 * (std::pow(std::abs(k + 1.0), e) - 2.0 * std::pow(std::abs(k), e) + std::pow(std::abs(k - 1.0), e));
    };
    std::vector<double> c(M);
    for (std::size_t k = 0; k <= m; ++k) c[k] = cov(static_cast<double>(k));
    for (std::size_t k = m + 1; k < M; ++k) c[k] = c[M - k];
    std::vector<double> lam(M);
    std::vector<fftw_complex> buf(M);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(M), buf.data(), buf.data(), FFTW_FORWARD, FFTW_ESTIMATE);
    }
    for (std::size_t k = 0; k < M; ++k) {
        buf[k][0] = c[k];
        buf[k][1] = 0.0;
    }
    fftw_execute(plan);
    for (std::size_t k = 0; k < M; ++k) lam[k] = std::max(0.0, buf[k][0]);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = std::pow(f.hx, hurst);
    for (int comp = 0; comp < 2; ++comp) {
        for (std::size_t k = 0; k < M; ++k) {
            const double a = std::sqrt(lam[k] / static_cast<double>(M));
            buf[k][0] = a * normal(rng);
            buf[k][1] = a * normal(rng);
        }
        fftw_execute(plan);
        double acc = 0.0;
        f.values[0][comp] = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            acc += buf[k][0] * scale;
            f.values[k + 1][comp] = acc;
        }
    }
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(plan);
    }
    return f;
}

SampledFunction weierstrass(double alpha, std::uint64_t seed, std::size_t n) {
    SampledFunction f = make_sampled(0.0, 1.0, n, true);
    f.x0 = 0.0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    int K = 0;
    while ((std::size_t{1} << (K + 4)) <= n) ++K;
    for (int comp = 0; comp < 2; ++comp) {
        std::vector<double> ph(K + 1);
        for (double& p : ph) p = phase(rng);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = f.x(i);
            double acc = 0.0;
            for (int k = 0; k <= K; ++k) {
                const double b = std::ldexp(1.0, k);
                acc += std::pow(b, -alpha) * std::cos(2.0 * M_PI * b * x + ph[k]);
            }
            f.values[i][comp] = acc;
        }
    }
    return f;
}

SampledFunction random_step(std::uint64_t seed, const StepSpec& spec, double lo, double hi, std::size_t n) {
    SampledFunction f = make_sampled(lo, hi, n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(lo, hi), val(-1.0, 1.0);
    std::vector<double> xs;
    for (int attempt = 0; attempt < 10000; ++attempt) {
        xs.clear();
        for (std::size_t k = 0; k < spec.n_jumps; ++k) xs.push_back(pos(rng));
        std::sort(xs.begin(), xs.end());
        bool ok = true;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double prev = k == 0 ? lo : xs[k - 1];
            if (xs[k] - prev < spec.min_gap) ok = false;
        }
        if (!xs.empty() && hi - xs.back() < spec.min_gap) ok = false;
        if (ok) break;
        if (attempt == 9999) throw ConfigError("random_step: jumps do not fit with the requested gap");
    }
    std::vector<State> levels(spec.n_jumps + 1);
    for (State& s : levels) s = State(val(rng), val(rng));
    for (std::size_t i = 0; i < n; ++i) {
        const double x = f.x(i);
        const std::size_t seg = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
        f.values[i] = levels[seg];
    }
    return f;
}

SampledFunction rescale_into_ball(const SampledFunction& u, const State& center, double eps) {
    State mean = State::Zero();
    for (const State& v : u.values) mean += v;
    mean /= static_cast<double>(std::max<std::size_t>(1, u.size()));
    double dev = 0.0;
    for (const State& v : u.values) dev = std::max(dev, (v - mean).norm());
    SampledFunction out = u;
    for (State& v : out.values) v = dev > 0.0 ? State(center + eps * (v - mean) / dev) : center;
    return out;
}

double holder_exponent(const SampledFunction& u, int min_level, int max_level) {
    std::vector<double> hs, osc;
    const std::size_t n = u.size();
    for (int l = min_level; l <= max_level; ++l) {
        const std::size_t k = std::size_t{1} << l;
        if (k >= n) break;
        double m = 0.0;
        const std::size_t last = u.periodic ? n : n - k;
        for (std::size_t i = 0; i < last; ++i) m = std::max(m, (u.values[(i + k) % n] - u.values[i]).norm());
        hs.push_back(static_cast<double>(k) * u.hx);
        osc.push_back(m);
    }
    return fit_loglog(hs, osc, 2, 0.0).slope;
}

StepData to_step_data(const SampledFunction& u, double lo, double hi) {
    StepData d;
    bool first = true;
    State last = State::Zero();
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double x = u.x(i);
        if (x < lo || x > hi) continue;
        if (first) {
            d.leftmost = u.values[i];
            last = u.values[i];
            first = false;
            continue;
        }
        if (u.values[i] != last) {
            d.jumps.emplace_back(x - 0.5 * u.hx, u.values[i]);
            last = u.values[i];
        }
    }
    if (first) throw ConfigError("no samples inside the requested interval");
    return d;
}

SampledFunction coarsen(const SampledFunction& u, std::size_t factor) {
    if (factor <= 1) return u;
    SampledFunction out;
    out.hx = u.hx * static_cast<double>(factor);
    out.x0 = u.lo() + 0.5 * out.hx;
    out.periodic = u.periodic;
    for (std::size_t b = 0; b + factor <= u.size(); b += factor) {
        State acc = State::Zero();
        for (std::size_t k = 0; k < factor; ++k) acc += u.values[b + k];
        out.values.push_back(acc / static_cast<double>(factor));
    }
    return out;
}

double l1_distance_sampled(const PiecewiseSolution& sol, const SampledFunction& u, double lo, double hi) {
    if (!(hi > lo) || u.size() == 0) return 0.0;
    const Cells c = cells_on(sol, lo, hi);
    const std::size_t n = u.size();
    auto index_of = [&](double x) {
        const double r = std::floor((x - u.lo()) / u.hx);
        if (r < 0.0) return std::size_t{0};
        return std::min(n - 1, static_cast<std::size_t>(r));
    };
    auto right_edge = [&](std::size_t i) { return i + 1 < n ? u.lo() + u.hx * static_cast<double>(i + 1) : kInf; };
    double acc = 0.0;
    for (std::size_t k = 0; k < c.values.size(); ++k) {
        double x = c.x[k];
        const double b = c.x[k + 1];
        std::size_t i = index_of(x);
        while (x < b) {
            while (right_edge(i) <= x) ++i;
            const double e = std::min(b, right_edge(i));
            acc += (c.values[k] - u.values[i]).norm() * (e - x);
            x = e;
        }
    }
    return acc;
}

std::string sampled_csv(const SampledFunction& u) {
    std::ostringstream os;
    os.precision(17);
    os << "x,u1,u2\n";
    for (std::size_t i = 0; i < u.size(); ++i) os << u.x(i) << ',' << u.values[i][0] << ',' << u.values[i][1] << '\n';
    return os.str();
}

}  // namespace ftlab
