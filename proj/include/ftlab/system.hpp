#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ftlab {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using State = Eigen::Vector2d;

struct EntropyPair {
    std::function<double(const State&)> eta;
    std::function<Vec2(const State&)> grad;
    std::function<Mat2(const State&)> hess;
    std::function<double(const State&)> q;
};

// Closed-form Riemann coordinates. v_2 is constant along 1-rarefactions and
// v_1 along 2-rarefactions; both increase with the wave speed of their family.
struct InvariantChart {
    std::function<Vec2(const State&)> forward;
    std::function<State(const Vec2&)> inverse;
};

struct FluxSystem {
    std::string name;
    std::string description;
    std::function<Vec2(const State&)> flux;
    std::function<Mat2(const State&)> jacobian;
    std::function<std::array<Mat2, 2>(const State&)> hessians;
    State center = State::Zero();
    double radius = 0.1;
    double s_max = 0.1;
    std::optional<EntropyPair> entropy;
    std::optional<InvariantChart> chart;

    // f''(u)(a, b)
    Vec2 second_derivative(const State& u, const Vec2& a, const Vec2& b) const;
    bool in_ball(const State& u, double scale = 1.0) const;
    bool has_entropy() const { return entropy.has_value(); }
};

struct EigenData {
    std::array<double, 2> lambda{};
    std::array<Vec2, 2> r;
    std::array<Vec2, 2> l;
};

inline constexpr double kHyperbolicGap = 1e-6;

// family is 1 or 2 throughout the public API
EigenData eigensystem(const FluxSystem& sys, const State& u, bool check_domain = true);
double wave_speed(const FluxSystem& sys, const State& u, int family);

struct GnlEntry {
    State state;
    int family = 1;
    double value = 0.0;
    bool flagged = false;
};

struct SjEntry {
    State state;
    int i = 1;  // left eigenvector family
    int j = 2;  // right eigenvector family
    double value = 0.0;
};

struct SjReport {
    std::vector<SjEntry> entries;
    bool passes = true;
    double min_value = 0.0;
    double max_value = 0.0;
};

struct EntropyCheck {
    double max_residual = 0.0;
    bool passes = false;
    double tolerance = 1e-8;
};

std::vector<State> ball_grid(const State& center, double radius, int n);

std::vector<GnlEntry> check_genuine_nonlinearity(const FluxSystem& sys, const std::vector<State>& grid);
SjReport check_smoller_johnson(const FluxSystem& sys, const std::vector<State>& grid);
EntropyCheck check_entropy_pair(const FluxSystem& sys, const std::vector<State>& grid, double tol = 1e-8);

// Jacobian of an arbitrary flux by fourth-order central differences.
Mat2 fd_jacobian(const std::function<Vec2(const State&)>& f, const State& u, double h);

FluxSystem appendix_a_system();
FluxSystem p_system(double gamma = 2.0);
FluxSystem linear_advection_system();
FluxSystem decoupled_burgers_system();

std::vector<FluxSystem> builtin_systems();
const FluxSystem& system_by_name(const std::string& name);

}  // namespace ftlab
