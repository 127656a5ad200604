#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcfh/forcing.hpp"
#include "mcfh/grid.hpp"
#include "mcfh/levelset.hpp"

namespace mcfh {

// Graph height U(y, t) over the (n-1)-torus [0,1)^{n-1}, torus dim 1 or 2.
struct GraphState {
    int torus_dim = 2;
    int m = 64;  // nodes per axis, dx = 1/m
    std::vector<double> U;
    double time = 0;
    double dx() const { return 1.0 / m; }
    long long idx(int i, int j) const {
        return torus_dim == 1 ? i : static_cast<long long>(j) * m + i;
    }
    long long nnodes() const { return torus_dim == 1 ? m : static_cast<long long>(m) * m; }
    Vec point(int i, int j) const {
        return torus_dim == 1 ? Vec{(i + 0.0) / m, 0, 0} : Vec{(i + 0.0) / m, (j + 0.0) / m, 0};
    }
};

GraphState make_graph_state(int torus_dim, int m,
                            const std::function<double(const Vec&)>& U0);

// One explicit step of U_t = sqrt(|DU|^2+1) div(DU/sqrt(|DU|^2+1))
//                          + g(y) sqrt(|DU|^2+1); central differences for the
// curvature terms, monotone upwind gradient in the forcing term.
// An optional mask freezes nodes (mask = 0).
GraphState graph_step(const GraphState& state, const ForcingField& gprime,
                      const SchemeParams& params,
                      const std::vector<std::uint8_t>* mask = nullptr);

// Discrete spatial operator of the graph equation at every node (the full
// right-hand side); exposed for residual checks.
std::vector<double> graph_operator(const GraphState& state, const ForcingField& gprime);

enum class GraphObstacleKind { sub, super };

struct GraphRunResult {
    GraphState state;
    std::vector<double> t, maxU, minU, spread, gap_to_obstacle;
};

// Obstacle graph evolution from U = 0 with projection U <- min(U, s t) (sub)
// or U <- max(U, s t) (super) after every step.
GraphRunResult evolve_graph_obstacle(double s, const ForcingField& gprime,
                                     const SchemeParams& params, double T,
                                     GraphObstacleKind kind, int m,
                                     int n_report = 40);

// First time the whole graph satisfies U < s t - 1 (sub) or U > s t + 1
// (super); nullopt if not reached by the horizon.
std::optional<double> measure_T_star(double s, const ForcingField& gprime,
                                     const SchemeParams& params, double horizon,
                                     GraphObstacleKind kind, int m);

struct TravelingWaveProfile {
    std::vector<std::uint8_t> E;  // node mask on the torus
    std::vector<double> Uprof;    // profile on E (0 off E)
    int torus_dim = 2;
    int m = 64;
    double speed = 0;
    GraphObstacleKind kind = GraphObstacleKind::sub;
    bool stabilized = false;
    std::vector<double> ladder_mask_change;  // symmetric-difference fraction per rung
};

// Ladder extraction: s_l = sbar + 1/l^2, t_l = l, profile U(., t_l) - s_l t_l
// recentered; mask E = {profile > -2 M0 K}. Runs l = 2, 4, 8 by default.
TravelingWaveProfile extract_traveling_wave(const ForcingField& gprime, double sbar,
                                            const SchemeParams& params,
                                            GraphObstacleKind kind, int m,
                                            double K = 1.0,
                                            const std::vector<int>& ladder = {2, 4, 8});

inline constexpr double kProfileClip = 20.0;  // |U| truncation for the radial profiles

struct RadialProfile {
    double r_inner = 0, r_outer = 0;  // domain of validity in r = |y - center|
    Vec center{0, 0, 0};
    double speed = 0;
    GraphObstacleKind kind = GraphObstacleKind::sub;
    // closed-form height at radius r (clipped at +-kProfileClip)
    std::function<double(double)> height;
    std::function<double(double)> height_unclipped;
};

// U1(r) = r + r1 ln((r1 - r)/r1) on [0, r1), traveling down at speed sbar.
RadialProfile construct_subsolution_profile(double r1, const Vec& y1, double sbar);

// U2(r) = (R - r2) ln((R - r2)/(r - r2)) - (R - r) on (r2, R], extended by 0
// for r >= R, traveling up at speed sunder.
RadialProfile construct_supersolution_profile(double r2, double R, const Vec& y2,
                                              double sunder);

struct ResidualReport {
    bool ok = false;
    double worst_residual = 0;  // signed, relative to the local scale
    Vec worst_node{0, 0, 0};
    long long nodes_checked = 0;
    std::string detail;
};

// Evaluates the discrete graph operator on the profile and asserts
// subsolution residual >= -tol (sub) or supersolution residual <= +tol
// (super) at interior mask nodes away from the clipped band. tol is the
// given fraction of the local scale g(y) + |speed|.
ResidualReport residual_check(const RadialProfile& profile, const ForcingField& gprime,
                              int m, double tol_fraction = 0.05,
                              double slope_cap = 4.0);

struct CorollaryReport {
    bool hypothesis_ok = false;
    std::string hypothesis_detail;
    double min_E1 = 0, max_E2 = 0;
    double spread_rate = 0;
    double required_rate = 0;
    bool fingering_ok = false;
    bool ok = false;
};

// Checks the two hypothesis inequalities by dense sampling, then runs the
// graph flow from U = 0 and asserts spread rate >= 0.9 (s_head_lb - s_tail_ub).
CorollaryReport verify_corollary(const CorollaryForcing& cf, const SchemeParams& params,
                                 int m = 128, double t_lo = 0.1, double t_hi = 0.5);

}  // namespace mcfh
