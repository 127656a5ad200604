#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mcfh/forcing.hpp"
#include "mcfh/grid.hpp"

namespace mcfh {

struct SchemeParams {
    double cfl_factor = 0.5;   // in (0, 1]
    double grad_reg = 1e-6;    // delta_reg inside the curvature projection only
    long long max_steps = 50'000'000;
    int workers = 1;
    void validate(double dx) const;
};

double cfl_dt(const Grid& grid, double eps, double M0, double cfl_factor);

// One explicit Euler step of u_t = eps tr{D^2 u (I - p^ p^)} + g(x/eps) |Du|.
// Curvature by central differences with p^ = Du / sqrt(|Du|^2 + reg^2),
// forcing by the monotone upwind (Rouy-Tourin) gradient, valid for g > 0.
// An optional node mask freezes cells where mask = 0.
LevelSetField step(const LevelSetField& state, const ForcingField& g,
                   const SchemeParams& params,
                   const std::vector<std::uint8_t>* mask = nullptr);

// Same step with forcing values precomputed per node (g(x/eps)); avoids
// re-evaluating g when the window has not moved.
LevelSetField step_cached(const LevelSetField& state, const std::vector<double>& gval,
                          double M0, const SchemeParams& params,
                          const std::vector<std::uint8_t>* mask);

struct SolveCallbacks {
    // Called after reaching each requested output time (and at t = 0).
    std::function<void(const LevelSetField&)> on_output;
    std::vector<double> output_times;
};

// Iterate step() until time >= T. If the grid's last axis is clamped and
// moving_window is set, the window shifts by integer lattice vectors along
// that axis whenever the front's median coordinate drifts past one g-period,
// keeping the front away from the caps; exposed rows are filled by constant
// extension.
LevelSetField solve(LevelSetField state, const ForcingField& g,
                    const SchemeParams& params, double T,
                    const SolveCallbacks& callbacks = {},
                    bool moving_window = false, double front_level = 0.0);

struct FrontSet {
    std::vector<Vec> points;
    double head = 0.0, tail = 0.0;  // sup / inf of x.nu over the points
    bool empty = true;
};

// Crossing points of the level-mu set by linear interpolation along grid
// edges. head/tail are measured along nu, restricted to the cylinder
// |(x - x0)_perp| <= r around x0 (r <= 0 means no restriction).
FrontSet extract_front(const LevelSetField& state, double level, const Vec& nu,
                       const Vec& x0 = {0, 0, 0}, double r = -1.0);

// Direction-dependent speed table on the circle (2D): s(theta) with linear
// interpolation between tabulated angles.
struct SpeedTable {
    std::vector<double> theta;  // sorted, in [0, 2 pi)
    std::vector<double> s;      // positive
    double operator()(double angle) const;
    double max_speed() const;
    void validate() const;
};

// First-order monotone upwind solve of u_t = s(-D^u)|Du| (2D).
LevelSetField solve_homogenized(const SpeedTable& speed, LevelSetField state,
                                const SchemeParams& params, double T);

}  // namespace mcfh
