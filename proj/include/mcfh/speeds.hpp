#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcfh/forcing.hpp"
#include "mcfh/obstacle.hpp"

namespace mcfh {

struct DetachmentReport {
    double level = 0;
    double radius = 0;
    std::optional<double> first_detach_time;
    bool persistent = false;
    double min_gap_after = 0;
    bool undecided = false;  // horizon too short for a decision
};

// Detachment on a grid: nu-gap between the solution's mu-level set and the
// obstacle's >= 2 dx within the report cylinder, persisting to the horizon.
DetachmentReport detect_detachment(const ObstacleRunResult& run, double mu,
                                   double radius);

enum class SpeedKind { head, tail };
enum class SpeedMethod { front_tracking, obstacle_bisection };

struct SpeedEstimate {
    Vec nu{0, 1, 0};
    SpeedKind kind = SpeedKind::head;
    double value = 0;
    SpeedMethod method = SpeedMethod::front_tracking;
    double half_width = 0;
    double horizon = 0;
};

struct FrontTrackingOptions {
    double T = 20.0;
    double dx = 1.0 / 32.0;
    double slab_height = 8.0;
    int n_samples = 80;  // head/tail samples over the horizon
};

// Planar run u0 = -x.nu on a quasi-periodic slab; head/tail fitted by
// least-squares lines over the second half of [0, T].
std::pair<SpeedEstimate, SpeedEstimate> estimate_speed_front_tracking(
    const Vec& nu, int dim, const ForcingField& g, const SchemeParams& params,
    const FrontTrackingOptions& opt = {}, double eps = 1.0);

struct BisectionOptions {
    double dx = 1.0 / 24.0;
    double T_probe = 4.0;
    double slab_height = 4.0;
    int max_iters = 6;  // detachment resolution ~2 dx / T caps useful depth
};

// Bisection on the obstacle speed s with detachment as the predicate, using
// the global-variant obstacle problem (full lateral period). Head: smallest
// s that detaches; tail: largest s that detaches.
SpeedEstimate estimate_speed_obstacle_bisection(const Vec& nu, int dim,
                                                const ForcingField& g,
                                                SpeedKind kind,
                                                const SchemeParams& params,
                                                const BisectionOptions& opt = {});

struct SweepRow {
    double theta = 0;
    Vec nu{0, 0, 0};
    double s_head = 0, s_tail = 0, hw_head = 0, hw_tail = 0;
    SpeedMethod method = SpeedMethod::front_tracking;
    bool ordering_ok = false;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double max_adjacent_variation = 0;  // reported, not asserted
    bool ordering_all_ok = false;
};

SweepResult sweep_directions(const ForcingField& g, const std::vector<double>& thetas,
                             const SchemeParams& params,
                             const FrontTrackingOptions& opt = {});

struct FingeringSeries {
    std::vector<double> t, head, tail, spread;
    double rate = 0;  // fitted linear growth of spread over the fit window
};

// Spread series head(t) - tail(t) from a planar level-set run.
FingeringSeries fingering_metric(const Vec& nu, int dim, const ForcingField& g,
                                 const SchemeParams& params,
                                 const FrontTrackingOptions& opt,
                                 double fit_t_min, double fit_t_max);

struct EnvelopeAnchor {
    Vec x{0, 0, 0};
    Vec nu{0, 0, 0};
    double sbar = 0;
};

struct EnvelopeReport {
    bool ok = false;
    double worst_excess = 0;  // max over nodes/times of (x - x_i).nu_i - sbar_i t
    Vec worst_point{0, 0, 0};
    double worst_time = 0;
};

// Checks that the zero-superlevel set of the run stays inside the moving
// intersection of half-spaces (x - x_i).nu_i <= sbar_i t, dilated by 3 dx.
EnvelopeReport check_envelope(const LevelSetField& initial, const ForcingField& g,
                              const SchemeParams& params, double T,
                              const std::vector<EnvelopeAnchor>& anchors,
                              int n_times = 4);

}  // namespace mcfh
