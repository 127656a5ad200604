#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcfh/forcing.hpp"
#include "mcfh/levelset.hpp"

namespace mcfh {

// The tuple a = (nu, R, Rdot, q, s): obstacle plane with slope q moving at
// speed s along nu = -q/|q|, posed on the cylinder of initial radius R
// expanding (Rdot > 0) or shrinking (Rdot < 0). global = true drops the
// cylinder and solves on a full lateral period (quasi-periodic wrap), the
// global variant of the obstacle problem.
struct ObstacleProblem {
    int dim = 2;
    Vec nu{0, 1, 0};
    double R = 2.0;
    double Rdot = 0.0;
    Vec q{0, -1, 0};
    double s = 1.0;
    bool global = false;
    void validate(double m0, double M0) const;
};

double obstacle_value(const ObstacleProblem& p, const Vec& x, double t);

enum class LateralBC { barrier, obstacle_clamp };

struct ObstacleRunOptions {
    double slab_height = 6.0;       // extent along the propagation axis
    double lateral_margin = 0.5;    // box padding beyond the final radius
    int n_report = 40;              // number of report times
    double report_radius = -1.0;    // inner-cylinder radius for gap stats (<0: 0.8 R)
    double mu = 0.0;                // level for the nu-gap series
    LateralBC bc = LateralBC::barrier;
    bool keep_snapshots = false;
    std::vector<double> snapshot_times;
};

struct ObstacleRunResult {
    LevelSetField field;  // final state
    std::vector<double> t, axis_gap, max_gap, min_gap, touching_fraction;
    std::vector<double> level_gap;  // nu-gap at level mu within report_radius
    std::vector<LevelSetField> snapshots;
    bool barrier_fallback = false;  // super barrier inadmissible, clamped instead
    double dx = 0;
};

// Projected evolution approximating the maximal subsolution below O_e:
// u(.,0) = O_e(.,0), each step u <- min(u, O_e(.,t)). Lateral Dirichlet data
// from the explicit sub barrier when Rdot >= 0, obstacle clamp otherwise.
ObstacleRunResult evolve_sub(const ObstacleProblem& p, const ForcingField& g,
                             const SchemeParams& params, double T, double dx,
                             const ObstacleRunOptions& opt = {});

// Dual: u <- max(u, O_e); super barrier requires Rdot >= sqrt(M0^2 - s^2),
// else falls back to obstacle clamping with a warning flag.
ObstacleRunResult evolve_super(const ObstacleProblem& p, const ForcingField& g,
                               const SchemeParams& params, double T, double dx,
                               const ObstacleRunOptions& opt = {});

// Explicit moving-plane barriers that pin the solution on the lateral boundary.
double sub_barrier_value(const ObstacleProblem& p, double m0, const Vec& x, double t);
double super_barrier_value(const ObstacleProblem& p, const Vec& x, double t);
bool super_barrier_admissible(const ObstacleProblem& p, double M0);

enum class BirkhoffVariant {
    expanding_sub,
    expanding_super,
    static_sub,
    static_super,
    shrinking_sub,
    shrinking_super,
};

struct BirkhoffCheck {
    BirkhoffVariant variant = BirkhoffVariant::expanding_sub;
    Vec dz{0, 0, 0};      // lattice vector; last component may be real for laminar g
    double dt = 0;
    double R2 = 0;        // second radius for the static-pair variants
    bool laminar = false; // allows real dz along the last axis
    double t0 = 0.25;     // base time at which the inequality is sampled
};

struct BirkhoffReport {
    bool admissible = false;
    std::string violated_condition;  // empty when admissible
    double max_violation = 0;        // over common nodes, at sampled times
    long long nodes_checked = 0;
};

// Verifies the admissibility inequalities of the matching proposition, runs
// the needed evolution(s), and evaluates the claimed pointwise inequality on
// all common grid nodes. Throws on inadmissible (dz, dt).
BirkhoffReport check_birkhoff(const BirkhoffCheck& chk, const ObstacleProblem& p,
                              const ForcingField& g, const SchemeParams& params,
                              double dx);

struct LcpReport {
    bool applicable = false;
    std::string detail;
    double min_margin = 0;     // min over sampled nodes/times of lower - upper
    bool ordering_holds = false;
    std::array<long long, 3> xi0{0, 0, 0};
    double delta = 0, Rdot = 0;
};

// Local comparison conclusion: with s1 < s2, xi0 the minimal lattice shift
// past level 1, the sub solution at speed s2 stays strictly below the super
// solution at speed s1 shifted by xi0, on the inner cylinder over [0, T].
// negate_shift replaces xi0 by -xi0 (negative control).
LcpReport check_lcp(const Vec& nu, int dim, double s1, double s2,
                    const ForcingField& g, const SchemeParams& params,
                    double T, double dx, double R, bool negate_shift = false);

}  // namespace mcfh
