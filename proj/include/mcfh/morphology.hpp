#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mcfh/grid.hpp"

namespace mcfh {

// Exact discrete erosion: out(x) = min of u over the closed Euclidean ball of
// the given per-node radius (in physical units). Brute-force node search.
LevelSetField inf_convolution(const LevelSetField& field,
                              const std::vector<double>& radius);
LevelSetField inf_convolution(const LevelSetField& field, double radius);

struct ExteriorBallReport {
    long long boundary_nodes = 0;
    long long failures = 0;
    std::string detail;
};

// For each boundary node x of {u <= mu}, checks that some node y at distance
// radius (within dx) has the whole discrete ball around it inside {u <= mu}.
ExteriorBallReport check_exterior_ball(const LevelSetField& field, double mu,
                                       double radius);

struct InfConvParams {
    std::function<double(double)> r;       // t -> positive radius factor
    std::function<double(double)> rdot;    // derivative of r
    std::function<double(const Vec&)> phi; // x -> positive
    std::function<double(const Vec&)> phi_grad_norm;  // |D phi|(x)
    double phi_grad_bound = 0;  // certified sup |D phi|
    double phi_hess_bound = 0;  // certified sup |D^2 phi|
    double m0 = 0, M0 = 0, L0 = 0;
    int n = 2;
};

struct EvolutionInequalityReport {
    double max_lhs = -1e300;  // worst (largest) value of the left side
    long long violations = 0;
    long long samples = 0;
    bool feasible_everywhere = true;  // r |D phi| < 1 held at all samples
    std::string detail;
};

// Samples r' + ((n+1)|D^2 phi|_inf / phi + M0 |D phi| / phi + L0) r
//         + |D phi|^2 r / ((1 - r |D phi|)^2 phi^2)  <= 0
// over the given spatial points and time grid.
EvolutionInequalityReport check_evolution_inequality(
    const InfConvParams& p, const std::vector<Vec>& points,
    const std::vector<double>& times);

// The concrete pair used in the local comparison argument:
// gamma(t) = 1/2 exp(-2 L0 t) and the quadratic cap
// phi(x) = -9(1+C)/(2 C R^2) |x_perp|^2 + (3 - 1/C)/2 on the cylinder of
// radius R/3, with certified |D phi| <= 6/R and |D^2 phi| <= 18/R^2.
InfConvParams make_lcp_pair(int n, double m0, double M0, double L0, double C,
                            double R, const Vec& nu);

// Admissible time-step bound (C-1) delta^2 / ((n-1) C^2 + C (C-1) M0 delta).
// Throws for C <= 1 or delta <= 0; n < 2 is accepted but flagged by callers.
double finite_speed_dt_bound(double C, double delta, int n, double M0);

}  // namespace mcfh
