#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mcfh/util.hpp"

namespace mcfh {

enum class ForcingKind { closed_form, grid_sampled, laminar };

// Z^n-periodic forcing g with certified bounds 0 < m0 <= g <= M0 and
// Lipschitz constant L0 (unit periodicity cell [0,1)^n).
struct ForcingField {
    int dim = 2;
    ForcingKind kind = ForcingKind::closed_form;
    double m0 = 1.0, M0 = 1.0, L0 = 0.0;
    std::function<double(const Vec&)> evaluator;
    double operator()(const Vec& x) const { return evaluator(x); }
};

ForcingField make_constant_forcing(int dim, double c);

// g(x) = base + amp * prod_i sin(2 pi x_i); requires base > |amp| * 1.
ForcingField make_sinusoidal_forcing(int dim, double base, double amp);

// Grid sample on a uniform lattice of [0,1)^dim, evaluated by bilinear /
// trilinear interpolation with periodic wrap. L0 is the interpolant's
// Lipschitz constant from adjacent-sample difference quotients.
ForcingField make_grid_sampled_forcing(int dim, const std::vector<double>& samples,
                                       const std::vector<int>& shape);

struct HypothesisReport {
    double m0_est = 0, M0_est = 0, L0_est = 0;
    bool ok = false;
    std::string detail;
};

// Empirical check of the declared bounds over a deterministic sample lattice
// with `samples` points per axis. Throws on a nonpositive sampled value.
HypothesisReport validate_hypothesis(const ForcingField& field, int samples,
                                     double tol = 1e-9);

// Parameters of the explicit laminar construction on the (n-1)-torus:
// g >= g_high on E1 = B(y1, r1), g <= g_low outside B(y2, r2), with a
// quintic smoothstep transition in between.
struct CorollaryParams {
    int n = 3;  // ambient dimension; the forcing lives on the (n-1)-torus
    double r1 = 0.15, r2 = 0.25, R = 0.45;
    Vec y1{0.5, 0.5, 0.0};
    Vec y2{0.5, 0.5, 0.0};
    double sigma = 1.0;
    double g_high = 45.0, g_low = 0.5;
};

CorollaryParams reference_corollary_params();

// Throws a parameter error quoting the violated inequality if invalid.
void validate_corollary_params(const CorollaryParams& p);

struct CorollaryForcing {
    ForcingField gprime;   // on the (n-1)-torus
    CorollaryParams params;
    double s_head_lb = 0;  // g_high - sqrt(2) n / r1
    double s_tail_ub = 0;  // 2 / (R - r2) + sigma
};

CorollaryForcing make_corollary_forcing(const CorollaryParams& p);

// Lift a field on R^{n-1} to a laminar field on R^n (independent of x_n).
ForcingField make_laminar(const ForcingField& gprime);

}  // namespace mcfh
