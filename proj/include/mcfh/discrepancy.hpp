#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcfh/util.hpp"

namespace mcfh {

enum class Rationality { rational, irrational, undecided };

// Direction nu with a rationality tag decided by continued-fraction search of
// the component ratios up to a denominator bound. For rational directions,
// lattice_dir is the primitive integer vector parallel to nu.
struct Direction {
    Vec nu{0, 1, 0};
    int dim = 2;
    Rationality rationality = Rationality::undecided;
    std::array<long long, 3> lattice_dir{0, 0, 0};  // valid when rational
    long long denominator_bound = 1'000'000;
    double linf() const {
        double m = 0;
        for (int i = 0; i < dim; ++i) m = std::max(m, std::abs(nu[i]));
        return m;
    }
};

Direction make_direction(const Vec& nu, int dim,
                         long long denominator_bound = 1'000'000);

// D*_N(x): sup_{0<a<=1} |A([0,a); N)/N - a| for the sequence {l x mod 1},
// via the sorted-sample formula 1/(2N) + max_i |x_i - (2i-1)/(2N)|.
double modified_discrepancy(double x, long long N);

// D_N(x): sup over all intervals [a,b), via the sorted-sample formula
// 1/N + max_i(x_i - i/N) - min_i(x_i - i/N).
double discrepancy(double x, long long N);

// Independent oracle: exact sup by enumerating critical interval endpoints
// at the sample points. O(N^2); used for cross-validation.
double discrepancy_bruteforce(double x, long long N);
double modified_discrepancy_bruteforce(double x, long long N);

// omega_nu(N) = 2 min_j D*_N(m_j) with m_j |nu|_linf = |nu_j|.
double omega(const Direction& nu, long long N);

// Smallest N with omega_nu(N) < threshold, searched up to maxN.
std::optional<long long> smallest_N_below(const Direction& nu, double threshold,
                                          long long maxN = 2'000'000);

struct LatticePointResult {
    Vec z0{0, 0, 0};
    double z0_dot_nu = 0;     // equals (z0 - x0).nu since x0 is on the hyperplane
    double dist_to_2x0 = 0;
    long long N = 0;          // smallest N with omega < delta / (3 |nu|_linf)
    double R0 = 0;            // 6N + 3 sqrt(n) + 9
    bool ok = false;
    std::string detail;
};

// Finds z0 with (i) delta/3 < (z0 - x0).nu < delta, (ii) |z0 - 2 x0| < R/3,
// (iii) z0 - x0 in Z^n, by bounded exhaustive search; verifies (i)-(iii)
// before returning. x0 must lie on R S^{n-1} intersected with the hyperplane
// x.nu = 0. Throws for rational directions (not applicable).
LatticePointResult lattice_point_near_hyperplane(const Direction& nu, double delta,
                                                 const Vec& x0);

// Minimal-norm integer vector with xi.nu > A; ties broken by ascending
// lexicographic order.
std::array<long long, 3> lattice_min_shift(const Direction& nu, double A);

struct ComparisonConstants {
    double T = 0, m0 = 0, M0 = 0, L0 = 0;
    int n = 0;
    double gamma_T = 0;  // 1/2 exp(-2 L0 T)
    double delta_T = 0;  // M0 m0/(M0-m0) * gamma^2 / (sqrt(M0 gamma + n-1) + sqrt(n-1))^2
};

ComparisonConstants comparison_constants(double T, double m0, double M0,
                                         double L0, int n);

struct ComparisonConsistencyReport {
    bool consistent = false;
    double delta_witness = 0;
    std::string detail;
};

// True iff lattice points exist for a deterministic sample of x0 on the
// boundary of the cylinder of radius R around direction nu, with a witness
// delta below delta(T).
ComparisonConsistencyReport is_comparison_consistent(const Direction& nu,
                                                     const ComparisonConstants& cc,
                                                     double R);

}  // namespace mcfh
