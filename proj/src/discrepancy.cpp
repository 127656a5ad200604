#include "mcfh/discrepancy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mcfh {

namespace {

std::vector<double> sample_points(double x, long long N) {
    std::vector<double> p(N);
    for (long long l = 1; l <= N; ++l) p[l - 1] = frac(l * x);
    std::sort(p.begin(), p.end());
    return p;
}

// Best rational approximation p/q of r with q <= qmax and error < tol, via
// continued fractions. Returns false if none within tolerance.
bool cf_rational(double r, long long qmax, double tol, long long& p, long long& q) {
    long long p0 = 1, q0 = 0, p1 = static_cast<long long>(std::floor(r)), q1 = 1;
    double x = r;
    for (int it = 0; it < 64; ++it) {
        if (std::abs(r - static_cast<double>(p1) / q1) < tol) {
            p = p1;
            q = q1;
            return true;
        }
        double fr = x - std::floor(x);
        if (fr < 1e-15) break;
        x = 1.0 / fr;
        long long a = static_cast<long long>(std::floor(x));
        long long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > qmax || q2 < 0) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    }
    if (std::abs(r - static_cast<double>(p1) / q1) < tol) {
        p = p1;
        q = q1;
        return true;
    }
    return false;
}

long long gcdll(long long a, long long b) { return std::gcd(std::llabs(a), std::llabs(b)); }

}  // namespace

Direction make_direction(const Vec& nu_in, int dim, long long denominator_bound) {
    Direction d;
    d.dim = dim;
    d.nu = normalized(nu_in, dim);
    d.denominator_bound = denominator_bound;

    // ratios relative to the largest component; a common small denominator for
    // all of them means nu is parallel to an integer vector
    int jmax = 0;
    for (int i = 1; i < dim; ++i)
        if (std::abs(d.nu[i]) > std::abs(d.nu[jmax])) jmax = i;
    long long q_lcm = 1;
    bool all_rational = true;
    std::array<long long, 3> nums{0, 0, 0};
    for (int i = 0; i < dim && all_rational; ++i) {
        double ratio = d.nu[i] / d.nu[jmax];
        long long p = 0, q = 1;
        if (!cf_rational(ratio, denominator_bound, 1e-12, p, q)) {
            all_rational = false;
            break;
        }
        long long g = q_lcm / gcdll(q_lcm, q) * q;
        if (g > denominator_bound || g <= 0) {
            all_rational = false;
            break;
        }
        q_lcm = g;
    }
    if (all_rational) {
        for (int i = 0; i < dim; ++i) {
            double v = d.nu[i] / d.nu[jmax] * q_lcm;
            nums[i] = static_cast<long long>(std::llround(v));
            if (std::abs(v - nums[i]) > 1e-9) all_rational = false;
        }
    }
    if (all_rational) {
        long long g = 0;
        for (int i = 0; i < dim; ++i) g = gcdll(g, nums[i]);
        if (g > 1)
            for (int i = 0; i < dim; ++i) nums[i] /= g;
        d.rationality = Rationality::rational;
        d.lattice_dir = nums;
    } else {
        // floating-point input is never exactly irrational; treated as
        // irrational for search purposes past the denominator bound
        d.rationality = Rationality::irrational;
    }
    return d;
}

double modified_discrepancy(double x, long long N) {
    if (N < 1) throw error("modified_discrepancy: N >= 1 required");
    auto p = sample_points(x, N);
    double worst = 0;
    for (long long i = 1; i <= N; ++i)
        worst = std::max(worst, std::abs(p[i - 1] - (2.0 * i - 1.0) / (2.0 * N)));
    return 1.0 / (2.0 * N) + worst;
}

double discrepancy(double x, long long N) {
    if (N < 1) throw error("discrepancy: N >= 1 required");
    auto p = sample_points(x, N);
    double mx = -1e300, mn = 1e300;
    for (long long i = 1; i <= N; ++i) {
        double d = p[i - 1] - static_cast<double>(i) / N;
        mx = std::max(mx, d);
        mn = std::min(mn, d);
    }
    return 1.0 / N + mx - mn;
}

double modified_discrepancy_bruteforce(double x, long long N) {
    auto p = sample_points(x, N);
    // sup over a in (0,1] of |#{p_i < a}/N - a|: extremes occur as a
    // approaches a sample point from either side, or at a = 1
    double worst = 0;
    for (long long i = 0; i < N; ++i) {
        double a = p[i];
        // just below a: count = #{p_j < a}, interval length -> a
        long long below = 0;
        while (below < N && p[below] < a) ++below;
        long long below_eq = below;
        while (below_eq < N && p[below_eq] <= a) ++below_eq;
        worst = std::max(worst, std::abs(static_cast<double>(below) / N - a));
        worst = std::max(worst, std::abs(static_cast<double>(below_eq) / N - a));
    }
    return worst;
}

double discrepancy_bruteforce(double x, long long N) {
    auto p = sample_points(x, N);
    std::vector<double> ends;
    ends.push_back(0.0);
    ends.push_back(1.0);
    for (double v : p) ends.push_back(v);
    std::sort(ends.begin(), ends.end());
    ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
    auto count_in = [&](double a, double b, bool a_closed, bool b_open_strict) {
        // points in [a, b) with optional openness tweaks at the endpoints to
        // capture one-sided limits
        long long c = 0;
        for (double v : p) {
            bool geq_a = a_closed ? v >= a : v > a;
            bool lt_b = b_open_strict ? v < b : v <= b;
            if (geq_a && lt_b) ++c;
        }
        return c;
    };
    double worst = 0;
    for (size_t ia = 0; ia < ends.size(); ++ia)
        for (size_t ib = ia; ib < ends.size(); ++ib) {
            double a = ends[ia], b = ends[ib];
            double len = b - a;
            for (bool ac : {true, false})
                for (bool bo : {true, false}) {
                    double c = static_cast<double>(count_in(a, b, ac, bo)) / N;
                    worst = std::max(worst, std::abs(c - len));
                }
        }
    return worst;
}

double omega(const Direction& nu, long long N) {
    if (N <= 1) throw error("omega: N > 1 required");
    double linf = nu.linf();
    double best = 1e300;
    for (int j = 0; j < nu.dim; ++j) {
        double mj = std::abs(nu.nu[j]) / linf;
        best = std::min(best, modified_discrepancy(mj, N));
    }
    return 2.0 * best;
}

std::optional<long long> smallest_N_below(const Direction& nu, double threshold,
                                          long long maxN) {
    for (long long N = 2; N <= maxN; ++N)
        if (omega(nu, N) < threshold) return N;
    return std::nullopt;
}

LatticePointResult lattice_point_near_hyperplane(const Direction& nu, double delta,
                                                 const Vec& x0) {
    if (nu.rationality == Rationality::rational)
        throw error("lattice_point_near_hyperplane: not applicable to rational directions");
    if (delta <= 0 || delta >= 1) throw error("lattice_point_near_hyperplane: need 0 < delta < 1");
    int n = nu.dim;
    double R = norm(x0, n);
    if (std::abs(dot(x0, nu.nu, n)) > 1e-9 * std::max(1.0, R))
        throw error("lattice_point_near_hyperplane: x0 must lie on the hyperplane x.nu = 0");

    LatticePointResult res;
    auto N = smallest_N_below(nu, delta / (3.0 * nu.linf()), 2'000'000);
    if (!N) throw error("lattice_point_near_hyperplane: omega threshold not reached");
    res.N = *N;
    res.R0 = 6.0 * static_cast<double>(*N) + 3.0 * std::sqrt(static_cast<double>(n)) + 9.0;
    if (R < res.R0 - 1e-9) {
        std::ostringstream os;
        os << "lattice_point_near_hyperplane: |x0| = " << R << " below R0 = " << res.R0;
        throw error(os.str());
    }

    // Search z0 = x0 + xi, xi integer. Constraint (ii) |z0 - 2 x0| < R/3 bounds
    // the lateral coordinates of xi near x0; constraint (i) pins the last
    // coordinate to a thin slab, making the search linear in the box side.
    double box = R / 3.0;
    int jmax = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(nu.nu[i]) > std::abs(nu.nu[jmax])) jmax = i;

    long long lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    for (int a = 0; a < n; ++a) {
        lo[a] = static_cast<long long>(std::ceil(x0[a] - box));
        hi[a] = static_cast<long long>(std::floor(x0[a] + box));
    }
    auto check = [&](const std::array<long long, 3>& xi) -> bool {
        Vec z{x0[0] + xi[0], x0[1] + xi[1], x0[2] + xi[2]};
        double zn = dot(z, nu.nu, n);
        if (!(zn > delta / 3.0 && zn < delta)) return false;
        Vec d{z[0] - 2 * x0[0], z[1] - 2 * x0[1], z[2] - 2 * x0[2]};
        if (norm(d, n) >= box) return false;
        res.z0 = z;
        res.z0_dot_nu = zn;
        res.dist_to_2x0 = norm(d, n);
        res.ok = true;
        return true;
    };

    std::array<long long, 3> xi{0, 0, 0};
    auto scan_last = [&](int axis) -> bool {
        // solve delta/3 < (x0 + xi).nu < delta for xi[axis]
        double rest = 0;
        for (int a = 0; a < n; ++a)
            if (a != axis) rest += (x0[a] + xi[a]) * nu.nu[a];
        rest += x0[axis] * nu.nu[axis];
        double b1 = (delta / 3.0 - rest) / nu.nu[axis];
        double b2 = (delta - rest) / nu.nu[axis];
        long long klo = static_cast<long long>(std::ceil(std::min(b1, b2) - 1e-12));
        long long khi = static_cast<long long>(std::floor(std::max(b1, b2) + 1e-12));
        klo = std::max(klo, lo[axis]);
        khi = std::min(khi, hi[axis]);
        for (long long kk = klo; kk <= khi; ++kk) {
            xi[axis] = kk;
            if (check(xi)) return true;
        }
        return false;
    };

    bool found = false;
    if (n == 2) {
        int other = 1 - jmax;
        for (long long i = lo[other]; i <= hi[other] && !found; ++i) {
            xi[other] = i;
            found = scan_last(jmax);
        }
    } else {
        int o1 = -1, o2 = -1;
        for (int a = 0; a < 3; ++a)
            if (a != jmax) (o1 < 0 ? o1 : o2) = a;
        for (long long i = lo[o1]; i <= hi[o1] && !found; ++i) {
            xi[o1] = i;
            for (long long j = lo[o2]; j <= hi[o2] && !found; ++j) {
                xi[o2] = j;
                found = scan_last(jmax);
            }
        }
    }
    if (!found)
        throw error("lattice_point_near_hyperplane: exhaustive search failed (R < R0 or bug)");
    return res;
}

std::array<long long, 3> lattice_min_shift(const Direction& nu, double A) {
    // expanding-shell enumeration; some multiple of the axis closest to nu
    // always qualifies, so the search terminates
    for (long long rad = 1; rad <= 100000; ++rad) {
        std::array<long long, 3> best{0, 0, 0};
        double best_norm2 = 1e300;
        bool have = false;
        long long kmax = nu.dim == 3 ? rad : 0;
        for (long long i = -rad; i <= rad; ++i)
            for (long long j = -rad; j <= rad; ++j)
                for (long long k = -kmax; k <= kmax; ++k) {
                    double dn = i * nu.nu[0] + j * nu.nu[1] + k * nu.nu[2];
                    if (!(dn > A)) continue;
                    double n2 = static_cast<double>(i * i + j * j + k * k);
                    std::array<long long, 3> cand{i, j, k};
                    if (!have || n2 < best_norm2 - 1e-12 ||
                        (std::abs(n2 - best_norm2) <= 1e-12 && cand < best)) {
                        best = cand;
                        best_norm2 = n2;
                        have = true;
                    }
                }
        // a qualifying vector inside the box is only provably minimal once the
        // whole shell of its norm fits in the box
        if (have && std::sqrt(best_norm2) <= static_cast<double>(rad)) return best;
    }
    throw error("lattice_min_shift: search exhausted");
}

ComparisonConstants comparison_constants(double T, double m0, double M0, double L0,
                                         int n) {
    if (!(M0 > m0 && m0 > 0)) throw error("comparison_constants: need M0 > m0 > 0");
    if (L0 <= 0) throw error("comparison_constants: need L0 > 0");
    if (T < 0) throw error("comparison_constants: need T >= 0");
    ComparisonConstants c;
    c.T = T; c.m0 = m0; c.M0 = M0; c.L0 = L0; c.n = n;
    c.gamma_T = 0.5 * std::exp(-2.0 * L0 * T);
    double root = std::sqrt(M0 * c.gamma_T + (n - 1)) + std::sqrt(static_cast<double>(n - 1));
    c.delta_T = (M0 * m0 / (M0 - m0)) * c.gamma_T * c.gamma_T / (root * root);
    return c;
}

ComparisonConsistencyReport is_comparison_consistent(const Direction& nu,
                                                     const ComparisonConstants& cc,
                                                     double R) {
    ComparisonConsistencyReport rep;
    int n = nu.dim;
    if (R < std::sqrt(static_cast<double>(n)) / 2.0) {
        rep.detail = "cylinder radius below sqrt(n)/2: domain degenerate";
        return rep;
    }
    if (nu.rationality == Rationality::rational) {
        rep.detail = "rational direction: lattice points at fixed positive distance, no delta-close point";
        return rep;
    }
    double delta = cc.delta_T / 2.0;  // witness strictly below delta(T)
    rep.delta_witness = delta;

    // deterministic sample of x0 on the radius-R sphere inside the hyperplane
    std::vector<Vec> samples;
    if (n == 2) {
        Vec w = normalized(Vec{-nu.nu[1], nu.nu[0], 0}, 2);
        samples.push_back(scaled(w, R, 2));
        samples.push_back(scaled(w, -R, 2));
    } else {
        Vec a{1, 0, 0};
        if (std::abs(nu.nu[0]) > 0.9) a = Vec{0, 1, 0};
        Vec e1 = normalized(perp(a, nu.nu, 3), 3);
        Vec e2{nu.nu[1] * e1[2] - nu.nu[2] * e1[1], nu.nu[2] * e1[0] - nu.nu[0] * e1[2],
               nu.nu[0] * e1[1] - nu.nu[1] * e1[0]};
        for (int t = 0; t < 8; ++t) {
            double th = 2.0 * M_PI * t / 8.0;
            Vec x{R * (std::cos(th) * e1[0] + std::sin(th) * e2[0]),
                  R * (std::cos(th) * e1[1] + std::sin(th) * e2[1]),
                  R * (std::cos(th) * e1[2] + std::sin(th) * e2[2])};
            samples.push_back(x);
        }
    }
    try {
        for (const Vec& x0 : samples) {
            auto res = lattice_point_near_hyperplane(nu, delta, x0);
            if (!res.ok) {
                rep.detail = "lattice point search failed";
                return rep;
            }
        }
    } catch (const std::exception& e) {
        rep.detail = e.what();
        return rep;
    }
    rep.consistent = true;
    rep.detail = "lattice points found for all sampled boundary points";
    return rep;
}

}  // namespace mcfh
