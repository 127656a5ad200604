#include "mcfh/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mcfh {

namespace {

// Offsets within a closed ball of the given radius (physical units), as cell
// deltas. Shared by erosion and the ball checks.
std::vector<std::array<int, 3>> ball_offsets(double radius, double dx, int dim) {
    int r = static_cast<int>(std::floor(radius / dx + 1e-12));
    std::vector<std::array<int, 3>> out;
    int kr = dim == 3 ? r : 0;
    for (int k = -kr; k <= kr; ++k)
        for (int j = -r; j <= r; ++j)
            for (int i = -r; i <= r; ++i) {
                double d2 = (static_cast<double>(i) * i + static_cast<double>(j) * j +
                             static_cast<double>(k) * k) * dx * dx;
                if (d2 <= radius * radius + 1e-12) out.push_back({i, j, k});
            }
    return out;
}

}  // namespace

LevelSetField inf_convolution(const LevelSetField& field, const std::vector<double>& radius) {
    const Grid& gr = field.grid;
    if (radius.size() != field.v.size()) throw error("inf_convolution: radius size mismatch");
    double rmax = 0;
    for (double r : radius) {
        if (r < 0) throw error("inf_convolution: negative radius");
        rmax = std::max(rmax, r);
    }
    for (int a = 0; a < gr.dim; ++a)
        if (gr.topo[a] == Topo::clamped && rmax > gr.shape[a] * gr.dx / 4.0)
            throw error("inf_convolution: radius exceeds the domain margin");

    LevelSetField out = field;
    int mk = gr.dim == 3 ? gr.shape[2] : 1;
    for (int k = 0; k < mk; ++k)
        for (int j = 0; j < gr.shape[1]; ++j)
            for (int i = 0; i < gr.shape[0]; ++i) {
                long long id = gr.index(i, j, k);
                double r = radius[id];
                double best = field.v[id];
                int ri = static_cast<int>(std::floor(r / gr.dx + 1e-12));
                int kr = gr.dim == 3 ? ri : 0;
                for (int dk = -kr; dk <= kr; ++dk)
                    for (int dj = -ri; dj <= ri; ++dj)
                        for (int di = -ri; di <= ri; ++di) {
                            double d2 = (static_cast<double>(di) * di +
                                         static_cast<double>(dj) * dj +
                                         static_cast<double>(dk) * dk) * gr.dx * gr.dx;
                            if (d2 > r * r + 1e-12) continue;
                            best = std::min(best, field.sample(i + di, j + dj, k + dk));
                        }
                out.v[id] = best;
            }
    return out;
}

LevelSetField inf_convolution(const LevelSetField& field, double radius) {
    return inf_convolution(field, std::vector<double>(field.v.size(), radius));
}

ExteriorBallReport check_exterior_ball(const LevelSetField& field, double mu,
                                       double radius) {
    const Grid& gr = field.grid;
    ExteriorBallReport rep;
    if (radius < gr.dx) {
        rep.detail = "radius below one cell: vacuous pass";
        return rep;
    }
    auto inside = [&](int i, int j, int k) { return field.sample(i, j, k) <= mu; };
    auto offsets = ball_offsets(radius, gr.dx, gr.dim);
    int mk = gr.dim == 3 ? gr.shape[2] : 1;
    int margin = static_cast<int>(std::ceil(2.0 * radius / gr.dx)) + 1;
    for (int k = 0; k < mk; ++k)
        for (int j = 0; j < gr.shape[1]; ++j)
            for (int i = 0; i < gr.shape[0]; ++i) {
                if (!inside(i, j, k)) continue;
                // boundary node: inside with an outside axis neighbor
                bool bnd = false;
                for (int a = 0; a < gr.dim && !bnd; ++a)
                    for (int sgn : {-1, 1}) {
                        int ii = i + sgn * (a == 0), jj = j + sgn * (a == 1),
                            kk = k + sgn * (a == 2);
                        if (!inside(ii, jj, kk)) { bnd = true; break; }
                    }
                if (!bnd) continue;
                // skip nodes whose ball test would poke outside a clamped box
                bool clipped = false;
                int idx[3] = {i, j, k};
                for (int a = 0; a < gr.dim; ++a)
                    if (gr.topo[a] == Topo::clamped &&
                        (idx[a] < margin || idx[a] >= gr.shape[a] - margin))
                        clipped = true;
                if (clipped) continue;
                ++rep.boundary_nodes;
                // look for a center y at distance ~radius whose closed ball
                // stays inside the sublevel set
                bool found = false;
                int ri = static_cast<int>(std::llround(radius / gr.dx));
                int kr = gr.dim == 3 ? ri : 0;
                for (int ck = -kr; ck <= kr && !found; ++ck)
                    for (int cj = -ri; cj <= ri && !found; ++cj)
                        for (int ci = -ri; ci <= ri && !found; ++ci) {
                            double d = std::sqrt(static_cast<double>(ci) * ci +
                                                 static_cast<double>(cj) * cj +
                                                 static_cast<double>(ck) * ck) * gr.dx;
                            if (std::abs(d - radius) > gr.dx) continue;
                            bool ok = true;
                            for (const auto& o : offsets) {
                                if (!inside(i + ci + o[0], j + cj + o[1], k + ck + o[2])) {
                                    ok = false;
                                    break;
                                }
                            }
                            if (ok) found = true;
                        }
                if (!found) ++rep.failures;
            }
    return rep;
}

EvolutionInequalityReport check_evolution_inequality(const InfConvParams& p,
                                                     const std::vector<Vec>& points,
                                                     const std::vector<double>& times) {
    EvolutionInequalityReport rep;
    for (double t : times) {
        double r = p.r(t), rd = p.rdot(t);
        for (const Vec& x : points) {
            double phi = p.phi(x);
            double dphi = p.phi_grad_norm(x);
            if (phi <= 0) continue;
            ++rep.samples;
            if (r * dphi >= 1.0) {
                rep.feasible_everywhere = false;
                continue;
            }
            double lhs = rd +
                         ((p.n + 1) * p.phi_hess_bound / phi + p.M0 * dphi / phi + p.L0) * r +
                         dphi * dphi * r / ((1.0 - r * dphi) * (1.0 - r * dphi) * phi * phi);
            rep.max_lhs = std::max(rep.max_lhs, lhs);
            if (lhs > 1e-12) ++rep.violations;
        }
    }
    if (!rep.feasible_everywhere)
        rep.detail = "r |D phi| < 1 failed at some samples";
    return rep;
}

InfConvParams make_lcp_pair(int n, double m0, double M0, double L0, double C,
                            double R, const Vec& nu) {
    if (C <= 1) throw error("make_lcp_pair: need C > 1");
    InfConvParams p;
    p.n = n;
    p.m0 = m0;
    p.M0 = M0;
    p.L0 = L0;
    p.phi_grad_bound = 6.0 / R;
    p.phi_hess_bound = 18.0 / (R * R);
    double a = 9.0 * (1.0 + C) / (2.0 * C * R * R);
    double b = 0.5 * (3.0 - 1.0 / C);
    Vec nunit = normalized(nu, n);
    p.phi = [a, b, nunit, n](const Vec& x) {
        Vec xp = perp(x, nunit, n);
        double d2 = dot(xp, xp, n);
        return -a * d2 + b;
    };
    p.phi_grad_norm = [a, nunit, n](const Vec& x) {
        Vec xp = perp(x, nunit, n);
        return 2.0 * a * norm(xp, n);
    };
    p.r = [L0](double t) { return 0.5 * std::exp(-2.0 * L0 * t); };
    p.rdot = [L0](double t) { return -L0 * std::exp(-2.0 * L0 * t); };
    return p;
}

double finite_speed_dt_bound(double C, double delta, int n, double M0) {
    if (C <= 1) throw error("finite_speed_dt_bound: need C > 1");
    if (delta <= 0) throw error("finite_speed_dt_bound: need delta > 0");
    return (C - 1) * delta * delta /
           ((n - 1) * C * C + C * (C - 1) * M0 * delta);
}

}  // namespace mcfh
