#include "mcfh/forcing.hpp"

#include <cmath>
#include <sstream>

namespace mcfh {

ForcingField make_constant_forcing(int dim, double c) {
    if (c <= 0) throw error("constant forcing must be positive");
    ForcingField f;
    f.dim = dim;
    f.kind = ForcingKind::closed_form;
    f.m0 = f.M0 = c;
    f.L0 = 0.0;
    f.evaluator = [c](const Vec&) { return c; };
    return f;
}

ForcingField make_sinusoidal_forcing(int dim, double base, double amp) {
    if (base - std::abs(amp) <= 0) throw error("sinusoidal forcing not positive");
    ForcingField f;
    f.dim = dim;
    f.kind = ForcingKind::closed_form;
    f.m0 = base - std::abs(amp);
    f.M0 = base + std::abs(amp);
    // |D(prod sin)| <= 2 pi sqrt(dim) componentwise bound
    f.L0 = std::abs(amp) * 2.0 * M_PI * std::sqrt(static_cast<double>(dim));
    f.evaluator = [dim, base, amp](const Vec& x) {
        double p = 1.0;
        for (int i = 0; i < dim; ++i) p *= std::sin(2.0 * M_PI * x[i]);
        return base + amp * p;
    };
    return f;
}

ForcingField make_grid_sampled_forcing(int dim, const std::vector<double>& samples,
                                       const std::vector<int>& shape) {
    if (static_cast<int>(shape.size()) != dim) throw error("grid forcing: shape/dim mismatch");
    long long n = 1;
    for (int s : shape) {
        if (s < 2) throw error("grid forcing: need >= 2 samples per axis");
        n *= s;
    }
    if (static_cast<long long>(samples.size()) != n)
        throw error("grid forcing: sample count does not match shape");
    double lo = samples[0], hi = samples[0];
    for (double v : samples) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo <= 0) throw error("grid forcing: nonpositive sample");

    auto sample_at = [samples, shape, dim](int i, int j, int k) {
        int m0s = shape[0];
        int m1s = dim >= 2 ? shape[1] : 1;
        i = ((i % m0s) + m0s) % m0s;
        if (dim >= 2) j = ((j % m1s) + m1s) % m1s;
        if (dim >= 3) {
            int m2s = shape[2];
            k = ((k % m2s) + m2s) % m2s;
            return samples[(static_cast<long long>(k) * m1s + j) * m0s + i];
        }
        if (dim == 2) return samples[static_cast<long long>(j) * m0s + i];
        return samples[i];
    };

    // Lipschitz constant of the multilinear interpolant: sum over axes of the
    // largest adjacent difference quotient.
    double L = 0;
    for (int axis = 0; axis < dim; ++axis) {
        double worst = 0;
        int m0s = shape[0], m1s = dim >= 2 ? shape[1] : 1, m2s = dim >= 3 ? shape[2] : 1;
        for (int k = 0; k < m2s; ++k)
            for (int j = 0; j < m1s; ++j)
                for (int i = 0; i < m0s; ++i) {
                    int di = axis == 0, dj = axis == 1, dk = axis == 2;
                    double d = std::abs(sample_at(i + di, j + dj, k + dk) - sample_at(i, j, k));
                    worst = std::max(worst, d * shape[axis]);
                }
        L += worst;
    }

    ForcingField f;
    f.dim = dim;
    f.kind = ForcingKind::grid_sampled;
    f.m0 = lo;
    f.M0 = hi;
    f.L0 = L;
    f.evaluator = [sample_at, shape, dim](const Vec& x) {
        double fxs[3] = {0, 0, 0};
        int base[3] = {0, 0, 0};
        for (int a = 0; a < dim; ++a) {
            double u = frac(x[a]) * shape[a];
            base[a] = static_cast<int>(std::floor(u));
            fxs[a] = u - base[a];
        }
        double acc = 0;
        int corners = 1 << dim;
        for (int c = 0; c < corners; ++c) {
            double w = 1.0;
            int off[3] = {0, 0, 0};
            for (int a = 0; a < dim; ++a) {
                int bit = (c >> a) & 1;
                off[a] = bit;
                w *= bit ? fxs[a] : 1.0 - fxs[a];
            }
            if (w == 0) continue;
            acc += w * sample_at(base[0] + off[0], base[1] + off[1], base[2] + off[2]);
        }
        return acc;
    };
    return f;
}

HypothesisReport validate_hypothesis(const ForcingField& field, int samples, double tol) {
    if (samples < 2) throw error("validate_hypothesis: need >= 2 samples per axis");
    HypothesisReport rep;
    rep.m0_est = 1e300;
    rep.M0_est = -1e300;
    rep.L0_est = 0;
    double h = 1.0 / samples;
    int mj = field.dim >= 2 ? samples : 1;
    int mk = field.dim >= 3 ? samples : 1;
    for (int k = 0; k < mk; ++k)
        for (int j = 0; j < mj; ++j)
            for (int i = 0; i < samples; ++i) {
                Vec x{i * h, j * h, k * h};
                double v = field(x);
                if (v <= 0) {
                    std::ostringstream os;
                    os << "hypothesis violation: g(" << x[0] << "," << x[1] << "," << x[2]
                       << ") = " << v << " <= 0";
                    throw error(os.str());
                }
                rep.m0_est = std::min(rep.m0_est, v);
                rep.M0_est = std::max(rep.M0_est, v);
                for (int a = 0; a < field.dim; ++a) {
                    Vec y = x;
                    y[a] += h;
                    rep.L0_est = std::max(rep.L0_est, std::abs(field(y) - v) / h);
                }
            }
    rep.ok = rep.m0_est >= field.m0 - tol && rep.M0_est <= field.M0 + tol &&
             rep.L0_est <= field.L0 * (1.0 + 1e-6) + tol;
    if (!rep.ok) {
        std::ostringstream os;
        os << "estimates outside declared bounds: m0_est=" << rep.m0_est
           << " M0_est=" << rep.M0_est << " L0_est=" << rep.L0_est;
        rep.detail = os.str();
    }
    return rep;
}

CorollaryParams reference_corollary_params() { return CorollaryParams{}; }

static double torus_dist(const Vec& a, const Vec& b, int dim) {
    double s = 0;
    for (int i = 0; i < dim; ++i) {
        double d = std::abs(frac(a[i] - b[i]));
        d = std::min(d, 1.0 - d);
        s += d * d;
    }
    return std::sqrt(s);
}

void validate_corollary_params(const CorollaryParams& p) {
    std::ostringstream os;
    if (p.n < 3) throw error("corollary params: require n >= 3");
    if (!(0 < p.r1 && p.r1 < p.r2 && p.r2 < p.R && p.R < 0.5)) {
        os << "corollary params: require 0 < r1 < r2 < R < 1/2, got r1=" << p.r1
           << " r2=" << p.r2 << " R=" << p.R;
        throw error(os.str());
    }
    int td = p.n - 1;
    double centers = torus_dist(p.y1, p.y2, td);
    if (centers + p.r1 > p.r2 + 1e-12) {
        os << "corollary params: B(y1,r1) must sit inside B(y2,r2): |y1-y2| + r1 = "
           << centers + p.r1 << " > r2 = " << p.r2;
        throw error(os.str());
    }
    double head_slack = p.g_high - (std::sqrt(2.0) * p.n / p.r1 + 2.0 / (p.R - p.r2));
    if (!(p.sigma > 0 && p.sigma < head_slack)) {
        os << "corollary params: violates 0 < sigma < g_high - (sqrt(2) n / r1 + 2/(R - r2)) = "
           << head_slack << ", got sigma = " << p.sigma;
        throw error(os.str());
    }
    double cap = std::min(p.sigma, static_cast<double>(p.n - 2));
    if (!(p.g_low > 0 && p.g_low < cap)) {
        os << "corollary params: violates max_{E2} g < min{sigma, n-2} = " << cap
           << ", got g_low = " << p.g_low;
        throw error(os.str());
    }
    double head_speed = p.g_high - std::sqrt(2.0) * p.n / p.r1;
    if (head_speed <= 0) {
        os << "corollary params: require g_high > sqrt(2) n / r1 = "
           << std::sqrt(2.0) * p.n / p.r1;
        throw error(os.str());
    }
}

CorollaryForcing make_corollary_forcing(const CorollaryParams& p) {
    validate_corollary_params(p);
    CorollaryForcing cf;
    cf.params = p;
    cf.s_head_lb = p.g_high - std::sqrt(2.0) * p.n / p.r1;
    cf.s_tail_ub = 2.0 / (p.R - p.r2) + p.sigma;

    int td = p.n - 1;
    double centers = torus_dist(p.y1, p.y2, td);
    // Points outside B(y2, r2) have |y - y1| >= r2 - |y1 - y2|, so starting the
    // low plateau at that radius around y1 keeps g <= g_low on all of E2.
    double r2eff = p.r2 - centers;
    double w = r2eff - p.r1;  // transition width, > 0 by validation
    Vec y1 = p.y1;
    double r1 = p.r1, g_hi = p.g_high, g_lo = p.g_low;

    ForcingField f;
    f.dim = td;
    f.kind = ForcingKind::laminar;
    f.m0 = g_lo;
    f.M0 = g_hi;
    f.L0 = (g_hi - g_lo) * (15.0 / 8.0) / w;
    f.evaluator = [y1, r1, w, g_hi, g_lo, td](const Vec& y) {
        double r = torus_dist(y, y1, td);
        double t = (r - r1) / w;
        return g_lo + (g_hi - g_lo) * (1.0 - smoothstep5(t));
    };
    cf.gprime = f;
    return cf;
}

ForcingField make_laminar(const ForcingField& gprime) {
    ForcingField f = gprime;
    f.dim = gprime.dim + 1;
    if (f.dim > 3) throw error("make_laminar: dimension > 3 unsupported");
    f.kind = ForcingKind::laminar;
    f.evaluator = gprime.evaluator;  // already ignores trailing components
    return f;
}

}  // namespace mcfh
