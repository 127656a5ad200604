#include "mcfh/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mcfh {

void SchemeParams::validate(double dx) const {
    if (cfl_factor <= 0 || cfl_factor > 1) throw error("scheme: cfl_factor must be in (0, 1]");
    if (grad_reg <= 0 || grad_reg > dx) throw error("scheme: grad_reg must be in (0, dx]");
    if (max_steps < 1) throw error("scheme: max_steps must be positive");
}

double cfl_dt(const Grid& grid, double eps, double M0, double cfl_factor) {
    double n = grid.dim;
    double dt_adv = grid.dx / (n * M0);
    double dt_diff = grid.dx * grid.dx / (2.0 * n * eps);
    return cfl_factor * std::min(dt_adv, dt_diff);
}

namespace {

// Precomputed forcing values g(x/eps) at every node of the current window.
std::vector<double> forcing_cache(const LevelSetField& state, const ForcingField& g) {
    const Grid& gr = state.grid;
    std::vector<double> c(gr.ncells());
    int mk = gr.dim == 3 ? gr.shape[2] : 1;
    for (int k = 0; k < mk; ++k)
        for (int j = 0; j < gr.shape[1]; ++j)
            for (int i = 0; i < gr.shape[0]; ++i) {
                Vec x = gr.point(i, j, k);
                c[gr.index(i, j, k)] = g(scaled(x, 1.0 / state.eps, gr.dim));
            }
    return c;
}

// Stencil sampling with linear extrapolation past clamped boundaries. The
// constant extension of LevelSetField::sample leaves a gradient kink at the
// caps; for tilted planar profiles the curvature response to that kink
// diffuses inward and destabilizes the run, while linear extrapolation keeps
// planar data an exact discrete solution. Recursion resolves box corners.
double sample_extrap(const LevelSetField& f, int i, int j, int k) {
    const Grid& gr = f.grid;
    int idx[3] = {i, j, k};
    for (int a = 0; a < gr.dim; ++a) {
        int m = gr.shape[a];
        if (gr.topo[a] != Topo::clamped || (idx[a] >= 0 && idx[a] < m)) continue;
        int in0 = idx[a] < 0 ? 0 : m - 1;
        int in1 = idx[a] < 0 ? 1 : m - 2;
        int d = idx[a] < 0 ? -idx[a] : idx[a] - (m - 1);
        int p0[3] = {idx[0], idx[1], idx[2]};
        int p1[3] = {idx[0], idx[1], idx[2]};
        p0[a] = in0;
        p1[a] = in1;
        double v0 = sample_extrap(f, p0[0], p0[1], p0[2]);
        double v1 = sample_extrap(f, p1[0], p1[1], p1[2]);
        return v0 + d * (v0 - v1);
    }
    return f.sample(idx[0], idx[1], idx[2]);  // periodic wrap + value shift
}

}  // namespace

LevelSetField step_cached(const LevelSetField& state, const std::vector<double>& gval,
                          double M0, const SchemeParams& params,
                          const std::vector<std::uint8_t>* mask) {
    const Grid& gr = state.grid;
    const double dx = gr.dx, eps = state.eps;
    const double dt = cfl_dt(gr, eps, M0, params.cfl_factor);
    const double reg2 = params.grad_reg * params.grad_reg;
    const double inv_dx = 1.0 / dx, inv_dx2 = inv_dx * inv_dx;

    LevelSetField next = state;
    next.time = state.time + dt;

    const int mi = gr.shape[0], mj = gr.shape[1], mk = gr.dim == 3 ? gr.shape[2] : 1;
    const int dim = gr.dim;
    const auto& u = state;

    auto kernel = [&](long long kj0, long long kj1) {
        for (long long kj = kj0; kj < kj1; ++kj) {
            int k = dim == 3 ? static_cast<int>(kj / mj) : 0;
            int j = dim == 3 ? static_cast<int>(kj % mj) : static_cast<int>(kj);
            for (int i = 0; i < mi; ++i) {
                long long id = gr.index(i, j, k);
                if (mask && !(*mask)[id]) continue;
                double uc = u.v[id];
                // interior cells read neighbors directly; boundary-adjacent
                // cells go through the topology-aware sampler
                const bool interior = i >= 1 && i < mi - 1 && j >= 1 && j < mj - 1 &&
                                      (dim < 3 || (k >= 1 && k < mk - 1));
                const long long sj = mi, sk = static_cast<long long>(mi) * mj;
                auto S = [&](int di, int dj, int dk) -> double {
                    if (interior) return u.v[id + di + dj * sj + dk * sk];
                    return sample_extrap(u, i + di, j + dj, k + dk);
                };
                double up[3], um[3];
                up[0] = S(1, 0, 0); um[0] = S(-1, 0, 0);
                up[1] = S(0, 1, 0); um[1] = S(0, -1, 0);
                if (dim == 3) { up[2] = S(0, 0, 1); um[2] = S(0, 0, -1); }

                double dc[3] = {0, 0, 0}, d2[3] = {0, 0, 0};
                double grad2_up = 0;
                for (int a = 0; a < dim; ++a) {
                    double dm = (uc - um[a]) * inv_dx;
                    double dp = (up[a] - uc) * inv_dx;
                    dc[a] = 0.5 * (dm + dp);
                    d2[a] = (up[a] - 2.0 * uc + um[a]) * inv_dx2;
                    // monotone upwind for u_t = +g|Du|: downwind-positive parts vanish
                    double a1 = std::min(dm, 0.0), a2 = std::max(dp, 0.0);
                    grad2_up += a1 * a1 + a2 * a2;
                }
                double curv = 0.0;
                if (eps > 0) {
                    double g2 = dc[0] * dc[0] + dc[1] * dc[1] + dc[2] * dc[2];
                    double denom = g2 + reg2;
                    // tr{D^2 u (I - p p)} with p = Dc / sqrt(|Dc|^2 + reg^2)
                    double lap = d2[0] + d2[1] + (dim == 3 ? d2[2] : 0.0);
                    double cross = 0.0;
                    double pxpy = dc[0] * dc[1];
                    double uxy = (S(1, 1, 0) + S(-1, -1, 0) - S(1, -1, 0) - S(-1, 1, 0)) *
                                 (0.25 * inv_dx2);
                    cross += pxpy * uxy;
                    double quad = dc[0] * dc[0] * d2[0] + dc[1] * dc[1] * d2[1];
                    if (dim == 3) {
                        quad += dc[2] * dc[2] * d2[2];
                        double uxz = (S(1, 0, 1) + S(-1, 0, -1) - S(1, 0, -1) - S(-1, 0, 1)) *
                                     (0.25 * inv_dx2);
                        double uyz = (S(0, 1, 1) + S(0, -1, -1) - S(0, 1, -1) - S(0, -1, 1)) *
                                     (0.25 * inv_dx2);
                        cross += dc[0] * dc[2] * uxz + dc[1] * dc[2] * uyz;
                    }
                    curv = lap - (quad + 2.0 * cross) / denom;
                }
                double rhs = eps * curv + gval[id] * std::sqrt(grad2_up);
                double unew = uc + dt * rhs;
                if (!std::isfinite(unew)) {
                    std::ostringstream os;
                    os << "numeric blowup at cell (" << i << "," << j << "," << k
                       << "), t = " << state.time;
                    throw error(os.str());
                }
                next.v[id] = unew;
            }
        }
    };
    parallel_for(static_cast<long long>(mj) * mk, params.workers, kernel);
    return next;
}

LevelSetField step(const LevelSetField& state, const ForcingField& g,
                   const SchemeParams& params, const std::vector<std::uint8_t>* mask) {
    state.grid.validate();
    params.validate(state.grid.dx);
    auto gval = forcing_cache(state, g);
    return step_cached(state, gval, g.M0, params, mask);
}

namespace {

// Largest row (along the propagation axis) whose mean value still exceeds the
// level; the per-row mean is decreasing for planar-type data.
int front_row(const LevelSetField& f, double level) {
    const Grid& gr = f.grid;
    int last = gr.dim - 1;
    int rows = gr.shape[last];
    std::vector<double> sum(rows, 0.0);
    std::vector<long long> cnt(rows, 0);
    int mk = gr.dim == 3 ? gr.shape[2] : 1;
    for (int k = 0; k < mk; ++k)
        for (int j = 0; j < gr.shape[1]; ++j)
            for (int i = 0; i < gr.shape[0]; ++i) {
                int idx[3] = {i, j, k};
                sum[idx[last]] += f.at(i, j, k);
                ++cnt[idx[last]];
            }
    int best = 0;
    for (int r = 0; r < rows; ++r)
        if (cnt[r] && sum[r] / cnt[r] >= level) best = r;
    return best;
}

void shift_window(LevelSetField& f, int cells) {
    Grid& gr = f.grid;
    int last = gr.dim - 1;
    int rows = gr.shape[last];
    if (cells <= 0 || cells >= rows) return;
    int mk = gr.dim == 3 ? gr.shape[2] : 1;
    auto src = f.v;
    for (int k = 0; k < mk; ++k)
        for (int j = 0; j < gr.shape[1]; ++j)
            for (int i = 0; i < gr.shape[0]; ++i) {
                int idx[3] = {i, j, k};
                int r = idx[last];
                int rs = r + cells;
                int sidx[3] = {i, j, k};
                double val;
                if (rs <= rows - 1) {
                    sidx[last] = rs;
                    val = src[gr.index(sidx[0], sidx[1], sidx[2])];
                } else {
                    // exposed cap rows: linear extrapolation of the profile
                    sidx[last] = rows - 1;
                    double v0 = src[gr.index(sidx[0], sidx[1], sidx[2])];
                    sidx[last] = rows - 2;
                    double v1 = src[gr.index(sidx[0], sidx[1], sidx[2])];
                    val = v0 + (rs - (rows - 1)) * (v0 - v1);
                }
                f.v[gr.index(idx[0], idx[1], idx[2])] = val;
            }
    gr.window_offset[last] += cells * gr.dx;
}

}  // namespace

LevelSetField solve(LevelSetField state, const ForcingField& g,
                    const SchemeParams& params, double T,
                    const SolveCallbacks& callbacks, bool moving_window,
                    double front_level) {
    state.grid.validate();
    params.validate(state.grid.dx);
    if (T < state.time) throw error("solve: T must be >= current time");

    int last = state.grid.dim - 1;
    // the window shifts by whole forcing periods so the phase of g(x/eps) is
    // exactly preserved; requires dx to divide eps
    int quantum = std::max(1, static_cast<int>(std::llround(state.eps / state.grid.dx)));
    if (moving_window && std::abs(quantum * state.grid.dx - state.eps) > 1e-12)
        throw error("solve: moving window requires dx to divide eps");

    auto gval = forcing_cache(state, g);
    double dt = cfl_dt(state.grid, state.eps, g.M0, params.cfl_factor);
    long long check_every = std::max<long long>(
        1, static_cast<long long>(0.25 * quantum * state.grid.dx / (g.M0 * dt)));

    size_t next_out = 0;
    auto emit_due = [&] {
        if (!callbacks.on_output) return;
        while (next_out < callbacks.output_times.size() &&
               state.time >= callbacks.output_times[next_out] - 1e-12) {
            callbacks.on_output(state);
            ++next_out;
        }
    };
    emit_due();

    long long steps = 0;
    while (state.time < T - 1e-12) {
        if (++steps > params.max_steps) throw error("solve: max_steps exceeded");
        state = step_cached(state, gval, g.M0, params, nullptr);
        if (moving_window && steps % check_every == 0) {
            int row = front_row(state, front_level);
            int center = state.grid.shape[last] / 2;
            if (row > center + quantum / 2) {
                shift_window(state, quantum);
                gval = forcing_cache(state, g);
            }
        }
        emit_due();
    }
    return state;
}

FrontSet extract_front(const LevelSetField& state, double level, const Vec& nu,
                       const Vec& x0, double r) {
    const Grid& gr = state.grid;
    FrontSet fs;
    fs.head = -1e300;
    fs.tail = 1e300;
    int mk = gr.dim == 3 ? gr.shape[2] : 1;
    auto consider = [&](const Vec& p) {
        if (r > 0) {
            Vec d{p[0] - x0[0], p[1] - x0[1], p[2] - x0[2]};
            if (norm(perp(d, nu, gr.dim), gr.dim) > r) return;
        }
        fs.points.push_back(p);
        double h = dot(p, nu, gr.dim);
        fs.head = std::max(fs.head, h);
        fs.tail = std::min(fs.tail, h);
    };
    for (int k = 0; k < mk; ++k)
        for (int j = 0; j < gr.shape[1]; ++j)
            for (int i = 0; i < gr.shape[0]; ++i) {
                double u0 = state.at(i, j, k) - level;
                for (int a = 0; a < gr.dim; ++a) {
                    int ii = i + (a == 0), jj = j + (a == 1), kk = k + (a == 2);
                    if (ii >= gr.shape[0] || jj >= gr.shape[1] ||
                        (gr.dim == 3 && kk >= gr.shape[2]))
                        continue;
                    double u1 = state.at(ii, jj, kk) - level;
                    if (u0 == u1 || u0 * u1 > 0) continue;
                    double th = u0 / (u0 - u1);
                    Vec pa = gr.point(i, j, k), pb = gr.point(ii, jj, kk);
                    Vec p{pa[0] + th * (pb[0] - pa[0]), pa[1] + th * (pb[1] - pa[1]),
                          pa[2] + th * (pb[2] - pa[2])};
                    consider(p);
                }
            }
    fs.empty = fs.points.empty();
    if (fs.empty) fs.head = fs.tail = 0.0;
    return fs;
}

double SpeedTable::operator()(double angle) const {
    double a = angle - 2.0 * M_PI * std::floor(angle / (2.0 * M_PI));
    size_t n = theta.size();
    if (n == 1) return s[0];
    for (size_t i = 0; i < n; ++i) {
        double t0 = theta[i];
        double t1 = i + 1 < n ? theta[i + 1] : theta[0] + 2.0 * M_PI;
        if (a >= t0 - 1e-15 && a <= t1 + 1e-15) {
            double w = t1 == t0 ? 0.0 : (a - t0) / (t1 - t0);
            double s1 = i + 1 < n ? s[i + 1] : s[0];
            return s[i] + w * (s1 - s[i]);
        }
    }
    // angle below the first knot: interpolate across the wrap
    double t0 = theta[n - 1] - 2.0 * M_PI, t1 = theta[0];
    double w = (a - t0) / (t1 - t0);
    return s[n - 1] + w * (s[0] - s[n - 1]);
}

double SpeedTable::max_speed() const {
    double m = 0;
    for (double v : s) m = std::max(m, v);
    return m;
}

void SpeedTable::validate() const {
    if (theta.size() != s.size() || theta.empty()) throw error("speed table: size mismatch");
    for (double v : s)
        if (v <= 0) throw error("speed table: nonpositive tabulated speed");
    for (size_t i = 1; i < theta.size(); ++i)
        if (theta[i] <= theta[i - 1]) throw error("speed table: angles must be increasing");
}

LevelSetField solve_homogenized(const SpeedTable& speed, LevelSetField state,
                                const SchemeParams& params, double T) {
    speed.validate();
    state.grid.validate();
    if (state.grid.dim != 2) throw error("solve_homogenized: 2D only");
    const Grid& gr = state.grid;
    const double dx = gr.dx, inv_dx = 1.0 / dx;
    double smax = speed.max_speed();
    double dt = params.cfl_factor * dx / (2.0 * smax);
    const int mi = gr.shape[0], mj = gr.shape[1];

    long long steps = 0;
    while (state.time < T - 1e-12) {
        if (++steps > params.max_steps) throw error("solve_homogenized: max_steps exceeded");
        LevelSetField next = state;
        next.time = state.time + dt;
        auto kernel = [&](long long j0, long long j1) {
            for (long long jj = j0; jj < j1; ++jj) {
                int j = static_cast<int>(jj);
                for (int i = 0; i < mi; ++i) {
                    double uc = state.at(i, j);
                    double ue = state.sample(i + 1, j), uw = state.sample(i - 1, j);
                    double un = state.sample(i, j + 1), us = state.sample(i, j - 1);
                    double dmx = (uc - uw) * inv_dx, dpx = (ue - uc) * inv_dx;
                    double dmy = (uc - us) * inv_dx, dpy = (un - uc) * inv_dx;
                    double ax = std::min(dmx, 0.0), bx = std::max(dpx, 0.0);
                    double ay = std::min(dmy, 0.0), by = std::max(dpy, 0.0);
                    double grad2 = ax * ax + bx * bx + ay * ay + by * by;
                    double gx = 0.5 * (dmx + dpx), gy = 0.5 * (dmy + dpy);
                    // propagation direction is -Du normalized
                    double sv = speed(std::atan2(-gy, -gx));
                    next.at(i, j) = uc + dt * sv * std::sqrt(grad2);
                }
            }
        };
        parallel_for(mj, params.workers, kernel);
        state = std::move(next);
    }
    return state;
}

}  // namespace mcfh
