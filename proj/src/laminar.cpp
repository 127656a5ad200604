#include "mcfh/laminar.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mcfh {

GraphState make_graph_state(int torus_dim, int m,
                            const std::function<double(const Vec&)>& U0) {
    if (torus_dim != 1 && torus_dim != 2) throw error("graph: torus_dim must be 1 or 2");
    if (m < 4) throw error("graph: need m >= 4");
    GraphState st;
    st.torus_dim = torus_dim;
    st.m = m;
    st.U.resize(st.nnodes());
    int mj = torus_dim == 2 ? m : 1;
    for (int j = 0; j < mj; ++j)
        for (int i = 0; i < m; ++i) st.U[st.idx(i, j)] = U0(st.point(i, j));
    return st;
}

namespace {

inline int wrap(int i, int m) { return i >= 0 ? i % m : m - 1 - ((-i - 1) % m); }

double graph_dt(const GraphState& st, const ForcingField& g, const SchemeParams& params) {
    double h = st.dx();
    double d = st.torus_dim;
    return params.cfl_factor * std::min(h * h / (2.0 * d), h / (2.0 * g.M0));
}

// RHS of U_t = Delta U - (DU . D^2U DU)/(1+|DU|^2) + g(y) sqrt(1+|DU|^2).
// Curvature terms by central differences; the forcing gradient uses the
// monotone upwind form (as in the level-set kernel), since the centered
// gradient is non-monotone and blows up at the steep collars the corollary
// fields produce.
void graph_rhs(const GraphState& st, const std::vector<double>& gval,
               std::vector<double>& out, const SchemeParams& params) {
    int m = st.m;
    double h = st.dx(), h2 = h * h;
    int mj = st.torus_dim == 2 ? m : 1;
    auto body = [&](long long b, long long e) {
        for (long long row = b; row < e; ++row) {
            int j = static_cast<int>(row);
            int jm = st.torus_dim == 2 ? wrap(j - 1, m) : 0;
            int jp = st.torus_dim == 2 ? wrap(j + 1, m) : 0;
            for (int i = 0; i < m; ++i) {
                int im = wrap(i - 1, m), ip = wrap(i + 1, m);
                double u = st.U[st.idx(i, j)];
                double uxm = st.U[st.idx(im, j)], uxp = st.U[st.idx(ip, j)];
                double ux = (uxp - uxm) / (2 * h);
                double uxx = (uxp - 2 * u + uxm) / h2;
                double uy = 0, uyy = 0, uxy = 0;
                if (st.torus_dim == 2) {
                    double uym = st.U[st.idx(i, jm)], uyp = st.U[st.idx(i, jp)];
                    uy = (uyp - uym) / (2 * h);
                    uyy = (uyp - 2 * u + uym) / h2;
                    uxy = (st.U[st.idx(ip, jp)] - st.U[st.idx(im, jp)] -
                           st.U[st.idx(ip, jm)] + st.U[st.idx(im, jm)]) /
                          (4 * h2);
                }
                double w2 = 1.0 + ux * ux + uy * uy;
                double lap = uxx + uyy;
                double sec = (ux * ux * uxx + 2 * ux * uy * uxy + uy * uy * uyy) / w2;
                double dmx = (u - uxm) / h, dpx = (uxp - u) / h;
                double ax1 = std::min(dmx, 0.0), ax2 = std::max(dpx, 0.0);
                double grad2_up = ax1 * ax1 + ax2 * ax2;
                if (st.torus_dim == 2) {
                    double dmy = (u - st.U[st.idx(i, jm)]) / h;
                    double dpy = (st.U[st.idx(i, jp)] - u) / h;
                    double ay1 = std::min(dmy, 0.0), ay2 = std::max(dpy, 0.0);
                    grad2_up += ay1 * ay1 + ay2 * ay2;
                }
                double rhs = lap - sec + gval[st.idx(i, j)] * std::sqrt(1.0 + grad2_up);
                if (!std::isfinite(rhs)) {
                    std::ostringstream os;
                    os << "graph step produced non-finite value at node (" << i << ", "
                       << j << ")";
                    throw error(os.str());
                }
                out[st.idx(i, j)] = rhs;
            }
        }
    };
    parallel_for(mj, params.workers, body);
}

std::vector<double> graph_forcing_cache(const GraphState& st, const ForcingField& g) {
    std::vector<double> gv(st.nnodes());
    int mj = st.torus_dim == 2 ? st.m : 1;
    for (int j = 0; j < mj; ++j)
        for (int i = 0; i < st.m; ++i) gv[st.idx(i, j)] = g(st.point(i, j));
    return gv;
}

}  // namespace

std::vector<double> graph_operator(const GraphState& state, const ForcingField& gprime) {
    std::vector<double> out(state.nnodes());
    SchemeParams p;
    graph_rhs(state, graph_forcing_cache(state, gprime), out, p);
    return out;
}

GraphState graph_step(const GraphState& state, const ForcingField& gprime,
                      const SchemeParams& params,
                      const std::vector<std::uint8_t>* mask) {
    GraphState next = state;
    std::vector<double> rhs(state.nnodes());
    auto gval = graph_forcing_cache(state, gprime);
    graph_rhs(state, gval, rhs, params);
    double dt = graph_dt(state, gprime, params);
    for (long long id = 0; id < state.nnodes(); ++id) {
        if (mask && !(*mask)[id]) continue;
        next.U[id] = state.U[id] + dt * rhs[id];
    }
    next.time = state.time + dt;
    return next;
}

namespace {

struct GraphEngine {
    GraphState st;
    std::vector<double> gval, rhs;
    double dt = 0;
    SchemeParams params;

    GraphEngine(const ForcingField& g, const SchemeParams& p, int m) : params(p) {
        int td = g.dim;  // the forcing lives on the torus itself
        st = make_graph_state(td, m, [](const Vec&) { return 0.0; });
        gval = graph_forcing_cache(st, g);
        rhs.resize(st.nnodes());
        dt = graph_dt(st, g, p);
    }
    void step() {
        graph_rhs(st, gval, rhs, params);
        for (long long id = 0; id < st.nnodes(); ++id) st.U[id] += dt * rhs[id];
        st.time += dt;
    }
    void project(double s, double t, GraphObstacleKind kind) {
        double o = s * t;
        if (kind == GraphObstacleKind::sub)
            for (double& u : st.U) u = std::min(u, o);
        else
            for (double& u : st.U) u = std::max(u, o);
    }
};

}  // namespace

GraphRunResult evolve_graph_obstacle(double s, const ForcingField& gprime,
                                     const SchemeParams& params, double T,
                                     GraphObstacleKind kind, int m, int n_report) {
    GraphEngine eng(gprime, params, m);
    GraphRunResult res;
    int nrep = std::max(2, n_report);
    size_t next = 0;
    auto record = [&]() {
        auto [mn, mx] = std::minmax_element(eng.st.U.begin(), eng.st.U.end());
        double o = s * eng.st.time;
        res.t.push_back(eng.st.time);
        res.minU.push_back(*mn);
        res.maxU.push_back(*mx);
        res.spread.push_back(*mx - *mn);
        res.gap_to_obstacle.push_back(kind == GraphObstacleKind::sub ? o - *mx : *mn - o);
    };
    auto due = [&]() {
        while (next < static_cast<size_t>(nrep) &&
               eng.st.time >= T * next / (nrep - 1) - 1e-12) {
            record();
            ++next;
        }
    };
    due();
    long long steps = 0;
    while (eng.st.time < T - 1e-12) {
        if (++steps > params.max_steps) throw error("graph evolve: max_steps exceeded");
        eng.step();
        eng.project(s, eng.st.time, kind);
        due();
    }
    res.state = eng.st;
    return res;
}

std::optional<double> measure_T_star(double s, const ForcingField& gprime,
                                     const SchemeParams& params, double horizon,
                                     GraphObstacleKind kind, int m) {
    GraphEngine eng(gprime, params, m);
    long long steps = 0;
    while (eng.st.time < horizon) {
        if (++steps > params.max_steps) throw error("measure_T_star: max_steps exceeded");
        eng.step();
        eng.project(s, eng.st.time, kind);
        double o = s * eng.st.time;
        if (kind == GraphObstacleKind::sub) {
            if (*std::max_element(eng.st.U.begin(), eng.st.U.end()) < o - 1.0)
                return eng.st.time;
        } else {
            if (*std::min_element(eng.st.U.begin(), eng.st.U.end()) > o + 1.0)
                return eng.st.time;
        }
    }
    return std::nullopt;
}

TravelingWaveProfile extract_traveling_wave(const ForcingField& gprime, double sbar,
                                            const SchemeParams& params,
                                            GraphObstacleKind kind, int m, double K,
                                            const std::vector<int>& ladder) {
    if (ladder.empty()) throw error("extract_traveling_wave: empty ladder");
    TravelingWaveProfile prof;
    prof.torus_dim = gprime.dim;
    prof.m = m;
    prof.kind = kind;
    double band = 2.0 * gprime.M0 * K;
    std::vector<std::uint8_t> prev_mask;
    for (int l : ladder) {
        // approach the critical speed from the detaching side
        double s = kind == GraphObstacleKind::sub ? sbar + 1.0 / (l * l)
                                                  : sbar - 1.0 / (l * l);
        double tl = l;
        GraphRunResult run = evolve_graph_obstacle(s, gprime, params, tl, kind, m, 2);
        long long nn = run.state.nnodes();
        std::vector<double> V(nn);
        for (long long id = 0; id < nn; ++id) V[id] = run.state.U[id] - s * tl;
        // recenter: contact value to 0
        double ref = kind == GraphObstacleKind::sub
                         ? *std::max_element(V.begin(), V.end())
                         : *std::min_element(V.begin(), V.end());
        for (double& v : V) v -= ref;
        std::vector<std::uint8_t> mask(nn);
        for (long long id = 0; id < nn; ++id)
            mask[id] = kind == GraphObstacleKind::sub ? V[id] > -band : V[id] < band;
        if (!prev_mask.empty()) {
            long long diff = 0;
            for (long long id = 0; id < nn; ++id)
                if (mask[id] != prev_mask[id]) ++diff;
            prof.ladder_mask_change.push_back(static_cast<double>(diff) / nn);
        }
        prev_mask = mask;
        prof.E = std::move(mask);
        prof.Uprof = std::move(V);
        prof.speed = s;
    }
    for (long long id = 0; id < static_cast<long long>(prof.Uprof.size()); ++id)
        if (!prof.E[id]) prof.Uprof[id] = 0.0;
    prof.stabilized =
        prof.ladder_mask_change.empty() || prof.ladder_mask_change.back() < 0.1;
    return prof;
}

RadialProfile construct_subsolution_profile(double r1, const Vec& y1, double sbar) {
    if (r1 <= 0) throw error("subsolution profile: need r1 > 0");
    RadialProfile p;
    p.r_inner = 0;
    p.r_outer = r1;
    p.center = y1;
    p.speed = sbar;
    p.kind = GraphObstacleKind::sub;
    p.height_unclipped = [r1](double r) {
        if (r >= r1) return -1e300;
        return r + r1 * std::log((r1 - r) / r1);
    };
    auto hu = p.height_unclipped;
    p.height = [hu](double r) { return std::max(hu(r), -kProfileClip); };
    return p;
}

RadialProfile construct_supersolution_profile(double r2, double R, const Vec& y2,
                                              double sunder) {
    if (!(0 < r2 && r2 < R)) throw error("supersolution profile: need 0 < r2 < R");
    RadialProfile p;
    p.r_inner = r2;
    p.r_outer = R;
    p.center = y2;
    p.speed = sunder;
    p.kind = GraphObstacleKind::super;
    p.height_unclipped = [r2, R](double r) {
        if (r >= R) return 0.0;
        if (r <= r2) return 1e300;
        return (R - r2) * std::log((R - r2) / (r - r2)) - (R - r);
    };
    auto hu = p.height_unclipped;
    p.height = [hu](double r) { return std::min(hu(r), kProfileClip); };
    return p;
}

namespace {

double torus_dist(const Vec& a, const Vec& b, int td) {
    double s = 0;
    for (int i = 0; i < td; ++i) {
        double d = std::abs(frac(a[i] - b[i]));
        d = std::min(d, 1.0 - d);
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

ResidualReport residual_check(const RadialProfile& profile, const ForcingField& gprime,
                              int m, double tol_fraction, double slope_cap) {
    int td = gprime.dim;
    ResidualReport rep;
    bool sub = profile.kind == GraphObstacleKind::sub;
    GraphState st = make_graph_state(td, m, [&](const Vec& y) {
        double r = torus_dist(y, profile.center, td);
        // the sub profile is undefined past r_outer: hold the clip value there
        if (sub && r >= profile.r_outer) return -kProfileClip;
        return profile.height(r);
    });
    auto F = graph_operator(st, gprime);
    double h = st.dx();
    int mj = td == 2 ? m : 1;
    double worst = sub ? 1e300 : -1e300;
    for (int j = 0; j < mj; ++j)
        for (int i = 0; i < m; ++i) {
            Vec y = st.point(i, j);
            double r = torus_dist(y, profile.center, td);
            if (sub) {
                if (r >= profile.r_outer - 2 * h) continue;
            } else {
                if (r <= profile.r_inner + 2 * h) continue;
            }
            // skip the clipped band and its stencil neighborhood
            double u = st.U[st.idx(i, j)];
            if (std::abs(u) >= kProfileClip - 1e-9) continue;
            // slope by central differences; the steep collar near the
            // singular radius is excluded by the cap
            int im = (i + m - 1) % m, ip = (i + 1) % m;
            double gx = (st.U[st.idx(ip, j)] - st.U[st.idx(im, j)]) / (2 * h);
            double gy = 0;
            if (td == 2) {
                int jm = (j + m - 1) % m, jp = (j + 1) % m;
                gy = (st.U[st.idx(i, jp)] - st.U[st.idx(i, jm)]) / (2 * h);
            }
            if (std::sqrt(gx * gx + gy * gy) > slope_cap) continue;
            double res = F[st.idx(i, j)] - profile.speed;
            double scale = gprime(y) + std::abs(profile.speed);
            double rel = res / scale;
            ++rep.nodes_checked;
            bool is_worse = sub ? rel < worst : rel > worst;
            if (is_worse) {
                worst = rel;
                rep.worst_node = y;
            }
        }
    if (rep.nodes_checked == 0) {
        rep.detail = "no admissible nodes (grid too coarse for the profile)";
        return rep;
    }
    rep.worst_residual = worst;
    rep.ok = sub ? worst >= -tol_fraction : worst <= tol_fraction;
    if (!rep.ok) {
        std::ostringstream os;
        os << (sub ? "subsolution" : "supersolution") << " residual "
           << worst << " outside tolerance " << tol_fraction;
        rep.detail = os.str();
    }
    return rep;
}

CorollaryReport verify_corollary(const CorollaryForcing& cf, const SchemeParams& params,
                                 int m, double t_lo, double t_hi) {
    CorollaryReport rep;
    const CorollaryParams& cp = cf.params;
    int td = cp.n - 1;
    ForcingField g = cf.gprime;

    // dense sampling of the two plateaus
    double min_E1 = 1e300, max_E2 = -1e300;
    int ns = 400;
    for (int j = 0; j < (td == 2 ? ns : 1); ++j)
        for (int i = 0; i < ns; ++i) {
            Vec y{(i + 0.5) / ns, td == 2 ? (j + 0.5) / ns : 0.0, 0};
            double val = g(y);
            if (torus_dist(y, cp.y1, td) <= cp.r1) min_E1 = std::min(min_E1, val);
            if (torus_dist(y, cp.y2, td) >= cp.r2) max_E2 = std::max(max_E2, val);
        }
    rep.min_E1 = min_E1;
    rep.max_E2 = max_E2;
    double head_lb = min_E1 - std::sqrt(2.0) * cp.n / cp.r1;
    double tail_ub = 2.0 / (cp.R - cp.r2) + cp.sigma;
    std::ostringstream os;
    rep.hypothesis_ok = max_E2 <= cp.sigma + 1e-12 && head_lb > tail_ub;
    os << "min over the fast ball: " << min_E1 << ", max outside the slow ball: "
       << max_E2 << ", head lower bound " << head_lb << " vs tail upper bound "
       << tail_ub;
    rep.hypothesis_detail = os.str();

    GraphEngine eng(g, params, m);
    std::vector<double> ts, spreads;
    long long steps = 0;
    long long stride = std::max<long long>(1, static_cast<long long>(0.01 / eng.dt));
    while (eng.st.time < t_hi) {
        if (++steps > params.max_steps) throw error("verify_corollary: max_steps exceeded");
        eng.step();
        if (steps % stride == 0 && eng.st.time >= t_lo) {
            auto [mn, mx] = std::minmax_element(eng.st.U.begin(), eng.st.U.end());
            ts.push_back(eng.st.time);
            spreads.push_back(*mx - *mn);
        }
    }
    if (ts.size() < 2) throw error("verify_corollary: fit window too short");
    rep.spread_rate = fit_line(ts, spreads).slope;
    rep.required_rate = 0.9 * (cf.s_head_lb - cf.s_tail_ub);
    rep.fingering_ok = rep.spread_rate >= rep.required_rate;
    rep.ok = rep.hypothesis_ok && rep.fingering_ok;
    return rep;
}

}  // namespace mcfh
