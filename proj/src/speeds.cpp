#include "mcfh/speeds.hpp"

#include <algorithm>
#include <cmath>

#include "mcfh/obstacle.hpp"

namespace mcfh {

DetachmentReport detect_detachment(const ObstacleRunResult& run, double mu,
                                   double radius) {
    DetachmentReport rep;
    rep.level = mu;
    rep.radius = radius;
    double thr = 2.0 * run.dx;
    size_t n = run.t.size();
    size_t first = n;
    for (size_t i = 0; i < n; ++i)
        if (run.level_gap[i] >= thr) {
            first = i;
            break;
        }
    if (first == n) {
        // no detachment; flag as undecided when the gap is still creeping up
        rep.undecided = n > 0 && run.level_gap.back() > run.dx;
        return rep;
    }
    rep.first_detach_time = run.t[first];
    double mg = 1e300;
    bool persists = true;
    for (size_t i = first; i < n; ++i) {
        mg = std::min(mg, run.level_gap[i]);
        if (run.level_gap[i] < thr) persists = false;
    }
    rep.min_gap_after = mg;
    rep.persistent = persists;
    rep.undecided = first + 1 >= n;  // detached only at the final sample
    return rep;
}

namespace {

// Axis permutation making the dominant component of nu the propagation axis.
// Swapping two coordinate axes preserves Z^n-periodicity of the forcing, so a
// wrapped evaluator keeps the same bounds.
struct AxisSwap {
    int a = -1, b = -1;
    Vec apply(const Vec& x) const {
        Vec y = x;
        if (a >= 0) std::swap(y[a], y[b]);
        return y;
    }
};

AxisSwap dominant_last(const Vec& nu, int dim) {
    int best = 0;
    for (int a = 1; a < dim; ++a)
        if (std::abs(nu[a]) > std::abs(nu[best])) best = a;
    AxisSwap s;
    if (best != dim - 1) {
        s.a = best;
        s.b = dim - 1;
    }
    return s;
}

ForcingField swapped_forcing(const ForcingField& g, const AxisSwap& s) {
    if (s.a < 0) return g;
    ForcingField h = g;
    auto base = g.evaluator;
    h.evaluator = [base, s](const Vec& x) { return base(s.apply(x)); };
    return h;
}

}  // namespace

std::pair<SpeedEstimate, SpeedEstimate> estimate_speed_front_tracking(
    const Vec& nu, int dim, const ForcingField& g, const SchemeParams& params,
    const FrontTrackingOptions& opt, double eps) {
    Vec nunit = normalized(nu, dim);
    AxisSwap sw = dominant_last(nunit, dim);
    Vec nup = sw.apply(nunit);
    ForcingField gp = swapped_forcing(g, sw);
    // flip so propagation (at speed >= m0 > 0) runs toward +axis
    if (nup[dim - 1] < 0) {
        nup = scaled(nup, -1.0, dim);
        auto base = gp.evaluator;
        gp.evaluator = [base, dim](const Vec& x) {
            Vec y = scaled(x, -1.0, dim);
            return base(y);
        };
    }

    LevelSetField f = make_planar_field(dim, nup, opt.dx, opt.slab_height, eps);
    std::vector<double> ts, heads, tails;
    SolveCallbacks cb;
    for (int i = 0; i <= opt.n_samples; ++i)
        cb.output_times.push_back(opt.T * i / opt.n_samples);
    cb.on_output = [&](const LevelSetField& st) {
        FrontSet fs = extract_front(st, 0.0, nup);
        if (fs.empty) throw error("front_tracking: front left the window");
        ts.push_back(st.time);
        heads.push_back(fs.head);
        tails.push_back(fs.tail);
    };
    solve(std::move(f), gp, params, opt.T, cb, /*moving_window=*/true);

    // fit over the second half of the horizon, past the transient
    std::vector<double> tf, hf, lf;
    for (size_t i = 0; i < ts.size(); ++i)
        if (ts[i] >= opt.T / 2) {
            tf.push_back(ts[i]);
            hf.push_back(heads[i]);
            lf.push_back(tails[i]);
        }
    LineFit fh = fit_line(tf, hf), ft = fit_line(tf, lf);
    double span = tf.back() - tf.front();
    auto make = [&](SpeedKind k, const LineFit& fit) {
        SpeedEstimate e;
        e.nu = nunit;
        e.kind = k;
        e.value = fit.slope;
        e.method = SpeedMethod::front_tracking;
        e.half_width = 2.0 * fit.rms / span + 2.0 * opt.dx / span;
        e.horizon = opt.T;
        return e;
    };
    return {make(SpeedKind::head, fh), make(SpeedKind::tail, ft)};
}

SpeedEstimate estimate_speed_obstacle_bisection(const Vec& nu, int dim,
                                                const ForcingField& g,
                                                SpeedKind kind,
                                                const SchemeParams& params,
                                                const BisectionOptions& opt) {
    Vec nunit = normalized(nu, dim);
    AxisSwap sw = dominant_last(nunit, dim);
    Vec nup = sw.apply(nunit);
    ForcingField gp = swapped_forcing(g, sw);
    if (nup[dim - 1] < 0) {
        nup = scaled(nup, -1.0, dim);
        auto base = gp.evaluator;
        gp.evaluator = [base, dim](const Vec& x) { return base(scaled(x, -1.0, dim)); };
    }

    ObstacleRunOptions ropt;
    ropt.slab_height = opt.slab_height;

    // head: the sub solution below the obstacle at speed s detaches iff
    // s > s_head(nu); tail: the super solution detaches iff s < s_tail(nu).
    auto detaches = [&](double s) {
        ObstacleProblem p;
        p.dim = dim;
        p.nu = nup;
        p.q = scaled(nup, -1.0, dim);
        p.s = s;
        p.global = true;
        ObstacleRunResult run = kind == SpeedKind::head
                                    ? evolve_sub(p, gp, params, opt.T_probe, opt.dx, ropt)
                                    : evolve_super(p, gp, params, opt.T_probe, opt.dx, ropt);
        DetachmentReport d = detect_detachment(run, 0.0, ropt.report_radius);
        return d.first_detach_time.has_value() && d.persistent;
    };

    double lo = g.m0, hi = g.M0;
    // bracket endpoints: head detaches at M0 side, never at m0 (and dually)
    for (int it = 0; it < opt.max_iters; ++it) {
        double mid = 0.5 * (lo + hi);
        bool det = detaches(mid);
        bool upper_side = kind == SpeedKind::head ? det : !det;
        if (upper_side)
            hi = mid;
        else
            lo = mid;
    }
    SpeedEstimate e;
    e.nu = nunit;
    e.kind = kind;
    e.value = 0.5 * (lo + hi);
    e.method = SpeedMethod::obstacle_bisection;
    e.half_width = 0.5 * (hi - lo) + 2.0 * opt.dx / opt.T_probe;
    e.horizon = opt.T_probe;
    return e;
}

SweepResult sweep_directions(const ForcingField& g, const std::vector<double>& thetas,
                             const SchemeParams& params,
                             const FrontTrackingOptions& opt) {
    SweepResult res;
    for (double th : thetas) {
        Vec nu{std::cos(th), std::sin(th), 0};
        auto [h, t] = estimate_speed_front_tracking(nu, 2, g, params, opt);
        SweepRow row;
        row.theta = th;
        row.nu = nu;
        row.s_head = h.value;
        row.s_tail = t.value;
        row.hw_head = h.half_width;
        row.hw_tail = t.half_width;
        row.method = SpeedMethod::front_tracking;
        row.ordering_ok = h.value >= t.value - h.half_width - t.half_width;
        res.rows.push_back(row);
    }
    res.ordering_all_ok = true;
    for (const auto& r : res.rows) res.ordering_all_ok = res.ordering_all_ok && r.ordering_ok;
    for (size_t i = 0; i + 1 < res.rows.size(); ++i) {
        double dh = std::abs(res.rows[i + 1].s_head - res.rows[i].s_head);
        double dt = std::abs(res.rows[i + 1].s_tail - res.rows[i].s_tail);
        res.max_adjacent_variation = std::max({res.max_adjacent_variation, dh, dt});
    }
    return res;
}

FingeringSeries fingering_metric(const Vec& nu, int dim, const ForcingField& g,
                                 const SchemeParams& params,
                                 const FrontTrackingOptions& opt,
                                 double fit_t_min, double fit_t_max) {
    Vec nunit = normalized(nu, dim);
    AxisSwap sw = dominant_last(nunit, dim);
    Vec nup = sw.apply(nunit);
    ForcingField gp = swapped_forcing(g, sw);
    if (nup[dim - 1] < 0) {
        nup = scaled(nup, -1.0, dim);
        auto base = gp.evaluator;
        gp.evaluator = [base, dim](const Vec& x) { return base(scaled(x, -1.0, dim)); };
    }
    LevelSetField f = make_planar_field(dim, nup, opt.dx, opt.slab_height, 1.0);
    FingeringSeries series;
    SolveCallbacks cb;
    for (int i = 0; i <= opt.n_samples; ++i)
        cb.output_times.push_back(opt.T * i / opt.n_samples);
    cb.on_output = [&](const LevelSetField& st) {
        FrontSet fs = extract_front(st, 0.0, nup);
        if (fs.empty) throw error("fingering: front left the window");
        series.t.push_back(st.time);
        series.head.push_back(fs.head);
        series.tail.push_back(fs.tail);
        series.spread.push_back(fs.head - fs.tail);
    };
    solve(std::move(f), gp, params, opt.T, cb, /*moving_window=*/true);
    std::vector<double> tf, sf;
    for (size_t i = 0; i < series.t.size(); ++i)
        if (series.t[i] >= fit_t_min && series.t[i] <= fit_t_max) {
            tf.push_back(series.t[i]);
            sf.push_back(series.spread[i]);
        }
    if (tf.size() < 2) throw error("fingering: fit window contains < 2 samples");
    series.rate = fit_line(tf, sf).slope;
    return series;
}

EnvelopeReport check_envelope(const LevelSetField& initial, const ForcingField& g,
                              const SchemeParams& params, double T,
                              const std::vector<EnvelopeAnchor>& anchors,
                              int n_times) {
    if (anchors.empty()) throw error("check_envelope: no anchors");
    EnvelopeReport rep;
    rep.worst_excess = -1e300;
    LevelSetField state = initial;
    SolveCallbacks cb;
    for (int i = 1; i <= n_times; ++i) cb.output_times.push_back(T * i / n_times);
    double slack = 3.0 * initial.grid.dx;
    cb.on_output = [&](const LevelSetField& st) {
        const Grid& gr = st.grid;
        int mk = gr.dim == 3 ? gr.shape[2] : 1;
        for (int k = 0; k < mk; ++k)
            for (int j = 0; j < gr.shape[1]; ++j)
                for (int i = 0; i < gr.shape[0]; ++i) {
                    if (st.at(i, j, k) <= 0) continue;  // superlevel set only
                    Vec x = gr.point(i, j, k);
                    for (const auto& an : anchors) {
                        Vec d{x[0] - an.x[0], x[1] - an.x[1], x[2] - an.x[2]};
                        double excess = dot(d, an.nu, gr.dim) - an.sbar * st.time;
                        if (excess > rep.worst_excess) {
                            rep.worst_excess = excess;
                            rep.worst_point = x;
                            rep.worst_time = st.time;
                        }
                    }
                }
    };
    solve(std::move(state), g, params, T, cb);
    rep.ok = rep.worst_excess <= slack;
    return rep;
}

}  // namespace mcfh
