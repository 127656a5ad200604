#include "mcfh/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "mcfh/config.hpp"
#include "mcfh/discrepancy.hpp"
#include "mcfh/io.hpp"
#include "mcfh/laminar.hpp"
#include "mcfh/levelset.hpp"
#include "mcfh/obstacle.hpp"
#include "mcfh/speeds.hpp"

namespace mcfh {

namespace {

constexpr const char* kVersion = "0.1.0";

Vec vec_from(const Toml& t, const std::string& key, Vec fallback, int dim) {
    if (!t.has(key)) return fallback;
    auto a = t.array(key);
    Vec v{0, 0, 0};
    for (size_t i = 0; i < a.size() && i < 3; ++i) v[i] = a[i];
    return normalized(v, dim);
}

SchemeParams scheme_from(const RunConfig& cfg) {
    SchemeParams p;
    p.cfl_factor = cfg.toml.number_or("scheme.cfl", 0.5);
    p.grad_reg = cfg.toml.number_or("scheme.grad_reg", 1e-6);
    p.workers = cfg.workers;
    return p;
}

nlohmann::json toml_echo(const Toml& t) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, val] : t.items()) {
        if (auto* d = std::get_if<double>(&val.v))
            j[k] = *d;
        else if (auto* b = std::get_if<bool>(&val.v))
            j[k] = *b;
        else if (auto* s = std::get_if<std::string>(&val.v))
            j[k] = *s;
        else if (auto* a = std::get_if<std::vector<double>>(&val.v))
            j[k] = *a;
        else if (auto* sa = std::get_if<std::vector<std::string>>(&val.v))
            j[k] = *sa;
    }
    return j;
}

void write_manifest(const RunConfig& cfg, double wall_s, bool dry_run) {
    nlohmann::json m;
    m["scenario"] = scenario_name(cfg.scenario);
    m["version"] = kVersion;
    m["workers"] = cfg.workers;
    m["seed"] = cfg.seed;
    m["config"] = toml_echo(cfg.toml);
    m["dry_run"] = dry_run;
    m["wall_time_s"] = wall_s;
    write_text_file(cfg.out_dir + "/manifest.json", m.dump(2) + "\n");
}

ObstacleProblem obstacle_from(const RunConfig& cfg, int dim) {
    ObstacleProblem p;
    p.dim = dim;
    p.nu = vec_from(cfg.toml, "obstacle.nu", Vec{0, 0, 0}, dim);
    if (norm(p.nu, dim) == 0) {
        p.nu = Vec{0, 0, 0};
        p.nu[dim - 1] = 1.0;
    }
    p.q = scaled(p.nu, -cfg.toml.number_or("obstacle.q_norm", 1.0), dim);
    p.s = cfg.toml.number_or("obstacle.s", 1.0);
    p.R = cfg.toml.number_or("obstacle.R", 2.0);
    p.Rdot = cfg.toml.number_or("obstacle.Rdot", 0.0);
    p.global = cfg.toml.boolean_or("obstacle.global", false);
    return p;
}

void run_simulate(const RunConfig& cfg) {
    const Toml& t = cfg.toml;
    int dim = static_cast<int>(t.integer_or("simulate.dim", 2));
    double eps = t.number_or("simulate.eps", 1.0);
    double T = t.number_or("simulate.T", 1.0);
    double dx = t.number_or("simulate.dx", 1.0 / 32.0);
    int n_samples = static_cast<int>(t.integer_or("simulate.n_samples", 50));
    SchemeParams sp = scheme_from(cfg);
    ForcingField g = forcing_from_config(t, dim);
    std::string init = t.str_or("simulate.init", "planar");

    SolveCallbacks cb;
    for (int i = 0; i <= n_samples; ++i) cb.output_times.push_back(T * i / n_samples);

    if (init == "planar") {
        Vec nu = vec_from(t, "simulate.nu", Vec{0, 0, 0}, dim);
        if (norm(nu, dim) == 0) {
            nu = Vec{0, 0, 0};
            nu[dim - 1] = 1.0;
        }
        double slab = t.number_or("simulate.slab_height", 8.0);
        LevelSetField f = make_planar_field(dim, nu, dx, slab, eps);
        CsvWriter csv(cfg.out_dir + "/front.csv", "t,head,tail,spread");
        cb.on_output = [&](const LevelSetField& st) {
            FrontSet fs = extract_front(st, 0.0, nu);
            if (fs.empty) throw error("simulate: front left the window");
            csv.row({st.time, fs.head, fs.tail, fs.head - fs.tail});
        };
        LevelSetField fin = solve(std::move(f), g, sp, T, cb,
                                  t.boolean_or("simulate.moving_window", true));
        write_pgm16(cfg.out_dir + "/final.pgm", fin);
    } else if (init == "circle") {
        double r0 = t.number_or("simulate.r0", 2.0);
        double w = t.number_or("simulate.box_halfwidth", r0 + 1.0);
        int m = static_cast<int>(std::llround(2.0 * w / dx));
        LevelSetField f;
        f.eps = eps;
        f.grid.dim = dim;
        f.grid.dx = dx;
        for (int a = 0; a < dim; ++a) {
            f.grid.shape[a] = m;
            f.grid.topo[a] = Topo::clamped;
            f.grid.origin[a] = -w;
        }
        if (dim == 2) f.grid.shape[2] = 1;
        f.v.resize(f.grid.ncells());
        f.fill([r0, dim](const Vec& x) { return r0 - norm(x, dim); });
        CsvWriter csv(cfg.out_dir + "/circle.csv", "t,radius,n_points");
        cb.on_output = [&](const LevelSetField& st) {
            FrontSet fs = extract_front(st, 0.0, Vec{1, 0, 0});
            double r = 0;
            for (const Vec& p : fs.points) r += norm(p, dim);
            if (!fs.points.empty()) r /= static_cast<double>(fs.points.size());
            csv.row({st.time, r, static_cast<double>(fs.points.size())});
        };
        LevelSetField fin = solve(std::move(f), g, sp, T, cb);
        write_pgm16(cfg.out_dir + "/final.pgm", fin);
    } else {
        throw error("simulate.init must be 'planar' or 'circle'");
    }
}

void run_obstacle(const RunConfig& cfg) {
    const Toml& t = cfg.toml;
    int dim = static_cast<int>(t.integer_or("obstacle.dim", 2));
    ObstacleProblem p = obstacle_from(cfg, dim);
    ForcingField g = forcing_from_config(t, dim);
    SchemeParams sp = scheme_from(cfg);
    double T = t.number_or("obstacle.T", 4.0);
    double dx = t.number_or("obstacle.dx", 1.0 / 32.0);
    ObstacleRunOptions opt;
    opt.mu = t.number_or("obstacle.mu", 0.0);
    opt.n_report = static_cast<int>(t.integer_or("obstacle.n_report", 40));
    std::string side = t.str_or("obstacle.side", "sub");
    ObstacleRunResult run = side == "sub" ? evolve_sub(p, g, sp, T, dx, opt)
                                          : evolve_super(p, g, sp, T, dx, opt);
    CsvWriter csv(cfg.out_dir + "/obstacle.csv",
                  "t,axis_gap,max_gap,min_gap,touching_fraction,level_gap");
    for (size_t i = 0; i < run.t.size(); ++i)
        csv.row({run.t[i], run.axis_gap[i], run.max_gap[i], run.min_gap[i],
                 run.touching_fraction[i], run.level_gap[i]});
    write_pgm16(cfg.out_dir + "/final.pgm", run.field);
    DetachmentReport det = detect_detachment(run, opt.mu, opt.report_radius);
    nlohmann::json j;
    j["detached"] = det.first_detach_time.has_value();
    if (det.first_detach_time) j["first_detach_time"] = *det.first_detach_time;
    j["persistent"] = det.persistent;
    j["undecided"] = det.undecided;
    j["barrier_fallback"] = run.barrier_fallback;
    write_text_file(cfg.out_dir + "/detachment.json", j.dump(2) + "\n");
}

std::vector<double> thetas_from(const Toml& t, const std::string& key, int fallback_n) {
    if (t.has(key)) return t.array(key);
    int n = static_cast<int>(t.integer_or(key + "_count", fallback_n));
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(2.0 * M_PI * i / n);
    return out;
}

void run_speeds(const RunConfig& cfg) {
    const Toml& t = cfg.toml;
    ForcingField g = forcing_from_config(t, 2);
    SchemeParams sp = scheme_from(cfg);
    auto thetas = thetas_from(t, "speeds.thetas", 8);
    std::string method = t.str_or("speeds.method", "front_tracking");
    FrontTrackingOptions fopt;
    fopt.T = t.number_or("speeds.T", 20.0);
    fopt.dx = t.number_or("speeds.dx", 1.0 / 32.0);
    BisectionOptions bopt;
    bopt.dx = fopt.dx;
    bopt.T_probe = t.number_or("speeds.T_probe", 6.0);
    CsvWriter csv(cfg.out_dir + "/speeds.csv",
                  "theta,nux,nuy,s_head,s_tail,hw_head,hw_tail");
    for (double th : thetas) {
        Vec nu{std::cos(th), std::sin(th), 0};
        double sh, st_, hh, ht;
        if (method == "bisection") {
            auto h = estimate_speed_obstacle_bisection(nu, 2, g, SpeedKind::head, sp, bopt);
            auto l = estimate_speed_obstacle_bisection(nu, 2, g, SpeedKind::tail, sp, bopt);
            sh = h.value; st_ = l.value; hh = h.half_width; ht = l.half_width;
        } else {
            auto [h, l] = estimate_speed_front_tracking(nu, 2, g, sp, fopt);
            sh = h.value; st_ = l.value; hh = h.half_width; ht = l.half_width;
        }
        csv.row({th, nu[0], nu[1], sh, st_, hh, ht});
    }
}

void run_sweep(const RunConfig& cfg) {
    const Toml& t = cfg.toml;
    ForcingField g = forcing_from_config(t, 2);
    SchemeParams sp = scheme_from(cfg);
    auto thetas = thetas_from(t, "sweep.thetas", 16);
    FrontTrackingOptions fopt;
    fopt.T = t.number_or("sweep.T", 20.0);
    fopt.dx = t.number_or("sweep.dx", 1.0 / 32.0);
    SweepResult res = sweep_directions(g, thetas, sp, fopt);
    CsvWriter csv(cfg.out_dir + "/sweep.csv",
                  "theta,s_head,s_tail,hw_head,hw_tail,ordering_ok");
    for (const auto& r : res.rows)
        csv.row({r.theta, r.s_head, r.s_tail, r.hw_head, r.hw_tail,
                 r.ordering_ok ? 1.0 : 0.0});
    nlohmann::json j;
    j["ordering_all_ok"] = res.ordering_all_ok;
    j["max_adjacent_variation"] = res.max_adjacent_variation;
    write_text_file(cfg.out_dir + "/sweep.json", j.dump(2) + "\n");
}

void run_finger(const RunConfig& cfg) {
    const Toml& t = cfg.toml;
    int dim = static_cast<int>(t.integer_or("finger.dim", 2));
    ForcingField g = forcing_from_config(t, dim);
    SchemeParams sp = scheme_from(cfg);
    FrontTrackingOptions fopt;
    fopt.T = t.number_or("finger.T", 10.0);
    fopt.dx = t.number_or("finger.dx", 1.0 / 32.0);
    Vec nu = vec_from(t, "finger.nu", Vec{0, 0, 0}, dim);
    if (norm(nu, dim) == 0) {
        nu = Vec{0, 0, 0};
        nu[dim - 1] = 1.0;
    }
    double flo = t.number_or("finger.fit_t_min", fopt.T / 2);
    double fhi = t.number_or("finger.fit_t_max", fopt.T);
    FingeringSeries s = fingering_metric(nu, dim, g, sp, fopt, flo, fhi);
    CsvWriter csv(cfg.out_dir + "/finger.csv", "t,head,tail,spread");
    for (size_t i = 0; i < s.t.size(); ++i)
        csv.row({s.t[i], s.head[i], s.tail[i], s.spread[i]});
    nlohmann::json j;
    j["spread_rate"] = s.rate;
    write_text_file(cfg.out_dir + "/finger.json", j.dump(2) + "\n");
}

void run_laminar(const RunConfig& cfg) {
    const Toml& t = cfg.toml;
    SchemeParams sp = scheme_from(cfg);
    int m = static_cast<int>(t.integer_or("laminar.m", 64));
    if (t.boolean_or("laminar.corollary", false)) {
        auto cf = corollary_from_config(t);
        CorollaryReport rep = verify_corollary(*cf, sp, m,
                                               t.number_or("laminar.t_lo", 0.1),
                                               t.number_or("laminar.t_hi", 0.5));
        nlohmann::json j;
        j["hypothesis_ok"] = rep.hypothesis_ok;
        j["hypothesis_detail"] = rep.hypothesis_detail;
        j["min_E1"] = rep.min_E1;
        j["max_E2"] = rep.max_E2;
        j["spread_rate"] = rep.spread_rate;
        j["required_rate"] = rep.required_rate;
        j["fingering_ok"] = rep.fingering_ok;
        j["ok"] = rep.ok;
        write_text_file(cfg.out_dir + "/corollary.json", j.dump(2) + "\n");
        std::cout << (rep.ok ? "corollary: PASS" : "corollary: FAIL") << "\n";
        if (!rep.ok) throw error("corollary verification failed: " + rep.hypothesis_detail);
        return;
    }
    int td = static_cast<int>(t.integer_or("laminar.torus_dim", 2));
    ForcingField gp = forcing_from_config(t, td);
    double s = t.number_or("laminar.s", gp.M0);
    double T = t.number_or("laminar.T", 2.0);
    GraphObstacleKind kind = t.str_or("laminar.side", "sub") == "sub"
                                 ? GraphObstacleKind::sub
                                 : GraphObstacleKind::super;
    GraphRunResult run = evolve_graph_obstacle(s, gp, sp, T, kind, m);
    CsvWriter csv(cfg.out_dir + "/laminar.csv", "t,maxU,minU,spread,gap_to_obstacle");
    for (size_t i = 0; i < run.t.size(); ++i)
        csv.row({run.t[i], run.maxU[i], run.minU[i], run.spread[i],
                 run.gap_to_obstacle[i]});
    int mj = run.state.torus_dim == 2 ? m : 1;
    write_pgm16(cfg.out_dir + "/height.pgm", run.state.U, m, mj, run.state.time);
}

void run_discrepancy(const RunConfig& cfg) {
    const Toml& t = cfg.toml;
    auto arr = t.array("discrepancy.nu");
    int dim = static_cast<int>(arr.size());
    Vec nu{0, 0, 0};
    for (int i = 0; i < dim && i < 3; ++i) nu[i] = arr[i];
    Direction d = make_direction(normalized(nu, dim), dim);
    long long Nmax = t.integer_or("discrepancy.N_max", 10000);
    CsvWriter csv(cfg.out_dir + "/discrepancy.csv", "N,omega");
    // log-spaced N to keep the file small at large N_max
    long long prev = 0;
    for (double x = 0; ; x += 0.05) {
        long long N = static_cast<long long>(std::llround(std::pow(10.0, x)));
        if (N > Nmax) break;
        if (N < 2 || N == prev) continue;
        prev = N;
        csv.row({static_cast<double>(N), omega(d, N)});
    }
    nlohmann::json j;
    j["rationality"] = d.rationality == Rationality::rational ? "rational" : "irrational";
    if (t.has("discrepancy.threshold")) {
        double thr = t.number("discrepancy.threshold");
        auto N = smallest_N_below(d, thr, Nmax);
        j["threshold"] = thr;
        if (N)
            j["smallest_N"] = *N;
        else
            j["smallest_N"] = nullptr;
    }
    write_text_file(cfg.out_dir + "/discrepancy.json", j.dump(2) + "\n");
}

void run_lcp(const RunConfig& cfg) {
    const Toml& t = cfg.toml;
    int dim = static_cast<int>(t.integer_or("lcp.dim", 2));
    ForcingField g = forcing_from_config(t, dim);
    SchemeParams sp = scheme_from(cfg);
    Vec nu = vec_from(t, "lcp.nu", Vec{0, 0, 0}, dim);
    if (norm(nu, dim) == 0) {
        nu = Vec{0, 0, 0};
        nu[dim - 1] = 1.0;
    }
    LcpReport rep = check_lcp(nu, dim, t.number("lcp.s1"), t.number("lcp.s2"), g, sp,
                              t.number_or("lcp.T", 0.1), t.number_or("lcp.dx", 1.0 / 24.0),
                              t.number_or("lcp.R", 2.0),
                              t.boolean_or("lcp.negate_shift", false));
    nlohmann::json j;
    j["applicable"] = rep.applicable;
    j["detail"] = rep.detail;
    j["min_margin"] = rep.min_margin;
    j["ordering_holds"] = rep.ordering_holds;
    j["xi0"] = {rep.xi0[0], rep.xi0[1], rep.xi0[2]};
    j["delta"] = rep.delta;
    j["Rdot"] = rep.Rdot;
    write_text_file(cfg.out_dir + "/lcp.json", j.dump(2) + "\n");
}

void dispatch(const RunConfig& cfg) {
    switch (cfg.scenario) {
        case Scenario::simulate: run_simulate(cfg); break;
        case Scenario::obstacle: run_obstacle(cfg); break;
        case Scenario::speeds: run_speeds(cfg); break;
        case Scenario::sweep: run_sweep(cfg); break;
        case Scenario::finger: run_finger(cfg); break;
        case Scenario::laminar: run_laminar(cfg); break;
        case Scenario::discrepancy: run_discrepancy(cfg); break;
        case Scenario::lcp: run_lcp(cfg); break;
    }
}

// Validation shared by run and explain: construct everything the scenario
// would construct, without stepping.
void validate_only(const RunConfig& cfg) {
    const Toml& t = cfg.toml;
    switch (cfg.scenario) {
        case Scenario::simulate: {
            int dim = static_cast<int>(t.integer_or("simulate.dim", 2));
            forcing_from_config(t, dim);
            break;
        }
        case Scenario::obstacle: {
            int dim = static_cast<int>(t.integer_or("obstacle.dim", 2));
            ForcingField g = forcing_from_config(t, dim);
            obstacle_from(cfg, dim).validate(g.m0, g.M0);
            break;
        }
        case Scenario::laminar:
            if (t.boolean_or("laminar.corollary", false))
                corollary_from_config(t);
            else
                forcing_from_config(t, static_cast<int>(t.integer_or("laminar.torus_dim", 2)));
            break;
        case Scenario::discrepancy: {
            auto arr = t.array("discrepancy.nu");
            Vec nu{0, 0, 0};
            for (size_t i = 0; i < arr.size() && i < 3; ++i) nu[i] = arr[i];
            make_direction(normalized(nu, static_cast<int>(arr.size())),
                           static_cast<int>(arr.size()));
            break;
        }
        default:
            forcing_from_config(t, 2);
            break;
    }
}

}  // namespace

int run_scenario(const RunConfig& cfg) {
    auto start = std::chrono::steady_clock::now();
    std::filesystem::create_directories(cfg.out_dir);
    validate_only(cfg);
    dispatch(cfg);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(cfg, wall, false);
    return 0;
}

int explain_scenario(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    validate_only(cfg);
    const Toml& t = cfg.toml;
    std::ostringstream os;
    os << "scenario: " << scenario_name(cfg.scenario) << "\n";
    os << "workers: " << cfg.workers << "\n";
    if (cfg.scenario == Scenario::simulate) {
        int dim = static_cast<int>(t.integer_or("simulate.dim", 2));
        double eps = t.number_or("simulate.eps", 1.0);
        double dx = t.number_or("simulate.dx", 1.0 / 32.0);
        double T = t.number_or("simulate.T", 1.0);
        ForcingField g = forcing_from_config(t, dim);
        Grid gr;
        gr.dim = dim;
        gr.dx = dx;
        double dt = cfl_dt(gr, eps, g.M0, t.number_or("scheme.cfl", 0.5));
        os << "dx: " << dx << "\n";
        os << "cfl dt: " << format_double(dt) << "\n";
        os << "steps: " << static_cast<long long>(std::ceil(T / dt)) << "\n";
        std::string init = t.str_or("simulate.init", "planar");
        long long cells;
        if (init == "circle") {
            double w = t.number_or("simulate.box_halfwidth",
                                   t.number_or("simulate.r0", 2.0) + 1.0);
            long long m = std::llround(2.0 * w / dx);
            cells = m * m * (dim == 3 ? m : 1);
        } else {
            long long lat = std::llround(1.0 / dx);
            long long rows = std::llround(t.number_or("simulate.slab_height", 8.0) / dx);
            cells = lat * rows * (dim == 3 ? lat : 1);
        }
        os << "cells: " << cells << "\n";
        os << "memory_bytes: " << cells * 2 * static_cast<long long>(sizeof(double)) << "\n";
    }
    std::cout << os.str();
    write_manifest(cfg, 0.0, true);
    return 0;
}

}  // namespace mcfh
