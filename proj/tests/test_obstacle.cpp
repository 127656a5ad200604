#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mcfh/obstacle.hpp"

using namespace mcfh;

namespace {

ObstacleProblem plane_problem(double s, double R = 2.0, double Rdot = 0.0) {
    ObstacleProblem p;
    p.dim = 2;
    p.nu = {0, 1, 0};
    p.q = {0, -1, 0};
    p.s = s;
    p.R = R;
    p.Rdot = Rdot;
    return p;
}

}  // namespace

TEST_CASE("obstacle value formula") {
    auto p = plane_problem(1.0);
    CHECK(obstacle_value(p, vec2(0, 0), 0.0) == doctest::Approx(0.0));
    CHECK(obstacle_value(p, vec2(0, 2), 1.0) == doctest::Approx(-1.0));
    // zero set at time t is the plane x.nu = s t
    for (double x1 : {-2.0, -0.5, 0.0, 1.0, 3.0})
        CHECK(obstacle_value(p, vec2(x1, 0.7), 0.7) == doctest::Approx(0.0));
    // slope scales with |q|
    auto p2 = p;
    p2.q = {0, -1.5, 0};
    CHECK(obstacle_value(p2, vec2(0, 2), 1.0) == doctest::Approx(1.5 * (1.0 - 2.0)));
}

TEST_CASE("obstacle problem validation") {
    auto p = plane_problem(1.0);
    CHECK_NOTHROW(p.validate(1.0, 1.0));
    p.nu = {0, -1, 0};  // not equal to -q/|q|
    CHECK_THROWS_AS(p.validate(1.0, 1.0), error);
    p = plane_problem(0.0);
    CHECK_THROWS_AS(p.validate(1.0, 1.0), error);
    p = plane_problem(1.0);
    p.q = {0, 0, 0};
    CHECK_THROWS_AS(p.validate(1.0, 1.0), error);
    p = plane_problem(1.0, -1.0);
    CHECK_THROWS_AS(p.validate(1.0, 1.0), error);
}

TEST_CASE("sub barrier coincides with the obstacle on the moving lateral boundary") {
    auto p = plane_problem(1.2, 1.0, 0.5);
    p.q = {0, -1.5, 0};
    double m0 = 0.8;
    for (double t : {0.0, 0.5, 1.3})
        for (double xn : {-1.0, 0.0, 0.7, 2.0}) {
            double xperp = p.R + p.Rdot * t;
            Vec x = vec2(xperp, xn);
            CHECK(sub_barrier_value(p, m0, x, t) ==
                  doctest::Approx(obstacle_value(p, x, t)).epsilon(1e-9));
        }
    // strictly inside the cylinder the barrier sits strictly below
    CHECK(sub_barrier_value(p, m0, vec2(0.0, 0.0), 0.5) <
          obstacle_value(p, vec2(0.0, 0.0), 0.5));
}

TEST_CASE("super barrier admissibility threshold") {
    auto p = plane_problem(1.0, 2.0, 0.0);
    CHECK(super_barrier_admissible(p, 1.0));        // Rdot = 0 >= sqrt(1 - 1)
    CHECK_FALSE(super_barrier_admissible(p, 2.0));  // needs Rdot >= sqrt(3)
    p.Rdot = 2.0;
    CHECK(super_barrier_admissible(p, 2.0));
}

TEST_CASE("matched speed: no detachment, solution hugs the obstacle") {
    auto g = make_constant_forcing(2, 1.0);
    SchemeParams params;
    double dx = 1.0 / 16.0;
    auto sub = evolve_sub(plane_problem(1.0), g, params, 1.0, dx);
    REQUIRE(!sub.t.empty());
    CHECK(sub.max_gap.back() <= 2.0 * dx);
    CHECK(sub.min_gap.back() >= -1e-12);  // projection keeps u <= O exactly
    CHECK(sub.touching_fraction.back() > 0.9);

    auto sup = evolve_super(plane_problem(1.0), g, params, 1.0, dx);
    CHECK(sup.max_gap.back() <= 2.0 * dx);
    CHECK(sup.min_gap.back() >= -1e-12);
}

TEST_CASE("fast obstacle detaches from a slow medium at rate s - g") {
    auto g = make_constant_forcing(2, 1.0);
    SchemeParams params;
    double dx = 1.0 / 16.0, T = 0.75;
    auto run = evolve_sub(plane_problem(2.0), g, params, T, dx);
    REQUIRE(!run.t.empty());
    double expect = (2.0 - 1.0) * run.t.back();
    CHECK(run.axis_gap.back() == doctest::Approx(expect).epsilon(0.1));
}

TEST_CASE("slow obstacle: the obstacle itself is the subsolution") {
    auto g = make_constant_forcing(2, 1.0);
    SchemeParams params;
    double dx = 1.0 / 16.0;
    auto run = evolve_sub(plane_problem(0.5), g, params, 0.75, dx);
    CHECK(run.max_gap.back() <= 2.0 * dx);
}

TEST_CASE("slow obstacle detaches downward from the supersolution") {
    auto g = make_constant_forcing(2, 1.0);
    SchemeParams params;
    double dx = 1.0 / 16.0, T = 0.75;
    auto run = evolve_super(plane_problem(0.5), g, params, T, dx);
    double expect = (1.0 - 0.5) * run.t.back();
    CHECK(run.axis_gap.back() == doctest::Approx(expect).epsilon(0.1));

    auto fast = evolve_super(plane_problem(3.0), g, params, T, dx);
    CHECK(fast.max_gap.back() <= 2.0 * dx);
}

TEST_CASE("static supersolution barrier falls back to obstacle clamping") {
    auto g = make_sinusoidal_forcing(2, 2.0, 0.9);
    SchemeParams params;
    auto run = evolve_super(plane_problem(1.3), g, params, 0.25, 1.0 / 16.0);
    CHECK(run.barrier_fallback);
}

TEST_CASE("birkhoff shifts: admissible cases stay within scheme error") {
    SchemeParams params;
    double dx = 1.0 / 16.0;
    auto g1 = make_constant_forcing(2, 1.0);

    auto run = [&](BirkhoffCheck chk, ObstacleProblem p, const ForcingField& g) {
        auto rep = check_birkhoff(chk, p, g, params, dx);
        CHECK(rep.admissible);
        CHECK(rep.nodes_checked > 0);
        CHECK(rep.max_violation <= 3.0 * dx);
    };

    BirkhoffCheck chk;
    SUBCASE("expanding sub, axial shift") {
        chk.variant = BirkhoffVariant::expanding_sub;
        chk.dz = {0, 1, 0};
        chk.dt = 1.0;
        run(chk, plane_problem(1.0, 1.5, 1.0), g1);
    }
    SUBCASE("expanding sub, slanted shift") {
        chk.variant = BirkhoffVariant::expanding_sub;
        chk.dz = {1, 1, 0};
        chk.dt = 1.0;
        run(chk, plane_problem(1.0, 1.5, 1.0), g1);
    }
    SUBCASE("expanding super") {
        chk.variant = BirkhoffVariant::expanding_super;
        chk.dz = {0, 1, 0};
        chk.dt = 1.2;
        run(chk, plane_problem(1.0, 1.5, 1.0), g1);
    }
    SUBCASE("static pair sub") {
        chk.variant = BirkhoffVariant::static_sub;
        chk.dz = {1, 1, 0};
        chk.dt = 1.0;
        chk.R2 = 2.5;
        run(chk, plane_problem(1.0, 1.5, 0.0), g1);
    }
    SUBCASE("static pair super") {
        chk.variant = BirkhoffVariant::static_super;
        chk.dz = {0, 1, 0};
        chk.dt = 1.2;
        chk.R2 = 2.5;
        run(chk, plane_problem(1.0, 1.5, 0.0), g1);
    }
    SUBCASE("shrinking sub") {
        chk.variant = BirkhoffVariant::shrinking_sub;
        chk.dz = {0, 1, 0};
        chk.dt = 1.2;
        run(chk, plane_problem(1.0, 2.0, -0.5), g1);
    }
    SUBCASE("shrinking super") {
        chk.variant = BirkhoffVariant::shrinking_super;
        chk.dz = {0, 2, 0};
        chk.dt = 1.5;
        run(chk, plane_problem(1.0, 2.0, -0.5), g1);
    }
    SUBCASE("laminar forcing allows a real axial component") {
        auto gl = make_laminar(make_constant_forcing(1, 1.0));
        chk.variant = BirkhoffVariant::expanding_sub;
        chk.dz = {1, 0.6, 0};
        chk.dt = 0.5;
        chk.laminar = true;
        run(chk, plane_problem(1.0, 1.5, 2.0), gl);
    }
}

TEST_CASE("birkhoff shifts: inadmissible pairs are rejected with the inequality") {
    SchemeParams params;
    auto g1 = make_constant_forcing(2, 1.0);
    BirkhoffCheck chk;
    chk.variant = BirkhoffVariant::expanding_sub;
    chk.dz = {0, -1, 0};  // dz.nu <= 0
    chk.dt = 0.0;
    CHECK_THROWS_WITH_AS(
        check_birkhoff(chk, plane_problem(1.0, 1.5, 1.0), g1, params, 1.0 / 16.0),
        doctest::Contains("precondition violated"), error);

    chk.dz = {0, 1, 0};
    chk.dt = 2.0;  // s dt = 2 > dz.nu
    CHECK_THROWS_AS(
        check_birkhoff(chk, plane_problem(1.0, 1.5, 1.0), g1, params, 1.0 / 16.0), error);

    // non-integer shift without the laminar escape hatch
    chk.dz = {0.5, 1, 0};
    chk.dt = 1.0;
    CHECK_THROWS_AS(
        check_birkhoff(chk, plane_problem(1.0, 1.5, 1.0), g1, params, 1.0 / 16.0), error);
}

TEST_CASE("local comparison: constant forcing is not applicable") {
    auto g = make_constant_forcing(2, 1.0);
    SchemeParams params;
    auto rep = check_lcp({0, 1, 0}, 2, 1.0, 1.0, g, params, 0.5, 1.0 / 16.0, 100.0);
    CHECK_FALSE(rep.applicable);
    CHECK(!rep.detail.empty());
}

TEST_CASE("local comparison rejects an undersized cylinder radius") {
    auto g = make_sinusoidal_forcing(2, 2.0, 0.9);
    SchemeParams params;
    CHECK_THROWS_AS(check_lcp({0, 1, 0}, 2, 1.3, 2.7, g, params, 0.5, 1.0 / 16.0, 1.0),
                    error);
}

TEST_CASE("local comparison for the laminar construction forcing") {
    auto cf = make_corollary_forcing(reference_corollary_params());
    auto g = make_laminar(cf.gprime);
    double R = 12.0 * (3 * 3 + g.M0 + 27.0) / g.L0;
    SchemeParams params;
    double s1 = cf.s_tail_ub + 0.5, s2 = cf.s_head_lb - 0.5;
    auto rep = check_lcp({0, 0, 1}, 3, s1, s2, g, params, 0.1, 1.0 / 8.0, R);
    CHECK(rep.applicable);
    CHECK(rep.ordering_holds);
    CHECK(rep.min_margin > 0);
    CHECK(rep.xi0 == std::array<long long, 3>{0, 0, 2});

    // negative control: the reversed shift breaks the ordering
    auto neg = check_lcp({0, 0, 1}, 3, s1, s2, g, params, 0.1, 1.0 / 8.0, R, true);
    CHECK_FALSE(neg.ordering_holds);
    CHECK(neg.min_margin < 0);
}
