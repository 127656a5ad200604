#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mcfh/forcing.hpp"

using namespace mcfh;

TEST_CASE("constant forcing validates with exact bounds") {
    auto g = make_constant_forcing(2, 1.0);
    auto rep = validate_hypothesis(g, 16);
    CHECK(rep.ok);
    CHECK(rep.m0_est == doctest::Approx(1.0));
    CHECK(rep.M0_est == doctest::Approx(1.0));
    CHECK(rep.L0_est == doctest::Approx(0.0));
}

TEST_CASE("constant forcing rejects nonpositive values") {
    CHECK_THROWS_AS(make_constant_forcing(2, 0.0), error);
    CHECK_THROWS_AS(make_constant_forcing(2, -1.0), error);
}

TEST_CASE("sinusoidal forcing bounds are attained on a dense lattice") {
    auto g = make_sinusoidal_forcing(2, 1.0, 0.5);
    auto rep = validate_hypothesis(g, 64);
    CHECK(rep.ok);
    CHECK(rep.m0_est >= 0.5);
    CHECK(rep.m0_est <= 0.5 + 1e-9);
    CHECK(rep.M0_est >= 1.5 - 1e-9);
    CHECK(rep.M0_est <= 1.5);
}

TEST_CASE("sinusoidal forcing must stay positive") {
    CHECK_THROWS_AS(make_sinusoidal_forcing(2, 1.0, 1.0), error);
    CHECK_THROWS_AS(make_sinusoidal_forcing(2, 1.0, -1.5), error);
}

TEST_CASE("a field with a nonpositive sample is rejected") {
    ForcingField f;
    f.dim = 2;
    f.m0 = 0.1;
    f.M0 = 1.0;
    f.L0 = 10.0;
    f.evaluator = [](const Vec& x) { return x[0]; };  // zero at the origin
    CHECK_THROWS_AS(validate_hypothesis(f, 8), error);
}

TEST_CASE("declared bounds tighter than the field are flagged") {
    auto g = make_sinusoidal_forcing(2, 2.0, 0.9);
    g.M0 = 2.0;  // understate the upper bound
    auto rep = validate_hypothesis(g, 32);
    CHECK_FALSE(rep.ok);
    CHECK(!rep.detail.empty());
}

TEST_CASE("grid-sampled forcing interpolates its samples periodically") {
    std::vector<double> samples{1.0, 2.0, 3.0, 4.0};
    auto g = make_grid_sampled_forcing(2, samples, {2, 2});
    CHECK(g.m0 == doctest::Approx(1.0));
    CHECK(g.M0 == doctest::Approx(4.0));
    CHECK(g(vec2(0.0, 0.0)) == doctest::Approx(1.0));
    CHECK(g(vec2(0.5, 0.0)) == doctest::Approx(2.0));
    CHECK(g(vec2(0.0, 0.5)) == doctest::Approx(3.0));
    CHECK(g(vec2(0.25, 0.0)) == doctest::Approx(1.5));   // midpoint
    CHECK(g(vec2(0.75, 0.0)) == doctest::Approx(1.5));   // periodic wrap
    CHECK(g(vec2(-0.25, 0.0)) == doctest::Approx(1.5));  // negative wrap
    auto rep = validate_hypothesis(g, 16);
    CHECK(rep.ok);
}

TEST_CASE("grid-sampled forcing validates its inputs") {
    CHECK_THROWS_AS(make_grid_sampled_forcing(2, {1.0, 2.0}, {2, 2}), error);
    CHECK_THROWS_AS(make_grid_sampled_forcing(2, {1.0, 2.0, 3.0, 0.0}, {2, 2}), error);
    CHECK_THROWS_AS(make_grid_sampled_forcing(1, {1.0}, {1}), error);
}

TEST_CASE("reference construction parameters give the documented speed bounds") {
    auto p = reference_corollary_params();
    CHECK(p.n == 3);
    CHECK(p.r1 == doctest::Approx(0.15));
    auto cf = make_corollary_forcing(p);
    // head bound 45 - sqrt(2) * 3 / 0.15, tail bound 2 / 0.2 + 1
    CHECK(cf.s_head_lb == doctest::Approx(45.0 - std::sqrt(2.0) * 3.0 / 0.15));
    CHECK(cf.s_head_lb == doctest::Approx(16.7157).epsilon(1e-4));
    CHECK(cf.s_tail_ub == doctest::Approx(11.0));
    CHECK(cf.s_head_lb > cf.s_tail_ub);
}

TEST_CASE("invalid construction parameters are rejected with a quoted inequality") {
    auto p = reference_corollary_params();
    p.r1 = 0.3;  // violates r1 < r2
    CHECK_THROWS_AS(validate_corollary_params(p), error);
    try {
        validate_corollary_params(p);
    } catch (const error& e) {
        CHECK(std::string(e.what()).find("r1") != std::string::npos);
    }

    p = reference_corollary_params();
    p.sigma = 10.0;  // violates the sigma upper bound
    CHECK_THROWS_AS(validate_corollary_params(p), error);

    p = reference_corollary_params();
    p.g_low = 2.0;  // violates g_low < min(sigma, n - 2)
    CHECK_THROWS_AS(validate_corollary_params(p), error);

    p = reference_corollary_params();
    p.n = 2;
    CHECK_THROWS_AS(validate_corollary_params(p), error);
}

TEST_CASE("constructed field respects its plateaus") {
    auto cf = make_corollary_forcing(reference_corollary_params());
    const auto& g = cf.gprime;
    const auto& p = cf.params;
    CHECK(g.dim == 2);  // forcing lives on the (n-1)-torus
    // g = g_high on B(y1, r1)
    CHECK(g(p.y1) == doctest::Approx(p.g_high));
    CHECK(g(vec2(p.y1[0] + 0.99 * p.r1, p.y1[1])) == doctest::Approx(p.g_high));
    // g = g_low outside B(y2, r2)
    CHECK(g(vec2(p.y2[0] + 1.01 * p.r2, p.y2[1])) == doctest::Approx(p.g_low));
    CHECK(g(vec2(0.0, 0.0)) == doctest::Approx(p.g_low));
    // bounds hold everywhere sampled
    auto rep = validate_hypothesis(g, 48);
    CHECK(rep.ok);
}

TEST_CASE("laminar lift of a constant is the same constant") {
    auto c = make_constant_forcing(1, 2.5);
    auto g = make_laminar(c);
    CHECK(g.dim == 2);
    CHECK(g(vec2(0.3, 7.9)) == doctest::Approx(2.5));
}

TEST_CASE("laminar lift is independent of the last coordinate") {
    auto cf = make_corollary_forcing(reference_corollary_params());
    auto g = make_laminar(cf.gprime);
    CHECK(g.dim == 3);
    Rng rng(42);
    for (int i = 0; i < 10; ++i) {
        double x = rng.uniform(), y = rng.uniform();
        double a = rng.uniform(-5.0, 5.0), b = rng.uniform(-5.0, 5.0);
        CHECK(g(vec3(x, y, a)) == g(vec3(x, y, b)));
    }
}
