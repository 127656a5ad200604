#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mcfh {

// Points and directions live in at most 3 dimensions; unused components stay 0.
using Vec = std::array<double, 3>;

inline Vec vec2(double x, double y) { return {x, y, 0.0}; }
inline Vec vec3(double x, double y, double z) { return {x, y, z}; }

inline double dot(const Vec& a, const Vec& b, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a, int dim) { return std::sqrt(dot(a, a, dim)); }

inline Vec scaled(const Vec& a, double c, int dim) {
    Vec r{0, 0, 0};
    for (int i = 0; i < dim; ++i) r[i] = c * a[i];
    return r;
}

inline Vec normalized(const Vec& a, int dim) {
    double n = norm(a, dim);
    if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
    return scaled(a, 1.0 / n, dim);
}

// Component of a orthogonal to unit vector nu.
inline Vec perp(const Vec& a, const Vec& nu, int dim) {
    double an = dot(a, nu, dim);
    Vec r{0, 0, 0};
    for (int i = 0; i < dim; ++i) r[i] = a[i] - an * nu[i];
    return r;
}

inline double frac(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f = 0.0;  // guard against rounding at integers
    return f;
}

// Quintic smoothstep: C^2, S(0)=0, S(1)=1, max slope 15/8 at the midpoint.
inline double smoothstep5(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Deterministic splitmix64; used wherever tests need reproducible pseudo-random data.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    int uniform_int(int a, int b) {  // inclusive
        return a + static_cast<int>(next_u64() % static_cast<std::uint64_t>(b - a + 1));
    }
};

// Block-partitioned parallel loop. Each index is processed exactly once and
// writes only its own outputs, so results do not depend on the worker count.
inline void parallel_for(long long n, int workers, const std::function<void(long long, long long)>& body) {
    if (workers <= 1 || n < 2048) {
        body(0, n);
        return;
    }
    if (workers > static_cast<int>(std::thread::hardware_concurrency()) * 4)
        workers = std::max(1u, std::thread::hardware_concurrency() * 4);
    std::vector<std::thread> pool;
    long long chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        long long b = w * chunk, e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&body, b, e] { body(b, e); });
    }
    for (auto& t : pool) t.join();
}

// Least-squares line fit y = a + b x; returns {a, b, rms residual}.
struct LineFit {
    double intercept = 0, slope = 0, rms = 0;
};
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw error("fit_line: need >= 2 points");
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    double den = n * sxx - sx * sx;
    if (den == 0) throw error("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.rms = std::sqrt(ss / n);
    return f;
}

}  // namespace mcfh
