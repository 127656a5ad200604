#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mcfh/util.hpp"

namespace mcfh {

enum class Topo { periodic, clamped };

// Uniform grid on a box, dim = 2 or 3. Periodic axes support an additive value
// shift per period crossing (wrap_value), which represents planar data
// u = -x.nu on a single lateral period: u(x + P e_j) = u(x) - P nu_j.
// window_offset is the accumulated integer lattice shift of the moving window;
// physical coordinates include it so the forcing phase is preserved exactly.
struct Grid {
    int dim = 2;
    std::array<int, 3> shape{4, 4, 1};
    double dx = 1.0;
    Vec origin{0, 0, 0};
    std::array<Topo, 3> topo{Topo::clamped, Topo::clamped, Topo::clamped};
    std::array<double, 3> wrap_value{0, 0, 0};
    Vec window_offset{0, 0, 0};

    long long ncells() const {
        long long n = 1;
        for (int a = 0; a < dim; ++a) n *= shape[a];
        return n;
    }
    long long index(int i, int j, int k = 0) const {
        if (dim == 2) return static_cast<long long>(j) * shape[0] + i;
        return (static_cast<long long>(k) * shape[1] + j) * shape[0] + i;
    }
    Vec point(int i, int j, int k = 0) const {
        Vec p{0, 0, 0};
        int idx[3] = {i, j, k};
        for (int a = 0; a < dim; ++a) p[a] = origin[a] + idx[a] * dx + window_offset[a];
        return p;
    }
    double period(int axis) const { return shape[axis] * dx; }
    void validate() const;
};

struct LevelSetField {
    Grid grid;
    std::vector<double> v;
    double time = 0.0;
    double eps = 1.0;

    double& at(int i, int j, int k = 0) { return v[grid.index(i, j, k)]; }
    double at(int i, int j, int k = 0) const { return v[grid.index(i, j, k)]; }

    // Stencil access with topology handling: periodic axes wrap and add the
    // per-period value shift, clamped axes extend the boundary value.
    double sample(int i, int j, int k = 0) const {
        double shift = 0.0;
        int idx[3] = {i, j, k};
        for (int a = 0; a < grid.dim; ++a) {
            int m = grid.shape[a];
            if (idx[a] >= 0 && idx[a] < m) continue;
            if (grid.topo[a] == Topo::clamped) {
                idx[a] = idx[a] < 0 ? 0 : m - 1;
            } else {
                int w = idx[a] >= 0 ? idx[a] / m : -((-idx[a] - 1) / m + 1);
                idx[a] -= w * m;
                shift += w * grid.wrap_value[a];
            }
        }
        return v[grid.index(idx[0], idx[1], idx[2])] + shift;
    }

    void fill(const std::function<double(const Vec&)>& f);
};

// u0 = -x.nu on a slab grid: one lateral period wide (quasi-periodic wrap),
// clamped along the last axis. `height` is the slab extent along the last
// axis, centered on front position 0.
LevelSetField make_planar_field(int dim, const Vec& nu, double dx, double height,
                                double eps = 1.0);

}  // namespace mcfh
