#include "mcfh/grid.hpp"

namespace mcfh {

void Grid::validate() const {
    if (dim != 2 && dim != 3) throw error("grid: dim must be 2 or 3");
    if (dx <= 0) throw error("grid: dx must be positive");
    for (int a = 0; a < dim; ++a)
        if (shape[a] < 4) throw error("grid: shape components must be >= 4");
}

void LevelSetField::fill(const std::function<double(const Vec&)>& f) {
    v.resize(grid.ncells());
    int mk = grid.dim == 3 ? grid.shape[2] : 1;
    for (int k = 0; k < mk; ++k)
        for (int j = 0; j < grid.shape[1]; ++j)
            for (int i = 0; i < grid.shape[0]; ++i)
                at(i, j, k) = f(grid.point(i, j, k));
}

LevelSetField make_planar_field(int dim, const Vec& nu, double dx, double height,
                                double eps) {
    if (std::abs(norm(nu, dim) - 1.0) > 1e-12) throw error("planar field: nu must be a unit vector");
    int lateral = static_cast<int>(std::llround(1.0 / dx));
    if (std::abs(lateral * dx - 1.0) > 1e-12)
        throw error("planar field: dx must divide the unit period");
    int axial = static_cast<int>(std::llround(height / dx));

    LevelSetField f;
    f.eps = eps;
    f.grid.dim = dim;
    f.grid.dx = dx;
    f.grid.shape = {lateral, dim == 2 ? axial : lateral, dim == 3 ? axial : 1};
    int pa = dim - 1;  // propagation axis
    for (int a = 0; a < dim; ++a) {
        f.grid.topo[a] = a == pa ? Topo::clamped : Topo::periodic;
        f.grid.origin[a] = a == pa ? -height / 2.0 : 0.0;
        // u = -x.nu drops by one period's worth of nu_a per lateral wrap
        f.grid.wrap_value[a] = a == pa ? 0.0 : -1.0 * nu[a];
    }
    f.v.resize(f.grid.ncells());
    f.fill([&nu, dim](const Vec& x) { return -dot(x, nu, dim); });
    return f;
}

}  // namespace mcfh
