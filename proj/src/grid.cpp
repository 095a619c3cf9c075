#include "ckam/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ckam {

TorusGrid1D TorusGrid1D::make(double period, int n_nodes) {
    if (!(period > 0.0) || !std::isfinite(period))
        throw std::invalid_argument("TorusGrid1D: period must be positive");
    if (n_nodes < 16)
        throw std::invalid_argument("TorusGrid1D: need at least 16 nodes");
    return TorusGrid1D{period, n_nodes};
}

double TorusGrid1D::wrap(double x) const {
    double y = x - period * std::floor(x / period);
    if (y >= period) y -= period;   // guards the x = -eps rounding case
    if (y < 0.0) y = 0.0;
    return y;
}

double TorusGrid1D::min_image(double a, double b) const {
    double d = wrap(a - b + 0.5 * period) - 0.5 * period;
    if (d >= 0.5 * period) d -= period;
    return d;
}

double TorusGrid1D::circle_dist(double a, double b) const {
    return std::abs(min_image(a, b));
}

int TorusGrid1D::nearest_index(double x) const {
    const int i = static_cast<int>(std::lround(wrap(x) / h()));
    return i % n_nodes;
}

void TorusGrid1D::locate(double x, int& i, double& frac) const {
    const double y = wrap(x) / h();
    i = static_cast<int>(std::floor(y));
    if (i >= n_nodes) i = n_nodes - 1;
    frac = y - i;
    if (frac < 0.0) frac = 0.0;
    if (frac >= 1.0) frac = std::nextafter(1.0, 0.0);
}

VelocityGrid VelocityGrid::make(double v_max, int m_nodes) {
    if (!(v_max > 0.0) || !std::isfinite(v_max))
        throw std::invalid_argument("VelocityGrid: v_max must be positive");
    if (m_nodes < 3 || m_nodes % 2 == 0)
        throw std::invalid_argument("VelocityGrid: m_nodes must be odd and >= 3");
    return VelocityGrid{v_max, m_nodes};
}

int VelocityGrid::nearest_index(double v) const {
    const int j = static_cast<int>(std::lround((v + v_max) / dv()));
    return std::clamp(j, 0, m_nodes - 1);
}

GridFunction GridFunction::make(const TorusGrid1D& grid, std::vector<double> values) {
    if (static_cast<int>(values.size()) != grid.n_nodes)
        throw std::invalid_argument("GridFunction: value count != node count");
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument("GridFunction: values must be finite");
    return GridFunction{grid, std::move(values)};
}

GridFunction GridFunction::constant(const TorusGrid1D& grid, double value) {
    return make(grid, std::vector<double>(static_cast<size_t>(grid.n_nodes), value));
}

double GridFunction::interp(double x) const {
    int i = 0;
    double frac = 0.0;
    grid.locate(x, i, frac);
    const int ip = (i + 1) % grid.n_nodes;
    return (1.0 - frac) * values[static_cast<size_t>(i)] +
           frac * values[static_cast<size_t>(ip)];
}

double GridFunction::lip() const {
    const int n = grid.n_nodes;
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = std::abs(values[static_cast<size_t>((i + 1) % n)] -
                                  values[static_cast<size_t>(i)]);
        m = std::max(m, d);
    }
    return m / grid.h();
}

double GridFunction::sup_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

static void require_same_grid(const GridFunction& a, const GridFunction& b) {
    if (a.grid.n_nodes != b.grid.n_nodes || a.grid.period != b.grid.period)
        throw std::invalid_argument("GridFunction: grids differ");
}

double GridFunction::max_difference(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a, b);
    double m = -HUGE_VAL;
    for (size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, a.values[i] - b.values[i]);
    return m;
}

double GridFunction::sup_distance(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a, b);
    double m = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

} // namespace ckam
