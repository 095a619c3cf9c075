#pragma once

#include <cstddef>
#include <vector>

namespace ckam {

/// Uniform periodic grid on the circle R/(period Z) with nodes x_i = i*h,
/// h = period/n_nodes.  Node n_nodes would coincide with node 0 and is not
/// stored.
struct TorusGrid1D {
    double period = 1.0;
    int n_nodes = 0;

    /// Validates period > 0 and n_nodes >= 16 (throws std::invalid_argument).
    static TorusGrid1D make(double period, int n_nodes);

    double h() const { return period / n_nodes; }
    double node(int i) const { return i * h(); }

    /// Canonical representative in [0, period).
    double wrap(double x) const;

    /// Signed minimal-image difference a - b, in [-period/2, period/2).
    double min_image(double a, double b) const;

    /// Circle distance, in [0, period/2].
    double circle_dist(double a, double b) const;

    /// Index of the node nearest to x (mod period).
    int nearest_index(double x) const;

    /// Splits wrap(x) as node(i) + frac*h with i in [0, n_nodes) and
    /// frac in [0, 1).  Used by periodic linear interpolation.
    void locate(double x, int& i, double& frac) const;
};

/// Symmetric uniform velocity grid v_j on [-v_max, v_max].  m_nodes is odd so
/// that v = 0 is a node (index (m_nodes-1)/2).
struct VelocityGrid {
    double v_max = 0.0;
    int m_nodes = 0;

    /// Validates v_max > 0 and m_nodes odd, >= 3.
    static VelocityGrid make(double v_max, int m_nodes);

    double dv() const { return 2.0 * v_max / (m_nodes - 1); }
    double node(int j) const { return -v_max + j * dv(); }
    int zero_index() const { return (m_nodes - 1) / 2; }
    int nearest_index(double v) const;
};

/// Real-valued function sampled at the nodes of a TorusGrid1D.
struct GridFunction {
    TorusGrid1D grid;
    std::vector<double> values;

    /// Validates the size match and that all values are finite.
    static GridFunction make(const TorusGrid1D& grid, std::vector<double> values);

    /// Constant function.
    static GridFunction constant(const TorusGrid1D& grid, double value);

    double operator[](int i) const { return values[static_cast<size_t>(i)]; }
    double& operator[](int i) { return values[static_cast<size_t>(i)]; }

    /// Periodic linear interpolation at an arbitrary point.
    double interp(double x) const;

    /// Discrete Lipschitz constant max_i |u_{i+1} - u_i| / h (circular).
    double lip() const;

    double sup_abs() const;

    /// Pointwise max_i (a_i - b_i); requires identical grids.
    static double max_difference(const GridFunction& a, const GridFunction& b);

    /// sup_i |a_i - b_i|; requires identical grids.
    static double sup_distance(const GridFunction& a, const GridFunction& b);
};

} // namespace ckam
