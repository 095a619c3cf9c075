#include "ckam/builtin_examples.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ckam {

namespace {
constexpr double kPi = 3.14159265358979323846;

double separatrix_radicand(double x, double g) {
    const double c = std::cos(2.0 * kPi * x);
    return 2.0 * (1.0 - c) - 2.0 * (1.0 + c) * g;
}
} // namespace

double pendulum_family_solution(double x, double lam) {
    x -= std::floor(x);
    const double c = std::cos(kPi * x) / kPi;
    const double s = x < 0.5 ? c + lam : lam - c;
    return 1.0 - s * s;
}

GridFunction sample_pendulum_family(const TorusGrid1D& grid, double lam) {
    std::vector<double> vals(static_cast<size_t>(grid.n_nodes));
    for (int i = 0; i < grid.n_nodes; ++i)
        vals[static_cast<size_t>(i)] = pendulum_family_solution(grid.node(i), lam);
    return GridFunction::make(grid, std::move(vals));
}

double separatrix_tail_curvature() {
    return 0.5 * (std::sqrt(1.0 + 4.0 * kPi * kPi) - 1.0);
}

std::vector<std::pair<double, double>> integrate_g_ode(double sign, double x0,
                                                       double g0, double step) {
    if (!(step > 0.0) || step > 1e-4)
        throw std::invalid_argument("integrate_g_ode: step must be in (0, 1e-4]");
    if (!(x0 > 0.5) || x0 > 1.0)
        throw std::invalid_argument("integrate_g_ode: start must lie in (1/2, 1]");

    auto slope = [&](double x, double g) {
        const double r = separatrix_radicand(x, g);
        if (r < -1e-4 * std::max(1.0, std::abs(g)))
            throw std::runtime_error(
                "integrate_g_ode: radicand persistently negative; the start "
                "point is off the separatrix branch");
        return sign * std::sqrt(std::max(0.0, r));
    };

    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<size_t>((x0 - 0.5) / step) + 2);
    double x = x0, g = g0;
    out.emplace_back(x, g);
    while (x > 0.5) {
        const double h = -std::min(step, x - 0.5);
        const double k1 = slope(x, g);
        const double k2 = slope(x + 0.5 * h, g + 0.5 * h * k1);
        const double k3 = slope(x + 0.5 * h, g + 0.5 * h * k2);
        const double k4 = slope(x + h, g + h * k3);
        g += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        x += h;
        out.emplace_back(x, g);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

SeparatrixBranch integrate_separatrix(bool positive_root, double step, double eps) {
    if (!(eps > 0.0) || eps > 0.01)
        throw std::invalid_argument("integrate_separatrix: eps must be in (0, 0.01]");
    const double k = separatrix_tail_curvature();
    SeparatrixBranch br;
    br.positive_root = positive_root;
    br.eps = eps;
    br.tail_coeff = positive_root ? -(k + 1.0) : k;
    const double sign = positive_root ? 1.0 : -1.0;
    const double g_seed = br.tail_coeff * eps * eps;
    const auto samples = integrate_g_ode(sign, 1.0 - eps, g_seed, step);
    br.x.reserve(samples.size());
    br.g.reserve(samples.size());
    for (const auto& [x, g] : samples) {
        br.x.push_back(x);
        br.g.push_back(g);
    }
    br.g_half = br.g.front();
    return br;
}

double SeparatrixBranch::eval(double xq) const {
    if (xq < 0.5 - 1e-12 || xq > 1.0 + 1e-12)
        throw std::invalid_argument("SeparatrixBranch: query outside [1/2, 1]");
    if (xq >= x.back())
        return tail_coeff * (xq - 1.0) * (xq - 1.0);
    const auto it = std::upper_bound(x.begin(), x.end(), xq);
    const size_t hi = std::min(static_cast<size_t>(it - x.begin()), x.size() - 1);
    const size_t lo = hi == 0 ? 0 : hi - 1;
    if (hi == lo) return g[lo];
    const double t = (xq - x[lo]) / (x[hi] - x[lo]);
    return g[lo] + t * (g[hi] - g[lo]);
}

GridFunction sample_two_branch_solution(const TorusGrid1D& grid, int which,
                                        const SeparatrixBranch& branch) {
    if (std::abs(grid.period - 2.0) > 1e-12)
        throw std::invalid_argument("sample_two_branch_solution: period must be 2");
    if (which != 1 && which != 2)
        throw std::invalid_argument("sample_two_branch_solution: which must be 1 or 2");
    if ((which == 1) != branch.positive_root)
        throw std::invalid_argument(
            "sample_two_branch_solution: branch sign does not match the solution");
    const double outer_sign = which == 1 ? -1.0 : 1.0;
    std::vector<double> vals(static_cast<size_t>(grid.n_nodes));
    for (int i = 0; i < grid.n_nodes; ++i) {
        const double x = grid.node(i);
        double u = 0.0;
        if (x < 0.5 || x >= 1.5)
            u = branch.g_half + outer_sign * (2.0 / kPi) * std::cos(kPi * x);
        else if (x < 1.0)
            u = branch.eval(x);
        else
            u = branch.eval(2.0 - x);
        vals[static_cast<size_t>(i)] = u;
    }
    return GridFunction::make(grid, std::move(vals));
}

GridFunction piecewise_preset_solution(const TorusGrid1D& grid, int which,
                                       double step) {
    const SeparatrixBranch branch = integrate_separatrix(which == 1, step);
    return sample_two_branch_solution(grid, which, branch);
}

} // namespace ckam
