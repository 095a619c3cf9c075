#pragma once

#include <vector>

#include "ckam/grid.hpp"

namespace ckam {

/// Closed-form stationary family of the pendulum preset at c = 0:
///   u_lam(x) = 1 - (cos(pi x)/pi + lam)^2   on [0, 1/2),
///              1 - (lam - cos(pi x)/pi)^2   on [1/2, 1),
/// extended 1-periodically.  Continuous for every lam >= 0 with a kink at
/// x = 1/2 (slope jump 4 lam); C^1 exactly at lam = 0.  The family strictly
/// decreases as lam grows.
double pendulum_family_solution(double x, double lam);

GridFunction sample_pendulum_family(const TorusGrid1D& grid, double lam);

/// One branch of the separatrix ODE of the period-2 preset,
///   g'(x) = sign * sqrt(2(1 - cos 2 pi x) - 2(1 + cos 2 pi x) g),
/// integrated leftward on [1/2, 1] from the degenerate point g(1) = 0.  The
/// start is regularized by the quadratic ansatz g = tail_coeff * (x - 1)^2
/// on [1 - eps, 1]: tail_coeff = k for the negative root and -(k + 1) for
/// the positive root, where k > 0 solves k^2 + k = pi^2.
struct SeparatrixBranch {
    bool positive_root = true;
    double eps = 0.0;          // width of the quadratic tail at x = 1
    double tail_coeff = 0.0;
    double g_half = 0.0;       // g(1/2)
    std::vector<double> x;     // ascending sample abscissas on [1/2, 1 - eps]
    std::vector<double> g;

    /// Value anywhere on [1/2, 1]: table interpolation, or the quadratic
    /// tail past 1 - eps.
    double eval(double x) const;
};

/// The positive root of k^2 + k = pi^2 (quadratic-ansatz curvature at the
/// degenerate endpoint).
double separatrix_tail_curvature();

/// Integrates the chosen branch with fixed-step RK4 (step <= 1e-4 keeps the
/// discretization error well under the assembly tolerances).
SeparatrixBranch integrate_separatrix(bool positive_root, double step = 1e-4,
                                      double eps = 1e-3);

/// Raw leftward RK4 on g' = sign*sqrt(radicand) from (x0, g0) down to 1/2.
/// The radicand is clamped at zero to absorb roundoff, but a dip below
/// -1e-4 * max(1, |g|) means the point left the branch's validity region
/// and throws.  Returned samples are ascending in x.
std::vector<std::pair<double, double>> integrate_g_ode(double sign, double x0,
                                                       double g0, double step);

/// Assembles one of the two global C^1 solutions of the period-2 preset at
/// c = 0 from its separatrix branch (which = 1 uses the positive root,
/// which = 2 the negative):
///   which = 1:  g(1/2) - (2/pi) cos(pi x) on [0,1/2) and [3/2,2),
///               g(x) on [1/2,1), g(2-x) on [1,3/2);
///   which = 2:  the same with + (2/pi) cos(pi x).
/// The grid period must be 2.
GridFunction sample_two_branch_solution(const TorusGrid1D& grid, int which,
                                        const SeparatrixBranch& branch);

/// Convenience: integrate the right branch and sample it in one call.
GridFunction piecewise_preset_solution(const TorusGrid1D& grid, int which,
                                       double step = 1e-4);

} // namespace ckam
