#pragma once

#include <optional>
#include <vector>

#include "ckam/grid.hpp"
#include "ckam/hamiltonian.hpp"

namespace ckam {

/// Diagnostics of a fixed-point run.
struct SolveReport {
    bool converged = false;
    long iterations = 0;
    double sup_update = 0.0;
    /// Mean value change per unit time over the last quarter of iterations.
    double drift_rate = 0.0;
    /// Sup norm of the convex-upwind residual over non-kink nodes.
    double residual_linf = 0.0;
};

/// One backward dynamic-programming step on grid nodes:
///   T[u](x_i) = min over nodes y with circle_dist(x_i, y) <= dt*v_max of
///               u(y) + dt*( L(y, (x_i - y)/dt, u_arg(y)) + c ),
/// where u_arg is u itself (contact mode) or the frozen constant theta.
/// Velocity differences take the minimal image.  The chosen node index is
/// recorded per target node.
///
/// Preconditions (checked): dt * sup|dL/du| <= 1 (monotonicity CFL) and
/// dt * v_max >= h (neighbor reachability).
class LaxOleinikOperator {
public:
    /// Contact mode: the Lagrangian sees the evolving u.
    LaxOleinikOperator(const LagrangianView& view, const TorusGrid1D& grid,
                       double dt, double c, double v_max);

    /// Frozen mode: the Lagrangian sees the constant theta instead of u.
    LaxOleinikOperator(const LagrangianView& view, const TorusGrid1D& grid,
                       double dt, double c, double v_max, double frozen_theta);

    /// Applies the operator; argmin (if non-null) receives the chosen source
    /// node index for every target node.
    GridFunction apply(const GridFunction& u, std::vector<int>* argmin = nullptr) const;

    double dt() const { return dt_; }
    double c() const { return c_; }
    const TorusGrid1D& grid() const { return grid_; }
    int window() const { return window_; }

private:
    void init(const LagrangianView& view, double v_max);

    const LagrangianView* view_;
    TorusGrid1D grid_;
    double dt_;
    double c_;
    double v_max_;
    bool frozen_ = false;
    double theta_ = 0.0;
    int window_ = 0;
    bool affine_ = false;
    // Affine fast path: candidate(i,k) = w[y]*u[y] + q[y] + ke[k+window].
    std::vector<double> w_, q_, ke_;
};

/// A converged (or abandoned) stationary run together with the final
/// backward-step pointers, which backward_curve consumes.
struct StationarySolution {
    GridFunction u;
    SolveReport report;
    std::vector<int> argmin;
    double c = 0.0;
    double dt = 0.0;
};

/// Iterates the contact operator from `init` until sup_update <= tol_fix or
/// max_iter; stops early (converged = false) if the iterate sup-norm passes
/// 1e6, recording the drift sign.
StationarySolution solve_stationary(const LagrangianView& view,
                                    const TorusGrid1D& grid, double c, double dt,
                                    const GridFunction& init, double tol_fix,
                                    long max_iter, double v_max);

/// Critical value of the frozen Hamiltonian H(x, p, theta): iterates the
/// classical operator with c = 0; the iterates drift at rate -c(theta) per
/// unit time, and the estimate averages the mean step increment over the
/// last half of the run.  Throws std::runtime_error if the drift has not
/// stabilized (needs more iterations).
double frozen_critical_value(const LagrangianView& view, const TorusGrid1D& grid,
                             double theta, double dt, long n_iter, double v_max);

/// Result of the admissibility bisection.
struct AdmissibleProbe {
    double c_lo = 0.0;     // final bracket, divergent side
    double c_hi = 0.0;     // final bracket, admissible side
    bool attained = false; // full solve at c_hi converged
    bool bracket_valid = false; // endpoints behaved differently
    long evaluations = 0;
};

/// Brackets inf of the admissible-constant interval by bisection on the
/// drift sign of budget-bounded runs from u = 0.  A trial c counts as
/// "below" when the settled drift rate is < -2.5e-4 without convergence.
/// If both endpoints classify the same way the probe reports
/// bracket_valid = false instead of bisecting.
AdmissibleProbe admissible_interval_probe(const LagrangianView& view,
                                          const TorusGrid1D& grid, double dt,
                                          double c_lo, double c_hi, int n_bisect,
                                          long iter_budget, double v_max);

/// Discrete backward calibrated curve extracted from the argmin chain.
struct CalibratedCurve {
    struct Sample {
        double x = 0.0;
        /// Forward-in-time velocity (x_k - x_{k+1})/dt (minimal image) of the
        /// segment arriving here from the next-earlier sample; equivalently,
        /// the velocity leaving samples[k+1].x.  The earliest sample copies
        /// its neighbor.
        double v = 0.0;
    };
    double T = 0.0;
    double dt = 0.0;
    /// samples[0] is the endpoint; samples[k] sits k*dt earlier in time.
    std::vector<Sample> samples;
    /// |u(x_end) - u(x_K) - sum dt*(L + c)| over the whole chain.
    double calibration_defect = 0.0;
};

/// Follows the recorded argmin pointers n_steps backward from the node
/// nearest x0.  Requires a converged solution.
CalibratedCurve backward_curve(const LagrangianView& view,
                               const StationarySolution& sol, double x0,
                               long n_steps);

/// Convex-upwind residual r_i = H(x_i, D^- or D^+, u_i) - c, where the side
/// with the larger-magnitude value is reported (for convex H the subsolution
/// test needs both one-sided slopes).  Nodes whose one-sided-slope gap
/// exceeds 10*h*lip(u) are flagged as kinks and excluded from the sup norm.
struct ResidualReport {
    GridFunction r;
    std::vector<unsigned char> kink;
    std::vector<double> du_upwind;  // the slope whose evaluation was reported
    double sup_away = 0.0;          // sup |r| over non-kink nodes
    int n_kinks = 0;
};

/// Contact residual (u feeds the Hamiltonian's scalar slot), or frozen
/// residual when frozen_theta is set.
ResidualReport residual(const ContactHamiltonianSpec& spec, const GridFunction& u,
                        double c, std::optional<double> frozen_theta = {});

/// Fixed points reached from the constant initial ladder u = kappa.  Members
/// whose pairwise sup distance exceeds 10*tol_fix count as distinct; the
/// returned list keeps one representative per distinct fixed point, in
/// ladder order.
std::vector<StationarySolution> solution_ladder(const LagrangianView& view,
                                                const TorusGrid1D& grid, double c,
                                                double dt,
                                                const std::vector<double>& kappas,
                                                double tol_fix, long max_iter,
                                                double v_max);

} // namespace ckam
