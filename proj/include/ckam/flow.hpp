#pragma once

#include <vector>

#include "ckam/grid.hpp"
#include "ckam/hamiltonian.hpp"
#include "ckam/measures.hpp"

namespace ckam {

/// One sample of an integrated characteristic.  The middle slot holds the
/// momentum p on the hamiltonian side and the velocity v on the lagrangian
/// side.
struct PhasePoint {
    double x = 0.0;       // wrapped to [0, period)
    double p_or_v = 0.0;
    double u = 0.0;
};

/// Fixed-step RK4 run of one of the two characteristic systems.  samples[k]
/// sits at time k*dt; energy[k] and multiplier[k] carry H(x, p, u) and
/// -dH/du at the same instant (with p the dual momentum of v on the
/// lagrangian side).  A run that trips the 1e8 blow-up guard stops early
/// with blew_up set; the recorded samples are the finite prefix.
struct Trajectory {
    enum class Side { hamiltonian, lagrangian };
    Side side = Side::hamiltonian;
    double dt = 0.0;
    bool blew_up = false;
    std::vector<PhasePoint> samples;
    std::vector<double> energy;
    std::vector<double> multiplier;
    /// Max over every 64th step of the one-step Richardson defect
    /// |full step - two half steps|_inf; a cheap integrator self-check that
    /// does not alter the trajectory itself.
    double sampled_defect = 0.0;
};

/// Characteristic system of H relative to the level c:
///   x' = dH/dp,   p' = -dH/dx - dH/du * p,   u' = p * dH/dp - H + c.
/// Classical RK4 with step dt in (0, 1e-2]; T >= 0 is rounded to the
/// nearest whole number of steps.
Trajectory integrate_contact(const ContactHamiltonianSpec& spec, double c,
                             PhasePoint start, double T, double dt);

/// Velocity-chart system, in closed form for specs with quadratic kinetic
/// energy (dL/dv = v):
///   x' = v,   v' = dL/dx + dL/du * v,   u' = L + c.
/// Throws std::logic_error for specs without that structure.
Trajectory integrate_el(const LagrangianView& view, double c, PhasePoint start,
                        double T, double dt);

/// Deviation report of the support-invariance and graph checks.
struct InvarianceReport {
    /// Max over lifted support points and sample times of the distance
    /// max(circle dx, |dp|, |du|) from the trajectory to the lifted set.
    double max_set_distance = 0.0;
    /// Max over sample times of |p(t) - du_upwind(node nearest x(t))|; an
    /// empirical gauge of the graph's Lipschitz inverse, reported without a
    /// pass/fail bound.
    double max_graph_gap_p = 0.0;
    /// Max over sample times of |u(t) - u interpolated at x(t)|.
    double max_graph_gap_u = 0.0;
    bool any_blow_up = false;
};

/// Lifts every support cell (x_i, v_j) of mu to the phase point
/// (x_i, dL/dv(x_i, v_j, u(x_i)), u(x_i)), integrates the hamiltonian-side
/// system from each lift for time T, and reports the worst excursion from
/// the lifted set together with graph-tracking gaps.  The lifts fan out
/// across worker threads and reduce by max.  mu must live on u's grid.
InvarianceReport mather_invariance_check(const LagrangianView& view,
                                         const GridFunction& u, double c,
                                         const DiscreteMeasure& mu, double T,
                                         double dt);

} // namespace ckam
