#pragma once

#include <utility>
#include <vector>

#include "ckam/grid.hpp"
#include "ckam/hamiltonian.hpp"
#include "ckam/lax_oleinik.hpp"
#include "ckam/simplex.hpp"

namespace ckam {

/// Probability measure on the cells of a position grid times a velocity
/// grid, stored sparsely.  Construction enforces the two invariants every
/// measure in the toolkit must satisfy:
///   - total mass 1 within 1e-9, all cell masses nonnegative;
///   - closedness: with m_i = sum_j v_j mu_ij the velocity marginal, the
///     hat-stencil pairing max_k |m_{k-1} - m_{k+1}| is <= tol_closed.
struct DiscreteMeasure {
    struct Cell {
        int i = 0;        // position node
        int j = 0;        // velocity node
        double mass = 0.0;
    };

    TorusGrid1D x_grid;
    VelocityGrid v_grid;
    std::vector<Cell> cells;            // nonzero cells, ordered by (i, j)
    double closedness_residual = 0.0;

    /// Validates and normalizes the cell list (sorted, duplicates merged).
    /// Throws verification_error when an invariant fails.
    static DiscreteMeasure make(const TorusGrid1D& x_grid, const VelocityGrid& v_grid,
                                std::vector<Cell> cells, double tol_closed);

    /// Point mass at the cell nearest (x, v).  Only rest points (v snapping
    /// to 0) are closed, so anything else throws.
    static DiscreteMeasure dirac(const TorusGrid1D& x_grid, const VelocityGrid& v_grid,
                                 double x, double v);

    double mass() const;

    /// Integral of a position function, interpolated at the cell positions.
    double integral_position(const GridFunction& f) const;

    /// Fraction of mass within `cells_away` cells of (x, v) in both axes
    /// (position circularly).
    double mass_near(double x, double v, int cells_away) const;
};

/// The closedness pairing used by the invariant and by the LP rows.
double closedness_residual_of(const TorusGrid1D& x_grid, const VelocityGrid& v_grid,
                              const std::vector<DiscreteMeasure::Cell>& cells);

/// A minimizing closed measure and the critical value it certifies.
struct LpMeasure {
    double critical_value = 0.0;        // -(optimal LP value)
    DiscreteMeasure measure;
    long iterations = 0;                // simplex pivots, both phases
    int dropped_rows = 0;               // redundant closedness rows removed
};

/// Minimizes sum L(x_i, v_j, theta) mu_ij over closed probability measures:
/// constraints are mu >= 0, total mass 1, and one closedness row per hat
/// function (the last one dropped as redundant).  Cells listed in
/// forced_zero are excluded from the program, which is how alternative
/// optimal vertices are exposed.  Infeasibility is an internal error and
/// unboundedness a modeling error; both throw.
LpMeasure closed_measure_lp(const LagrangianView& view, double theta,
                            const TorusGrid1D& x_grid, const VelocityGrid& v_grid,
                            const std::vector<std::pair<int, int>>& forced_zero = {},
                            double tol_closed = 1e-8);

/// The minimizing face explored vertex by vertex: after each solve the
/// one-cell neighborhoods of the found support join the forced-zero set and
/// the program is re-solved; vertices whose value stays within value_tol of
/// the first optimum are kept.
struct MatherFamily {
    double critical_value = 0.0;
    std::vector<DiscreteMeasure> measures;
};
MatherFamily enumerate_mather_measures(const LagrangianView& view, double theta,
                                       const TorusGrid1D& x_grid,
                                       const VelocityGrid& v_grid,
                                       int max_count = 4, double value_tol = 1e-6,
                                       double tol_closed = 1e-8);

/// Time average of a calibrated curve over the window [a, b] (curve time,
/// 0 = endpoint, growing backward): each step deposits dt/(b-a) of mass,
/// split linearly between the two position nodes around the sample and
/// assigned to the nearest velocity node.  Requires b - a >= 10 dt.  The
/// closedness tolerance grows with the window boundary effect:
/// max(tol_closed_floor, 2/(b-a) + 5 (h + dt)).
DiscreteMeasure occupation_measure(const CalibratedCurve& curve, double a, double b,
                                   const TorusGrid1D& x_grid,
                                   const VelocityGrid& v_grid,
                                   double tol_closed_floor = 1e-8);

/// Whether a measure pairs to zero with the u-slope of the Lagrangian.
struct OrdinalReport {
    double integral_duL = 0.0;
    bool is_ordinal = false;
    int measure_id = 0;
};

/// integral_duL = sum mass * dL/du(x_i, v_j, u_arg) with u_arg the constant
/// theta; is_ordinal iff |integral_duL| <= eps_ordinal.
OrdinalReport ordinal_classify(const DiscreteMeasure& mu, const LagrangianView& view,
                               double theta, double eps_ordinal, int measure_id = 0);

/// Same with u_arg = u interpolated at the cell position.
OrdinalReport ordinal_classify(const DiscreteMeasure& mu, const LagrangianView& view,
                               const GridFunction& u, double eps_ordinal,
                               int measure_id = 0);

/// Outcome of the measure-mediated comparison test.
struct ComparisonVerdict {
    bool hypothesis_holds = false;   // integral of u1 <= integral of u2 per measure
    bool conclusion_holds = false;   // u1 <= u2 pointwise within tol_order
    double max_violation = 0.0;      // max_i (u1_i - u2_i); sup|u1-u2| in uniqueness mode
    bool uniqueness_mode = false;    // no measures supplied: solutions must coincide
};

/// With measures (pre-filtered to the ordinal set): if integral u1 dmu <=
/// integral u2 dmu for every measure, the pointwise order u1 <= u2 must
/// follow (within tol_order).  With an empty list the equation has a unique
/// solution and the verdict checks sup|u1 - u2| <= tol_order instead.
ComparisonVerdict compare_with_measures(const GridFunction& u1, const GridFunction& u2,
                                        const std::vector<DiscreteMeasure>& measures,
                                        double tol_order);

} // namespace ckam
