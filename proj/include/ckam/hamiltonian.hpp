#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ckam/grid.hpp"

namespace ckam {

/// Trigonometric polynomial on R/(period Z):
///   a0 + sum_k [ cos_coef[k-1]*cos(2 pi k x/period)
///              + sin_coef[k-1]*sin(2 pi k x/period) ].
struct TrigPoly {
    double period = 1.0;
    double a0 = 0.0;
    std::vector<double> cos_coef;
    std::vector<double> sin_coef;

    static TrigPoly constant(double period, double c) { return {period, c, {}, {}}; }

    double eval(double x) const;
    double deriv(double x) const;
};

/// Piecewise trigonometric curve on the circle.  Pieces tile [0, period) and
/// value continuity at every breakpoint (including the wrap) is checked to
/// 1e-12 on construction.  A single piece covering the whole circle is the
/// smooth case.
struct PeriodicCurve {
    struct Piece {
        double lo = 0.0;
        double hi = 0.0;
        TrigPoly poly;
    };

    double period = 1.0;
    std::vector<Piece> pieces;

    static PeriodicCurve smooth(TrigPoly poly);
    static PeriodicCurve piecewise(double period, std::vector<Piece> pieces);

    double eval(double x) const;
    double deriv(double x) const;

    /// max over a dense sample of |eval|; used for CFL-type bounds.
    double sup_abs(int n_samples = 4096) const;

private:
    const Piece& piece_at(double x) const;
};

/// The scalar coupling profile f(u): identity or the shifted identity
/// f(u) = u - u0.  f' = 1 in both cases.
struct UForm {
    enum class Kind { linear, affine };
    Kind kind = Kind::linear;
    double u0 = 0.0;

    double f(double u) const { return kind == Kind::linear ? u : u - u0; }
    double fprime(double) const { return 1.0; }
};

/// Trilinear-interpolated table of H values on (x periodic) x (p box) x
/// (u box).  Queries with p or u outside the tabulated box throw
/// std::domain_error; x wraps.
struct TabulatedH {
    TorusGrid1D x_grid;
    std::vector<double> p_nodes;   // ascending, uniform
    std::vector<double> u_nodes;   // ascending, uniform
    std::vector<double> values;    // [ix][ip][iu] row-major

    static TabulatedH make(const TorusGrid1D& x_grid,
                           std::vector<double> p_nodes,
                           std::vector<double> u_nodes,
                           std::vector<double> values);

    bool empty() const { return values.empty(); }
    double eval(double x, double p, double u) const;
};

/// A contact Hamiltonian H(x, p, u) on the 1-D torus.  Two kinds:
///  - mechanical_contact: H = p^2/2 + V(x) + alpha(x) f(u),
///  - tabulated: grid of H values with finite-difference partials.
struct ContactHamiltonianSpec {
    enum class Kind { mechanical_contact, tabulated };

    Kind kind = Kind::mechanical_contact;
    double period = 1.0;
    PeriodicCurve potential;   // V
    PeriodicCurve coupling;    // alpha
    UForm u_form;
    TabulatedH table;

    /// V(x) = cos(2 pi x) - 1, alpha(x) = 1 - cos(2 pi x), period 1.
    static ContactHamiltonianSpec pendulum_example();

    /// Same potential extended to period 2; alpha(x) = 1 + cos(2 pi x) on
    /// [1/2, 3/2) and 0 on the rest.  The coupling is C^1 across the seams.
    static ContactHamiltonianSpec piecewise_example();

    static ContactHamiltonianSpec mechanical(double period, PeriodicCurve V,
                                             PeriodicCurve alpha,
                                             UForm u_form = {});

    static ContactHamiltonianSpec tabulated(TabulatedH table);
};

struct HamiltonianPartials {
    double hx = 0.0;
    double hp = 0.0;
    double hu = 0.0;
};

double eval_hamiltonian(const ContactHamiltonianSpec& spec, double x, double p, double u);

/// Analytic partials for mechanical_contact; centered finite differences
/// (step 1e-6 * axis scale) for tabulated.
HamiltonianPartials hamiltonian_partials(const ContactHamiltonianSpec& spec,
                                         double x, double p, double u);

/// Result of the monotonicity probe for the coupling direction: the smallest
/// sampled difference quotient (H(x,p,u2) - H(x,p,u1)) / (u2 - u1).
struct MonotonicityReport {
    double min_slope = 0.0;
    bool pass = false;
};

/// Samples the u-monotonicity of H over the given x and u sample sets (each
/// combined with a small internal momentum lattice) and reports the minimal
/// difference quotient.  pass iff min_slope >= -tol_mono.
/// Requires at least 16 x-samples and 2 u-samples.
MonotonicityReport verify_h3(const ContactHamiltonianSpec& spec,
                             const std::vector<double>& x_samples,
                             const std::vector<double>& u_samples,
                             double tol_mono);

struct LagrangianPartials {
    double lx = 0.0;
    double lv = 0.0;
    double lu = 0.0;
};

/// Lagrangian side of the spec, L(x, v, u).  Strategy closed_form is exact
/// and only valid for mechanical_contact (L = v^2/2 - V - alpha f(u));
/// numeric_fenchel maximizes p*v - H(x,p,u) over a momentum grid of
/// 4*m_nodes points on [-2 v_max, 2 v_max], refining the maximizer with
/// golden-section steps after the scan.  Sixteen refinement steps shrink the
/// bracket enough that transform values are accurate to ~1e-10 even when the
/// maximizer falls between grid points; maximizers on grid points are exact
/// because the incumbent scan value is kept.  A maximizer on the box boundary
/// throws std::domain_error (coverage failure).
struct LagrangianView {
    enum class Strategy { closed_form, numeric_fenchel };

    const ContactHamiltonianSpec* spec = nullptr;
    Strategy strategy = Strategy::closed_form;
    double v_max = 4.0;
    int m_nodes = 65;
    int golden_steps = 16;

    static LagrangianView make(const ContactHamiltonianSpec& spec, Strategy s,
                               double v_max, int m_nodes);

    double eval(double x, double v, double u) const;

    /// The maximizing momentum of p*v - H(x,p,u) (equals v for mechanical
    /// kinetic energy p^2/2).
    double dual_momentum(double x, double v, double u) const;

    /// dL/dx, dL/dv, dL/du.  The u- and x-partials are evaluated through the
    /// dual momentum: dL/du = -dH/du(x, p*, u), dL/dx = -dH/dx(x, p*, u),
    /// dL/dv = p*.
    LagrangianPartials partials(double x, double v, double u) const;

    /// Affine-in-u decomposition L = v^2/2 + base(x) + slope(x)*u, available
    /// exactly for mechanical_contact (throws std::logic_error otherwise).
    /// This is the hot path used by the grid operator.
    void affine_parts(double x, double& base, double& slope) const;
    bool has_affine_parts() const;

    /// sup over grid nodes (and a small u,v lattice for tabulated specs) of
    /// |dL/du|; the CFL bound of the discrete operator uses this.
    double sup_du(const TorusGrid1D& grid) const;
};

/// Generic numeric Fenchel transform of a sampled convex conjugate pair:
/// returns max over the standard momentum box of (p*y - g(p)).  Exposed so
/// tests can apply the transform twice and check the involution.
double fenchel_transform(const std::function<double(double)>& g, double y,
                         double v_max, int m_nodes, int golden_steps);

} // namespace ckam
