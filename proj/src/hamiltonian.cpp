#include "ckam/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

#include "ckam/util.hpp"

namespace ckam {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kBreakTol = 1e-12;
}

// ---------------------------------------------------------------------------
// Curves

double TrigPoly::eval(double x) const {
    const double w = kTwoPi / period;
    double s = a0;
    for (size_t k = 0; k < cos_coef.size(); ++k)
        s += cos_coef[k] * std::cos(w * (k + 1) * x);
    for (size_t k = 0; k < sin_coef.size(); ++k)
        s += sin_coef[k] * std::sin(w * (k + 1) * x);
    return s;
}

double TrigPoly::deriv(double x) const {
    const double w = kTwoPi / period;
    double s = 0.0;
    for (size_t k = 0; k < cos_coef.size(); ++k)
        s -= cos_coef[k] * w * (k + 1) * std::sin(w * (k + 1) * x);
    for (size_t k = 0; k < sin_coef.size(); ++k)
        s += sin_coef[k] * w * (k + 1) * std::cos(w * (k + 1) * x);
    return s;
}

PeriodicCurve PeriodicCurve::smooth(TrigPoly poly) {
    PeriodicCurve c;
    c.period = poly.period;
    c.pieces.push_back({0.0, c.period, std::move(poly)});
    return c;
}

PeriodicCurve PeriodicCurve::piecewise(double period, std::vector<Piece> pieces) {
    if (!(period > 0.0))
        throw std::invalid_argument("PeriodicCurve: period must be positive");
    if (pieces.empty())
        throw std::invalid_argument("PeriodicCurve: no pieces");
    double cursor = 0.0;
    for (const Piece& p : pieces) {
        if (std::abs(p.lo - cursor) > kBreakTol)
            throw std::invalid_argument("PeriodicCurve: pieces must tile [0, period)");
        if (!(p.hi > p.lo))
            throw std::invalid_argument("PeriodicCurve: empty piece");
        cursor = p.hi;
    }
    if (std::abs(cursor - period) > kBreakTol)
        throw std::invalid_argument("PeriodicCurve: pieces must tile [0, period)");
    // Value continuity at every interior breakpoint and across the wrap.
    for (size_t i = 0; i < pieces.size(); ++i) {
        const Piece& left = pieces[i];
        const Piece& right = pieces[(i + 1) % pieces.size()];
        const double b = left.hi;
        const double jump = std::abs(left.poly.eval(b) -
                                     right.poly.eval(i + 1 == pieces.size() ? 0.0 : b));
        if (jump > kBreakTol)
            throw std::invalid_argument("PeriodicCurve: discontinuous at a breakpoint");
    }
    PeriodicCurve c;
    c.period = period;
    c.pieces = std::move(pieces);
    return c;
}

const PeriodicCurve::Piece& PeriodicCurve::piece_at(double x) const {
    double y = x - period * std::floor(x / period);
    if (y >= period) y -= period;
    for (const Piece& p : pieces)
        if (y >= p.lo && y < p.hi) return p;
    return pieces.back();
}

double PeriodicCurve::eval(double x) const { return piece_at(x).poly.eval(x); }

double PeriodicCurve::deriv(double x) const { return piece_at(x).poly.deriv(x); }

double PeriodicCurve::sup_abs(int n_samples) const {
    double m = 0.0;
    for (int i = 0; i < n_samples; ++i)
        m = std::max(m, std::abs(eval(period * i / n_samples)));
    return m;
}

// ---------------------------------------------------------------------------
// Tabulated H

TabulatedH TabulatedH::make(const TorusGrid1D& x_grid, std::vector<double> p_nodes,
                            std::vector<double> u_nodes, std::vector<double> values) {
    if (p_nodes.size() < 2 || u_nodes.size() < 2)
        throw std::invalid_argument("TabulatedH: need at least 2 nodes per axis");
    const size_t expect =
        static_cast<size_t>(x_grid.n_nodes) * p_nodes.size() * u_nodes.size();
    if (values.size() != expect)
        throw std::invalid_argument("TabulatedH: value count mismatch");
    for (size_t k = 1; k < p_nodes.size(); ++k)
        if (!(p_nodes[k] > p_nodes[k - 1]))
            throw std::invalid_argument("TabulatedH: p_nodes must ascend");
    for (size_t k = 1; k < u_nodes.size(); ++k)
        if (!(u_nodes[k] > u_nodes[k - 1]))
            throw std::invalid_argument("TabulatedH: u_nodes must ascend");
    return TabulatedH{x_grid, std::move(p_nodes), std::move(u_nodes), std::move(values)};
}

namespace {
// Locates y in an ascending uniform axis; throws if outside.
void axis_locate(const std::vector<double>& nodes, double y, const char* name,
                 size_t& i, double& frac) {
    if (y < nodes.front() || y > nodes.back())
        throw std::domain_error(std::string("TabulatedH: ") + name +
                                " outside the tabulated range");
    const double step = (nodes.back() - nodes.front()) / (nodes.size() - 1);
    double t = (y - nodes.front()) / step;
    i = static_cast<size_t>(t);
    if (i >= nodes.size() - 1) i = nodes.size() - 2;
    frac = t - static_cast<double>(i);
}
} // namespace

double TabulatedH::eval(double x, double p, double u) const {
    int ix = 0;
    double fx = 0.0;
    x_grid.locate(x, ix, fx);
    size_t ip = 0, iu = 0;
    double fp = 0.0, fu = 0.0;
    axis_locate(p_nodes, p, "p", ip, fp);
    axis_locate(u_nodes, u, "u", iu, fu);
    const size_t np = p_nodes.size(), nu = u_nodes.size();
    auto at = [&](size_t a, size_t b, size_t c) {
        return values[(a * np + b) * nu + c];
    };
    const size_t x0 = static_cast<size_t>(ix);
    const size_t x1 = static_cast<size_t>((ix + 1) % x_grid.n_nodes);
    double s = 0.0;
    for (int dx = 0; dx <= 1; ++dx)
        for (int dp = 0; dp <= 1; ++dp)
            for (int du = 0; du <= 1; ++du) {
                const double w = (dx ? fx : 1.0 - fx) * (dp ? fp : 1.0 - fp) *
                                 (du ? fu : 1.0 - fu);
                s += w * at(dx ? x1 : x0, ip + dp, iu + du);
            }
    return s;
}

// ---------------------------------------------------------------------------
// Spec construction

ContactHamiltonianSpec ContactHamiltonianSpec::pendulum_example() {
    TrigPoly V{1.0, -1.0, {1.0}, {}};      // cos(2 pi x) - 1
    TrigPoly a{1.0, 1.0, {-1.0}, {}};      // 1 - cos(2 pi x)
    return mechanical(1.0, PeriodicCurve::smooth(V), PeriodicCurve::smooth(a));
}

ContactHamiltonianSpec ContactHamiltonianSpec::piecewise_example() {
    // Potential cos(2 pi x) - 1 viewed on period 2: harmonic k = 2.
    TrigPoly V{2.0, -1.0, {0.0, 1.0}, {}};
    TrigPoly zero{2.0, 0.0, {}, {}};
    TrigPoly hump{2.0, 1.0, {0.0, 1.0}, {}};   // 1 + cos(2 pi x)
    PeriodicCurve alpha = PeriodicCurve::piecewise(
        2.0, {{0.0, 0.5, zero}, {0.5, 1.5, hump}, {1.5, 2.0, zero}});
    return mechanical(2.0, PeriodicCurve::smooth(V), alpha);
}

ContactHamiltonianSpec ContactHamiltonianSpec::mechanical(double period,
                                                          PeriodicCurve V,
                                                          PeriodicCurve alpha,
                                                          UForm u_form) {
    if (!(period > 0.0))
        throw std::invalid_argument("ContactHamiltonianSpec: period must be positive");
    if (std::abs(V.period - period) > kBreakTol ||
        std::abs(alpha.period - period) > kBreakTol)
        throw std::invalid_argument("ContactHamiltonianSpec: curve period mismatch");
    ContactHamiltonianSpec s;
    s.kind = Kind::mechanical_contact;
    s.period = period;
    s.potential = std::move(V);
    s.coupling = std::move(alpha);
    s.u_form = u_form;
    return s;
}

ContactHamiltonianSpec ContactHamiltonianSpec::tabulated(TabulatedH table) {
    ContactHamiltonianSpec s;
    s.kind = Kind::tabulated;
    s.period = table.x_grid.period;
    s.table = std::move(table);
    return s;
}

// ---------------------------------------------------------------------------
// Evaluation

double eval_hamiltonian(const ContactHamiltonianSpec& spec, double x, double p,
                        double u) {
    if (spec.kind == ContactHamiltonianSpec::Kind::mechanical_contact)
        return 0.5 * p * p + spec.potential.eval(x) +
               spec.coupling.eval(x) * spec.u_form.f(u);
    return spec.table.eval(x, p, u);
}

HamiltonianPartials hamiltonian_partials(const ContactHamiltonianSpec& spec,
                                         double x, double p, double u) {
    if (spec.kind == ContactHamiltonianSpec::Kind::mechanical_contact) {
        HamiltonianPartials d;
        d.hx = spec.potential.deriv(x) + spec.coupling.deriv(x) * spec.u_form.f(u);
        d.hp = p;
        d.hu = spec.coupling.eval(x) * spec.u_form.fprime(u);
        return d;
    }
    // Centered finite differences with step 1e-6 * axis scale.
    const TabulatedH& t = spec.table;
    auto width = [](const std::vector<double>& n) { return n.back() - n.front(); };
    const double sx = 1e-6 * t.x_grid.period;
    const double sp = 1e-6 * std::max(1.0, width(t.p_nodes));
    const double su = 1e-6 * std::max(1.0, width(t.u_nodes));
    auto clamp_pair = [](double v, double lo, double hi, double s) {
        double a = v - s, b = v + s;
        if (a < lo) { a = lo; }
        if (b > hi) { b = hi; }
        return std::pair<double, double>{a, b};
    };
    HamiltonianPartials d;
    d.hx = (t.eval(x + sx, p, u) - t.eval(x - sx, p, u)) / (2 * sx);
    auto [pa, pb] = clamp_pair(p, t.p_nodes.front(), t.p_nodes.back(), sp);
    d.hp = (t.eval(x, pb, u) - t.eval(x, pa, u)) / (pb - pa);
    auto [ua, ub] = clamp_pair(u, t.u_nodes.front(), t.u_nodes.back(), su);
    d.hu = (t.eval(x, p, ub) - t.eval(x, p, ua)) / (ub - ua);
    return d;
}

MonotonicityReport verify_h3(const ContactHamiltonianSpec& spec,
                             const std::vector<double>& x_samples,
                             const std::vector<double>& u_samples,
                             double tol_mono) {
    if (x_samples.size() < 16)
        throw std::invalid_argument("verify_h3: need at least 16 x-samples");
    if (u_samples.size() < 2)
        throw std::invalid_argument("verify_h3: need at least 2 u-samples");
    static const double p_lattice[] = {-2.0, -0.5, 0.0, 0.5, 2.0};
    MonotonicityReport rep;
    rep.min_slope = HUGE_VAL;
    for (double x : x_samples)
        for (double p : p_lattice)
            for (size_t a = 0; a < u_samples.size(); ++a)
                for (size_t b = a + 1; b < u_samples.size(); ++b) {
                    const double u1 = u_samples[a], u2 = u_samples[b];
                    if (u1 == u2) continue;
                    double q = (eval_hamiltonian(spec, x, p, u2) -
                                eval_hamiltonian(spec, x, p, u1)) /
                               (u2 - u1);
                    rep.min_slope = std::min(rep.min_slope, q);
                }
    rep.pass = rep.min_slope >= -tol_mono;
    return rep;
}

// ---------------------------------------------------------------------------
// Lagrangian view

LagrangianView LagrangianView::make(const ContactHamiltonianSpec& spec, Strategy s,
                                    double v_max, int m_nodes) {
    if (s == Strategy::closed_form &&
        spec.kind != ContactHamiltonianSpec::Kind::mechanical_contact)
        throw std::invalid_argument(
            "LagrangianView: closed_form strategy needs a mechanical spec");
    if (!(v_max > 0.0) || m_nodes < 3)
        throw std::invalid_argument("LagrangianView: bad momentum box");
    LagrangianView v;
    v.spec = &spec;
    v.strategy = s;
    v.v_max = v_max;
    v.m_nodes = m_nodes;
    return v;
}

double fenchel_transform(const std::function<double(double)>& g, double y,
                         double v_max, int m_nodes, int golden_steps) {
    auto obj = [&](double p) { return p * y - g(p); };
    return maximize_on_grid(obj, -2.0 * v_max, 2.0 * v_max, 4 * m_nodes,
                            golden_steps)
        .value;
}

namespace {
ScalarMax fenchel_argmax(const ContactHamiltonianSpec& spec, double x, double v,
                         double u, double v_max, int m_nodes, int golden_steps) {
    auto obj = [&](double p) { return p * v - eval_hamiltonian(spec, x, p, u); };
    return maximize_on_grid(obj, -2.0 * v_max, 2.0 * v_max, 4 * m_nodes,
                            golden_steps);
}
} // namespace

double LagrangianView::eval(double x, double v, double u) const {
    if (strategy == Strategy::closed_form)
        return 0.5 * v * v - spec->potential.eval(x) -
               spec->coupling.eval(x) * spec->u_form.f(u);
    return fenchel_argmax(*spec, x, v, u, v_max, m_nodes, golden_steps).value;
}

double LagrangianView::dual_momentum(double x, double v, double u) const {
    if (strategy == Strategy::closed_form) return v;
    return fenchel_argmax(*spec, x, v, u, v_max, m_nodes, golden_steps).arg;
}

LagrangianPartials LagrangianView::partials(double x, double v, double u) const {
    LagrangianPartials d;
    if (strategy == Strategy::closed_form) {
        d.lx = -spec->potential.deriv(x) -
               spec->coupling.deriv(x) * spec->u_form.f(u);
        d.lv = v;
        d.lu = -spec->coupling.eval(x) * spec->u_form.fprime(u);
        return d;
    }
    const double p = dual_momentum(x, v, u);
    const HamiltonianPartials h = hamiltonian_partials(*spec, x, p, u);
    d.lx = -h.hx;
    d.lv = p;
    d.lu = -h.hu;
    return d;
}

bool LagrangianView::has_affine_parts() const {
    return spec->kind == ContactHamiltonianSpec::Kind::mechanical_contact;
}

void LagrangianView::affine_parts(double x, double& base, double& slope) const {
    if (!has_affine_parts())
        throw std::logic_error("LagrangianView: no affine decomposition");
    const double a = spec->coupling.eval(x);
    slope = -a;
    base = -spec->potential.eval(x);
    if (spec->u_form.kind == UForm::Kind::affine) base += a * spec->u_form.u0;
}

double LagrangianView::sup_du(const TorusGrid1D& grid) const {
    double m = 0.0;
    if (has_affine_parts()) {
        for (int i = 0; i < grid.n_nodes; ++i)
            m = std::max(m, std::abs(spec->coupling.eval(grid.node(i))));
        return m;
    }
    static const double v_lattice[] = {-1.0, 0.0, 1.0};
    const auto& un = spec->table.u_nodes;
    const double umid = 0.5 * (un.front() + un.back());
    const double uspan = 0.4 * (un.back() - un.front());
    for (int i = 0; i < grid.n_nodes; ++i)
        for (double v : v_lattice)
            for (int k = -1; k <= 1; ++k) {
                const double u = umid + k * uspan;
                m = std::max(m, std::abs(partials(grid.node(i), v, u).lu));
            }
    return m;
}

} // namespace ckam
