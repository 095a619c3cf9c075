#include "ckam/lax_oleinik.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ckam {

namespace {
constexpr double kBlowupGuard = 1e6;
constexpr double kProbeDriftEps = 2.5e-4;
} // namespace

LaxOleinikOperator::LaxOleinikOperator(const LagrangianView& view,
                                       const TorusGrid1D& grid, double dt, double c,
                                       double v_max)
    : view_(&view), grid_(grid), dt_(dt), c_(c), v_max_(v_max) {
    init(view, v_max);
}

LaxOleinikOperator::LaxOleinikOperator(const LagrangianView& view,
                                       const TorusGrid1D& grid, double dt, double c,
                                       double v_max, double frozen_theta)
    : view_(&view), grid_(grid), dt_(dt), c_(c), v_max_(v_max), frozen_(true),
      theta_(frozen_theta) {
    init(view, v_max);
}

void LaxOleinikOperator::init(const LagrangianView& view, double v_max) {
    if (!(dt_ > 0.0)) throw std::invalid_argument("LaxOleinikOperator: dt <= 0");
    const double h = grid_.h();
    if (dt_ * v_max < h)
        throw std::invalid_argument(
            "LaxOleinikOperator: dt*v_max < h leaves no reachable neighbor");
    if (!frozen_) {
        const double cfl = dt_ * view.sup_du(grid_);
        if (cfl > 1.0 + 1e-12)
            throw std::invalid_argument(
                "LaxOleinikOperator: dt*sup|dL/du| > 1 breaks monotonicity");
    }
    window_ = static_cast<int>(std::floor(dt_ * v_max / h + 1e-12));
    window_ = std::min(window_, grid_.n_nodes / 2);

    affine_ = view.has_affine_parts();
    if (!affine_) return;

    const int n = grid_.n_nodes;
    w_.resize(static_cast<size_t>(n));
    q_.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double base = 0.0, slope = 0.0;
        view.affine_parts(grid_.node(i), base, slope);
        if (frozen_) {
            // Frozen runs see L(y, v, theta): constant in the evolving u.
            w_[static_cast<size_t>(i)] = 1.0;
            q_[static_cast<size_t>(i)] = dt_ * (base + slope * theta_ + c_);
        } else {
            // candidate = u_y*(1 + dt*slope) + dt*(kinetic + base + c).
            // 1 + dt*slope >= 0 under the CFL bound; clamping keeps the
            // weight nonnegative so floating-point monotonicity is exact.
            w_[static_cast<size_t>(i)] = std::max(0.0, 1.0 + dt_ * slope);
            q_[static_cast<size_t>(i)] = dt_ * (base + c_);
        }
    }
    ke_.resize(static_cast<size_t>(2 * window_ + 1));
    for (int k = -window_; k <= window_; ++k) {
        const double v = -k * h / dt_;
        ke_[static_cast<size_t>(k + window_)] = dt_ * 0.5 * v * v;
    }
}

GridFunction LaxOleinikOperator::apply(const GridFunction& u,
                                       std::vector<int>* argmin) const {
    if (u.grid.n_nodes != grid_.n_nodes || u.grid.period != grid_.period)
        throw std::invalid_argument("LaxOleinikOperator: grid mismatch");
    const int n = grid_.n_nodes;
    GridFunction out = GridFunction::constant(grid_, 0.0);
    if (argmin) argmin->assign(static_cast<size_t>(n), 0);

    if (affine_) {
        // value(y) = w[y]*u[y] + q[y] is u-dependent but k-independent.
        std::vector<double> val(static_cast<size_t>(n));
        for (int y = 0; y < n; ++y)
            val[static_cast<size_t>(y)] =
                w_[static_cast<size_t>(y)] * u[y] + q_[static_cast<size_t>(y)];
        for (int i = 0; i < n; ++i) {
            double best = HUGE_VAL;
            int best_y = i;
            for (int k = -window_; k <= window_; ++k) {
                const int y = (i + k + n) % n;
                const double cand =
                    val[static_cast<size_t>(y)] + ke_[static_cast<size_t>(k + window_)];
                if (cand < best) {
                    best = cand;
                    best_y = y;
                }
            }
            out[i] = best;
            if (argmin) (*argmin)[static_cast<size_t>(i)] = best_y;
        }
        return out;
    }

    // Generic path (tabulated specs): evaluate L directly.
    const double h = grid_.h();
    for (int i = 0; i < n; ++i) {
        double best = HUGE_VAL;
        int best_y = i;
        for (int k = -window_; k <= window_; ++k) {
            const int y = (i + k + n) % n;
            const double v = -k * h / dt_;
            const double uy = u[y];
            const double uarg = frozen_ ? theta_ : uy;
            const double cand =
                uy + dt_ * (view_->eval(grid_.node(y), v, uarg) + c_);
            if (cand < best) {
                best = cand;
                best_y = y;
            }
        }
        out[i] = best;
        if (argmin) (*argmin)[static_cast<size_t>(i)] = best_y;
    }
    return out;
}

namespace {

struct IterationTrace {
    std::vector<double> mean_increment; // per step, already divided by dt
    double tail_mean(double fraction) const {
        const size_t n = mean_increment.size();
        const size_t k = std::max<size_t>(1, static_cast<size_t>(n * fraction));
        const size_t from = n - k;
        double s = 0.0;
        for (size_t i = from; i < n; ++i) s += mean_increment[i];
        return s / k;
    }
};

} // namespace

StationarySolution solve_stationary(const LagrangianView& view,
                                    const TorusGrid1D& grid, double c, double dt,
                                    const GridFunction& init, double tol_fix,
                                    long max_iter, double v_max) {
    LaxOleinikOperator T(view, grid, dt, c, v_max);
    StationarySolution sol;
    sol.c = c;
    sol.dt = dt;
    sol.u = init;
    IterationTrace trace;
    trace.mean_increment.reserve(static_cast<size_t>(std::min<long>(max_iter, 1 << 20)));
    const int n = grid.n_nodes;
    for (long it = 0; it < max_iter; ++it) {
        GridFunction next = T.apply(sol.u, &sol.argmin);
        double sup = 0.0, mean = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = next[i] - sol.u[i];
            sup = std::max(sup, std::abs(d));
            mean += d;
        }
        mean /= n;
        trace.mean_increment.push_back(mean / dt);
        sol.u = std::move(next);
        sol.report.iterations = it + 1;
        sol.report.sup_update = sup;
        if (sup <= tol_fix) {
            sol.report.converged = true;
            break;
        }
        if (sol.u.sup_abs() > kBlowupGuard) break;
    }
    sol.report.drift_rate = trace.tail_mean(0.25);
    if (sol.report.converged) {
        ResidualReport rr = residual(*view.spec, sol.u, c);
        sol.report.residual_linf = rr.sup_away;
    }
    return sol;
}

double frozen_critical_value(const LagrangianView& view, const TorusGrid1D& grid,
                             double theta, double dt, long n_iter, double v_max) {
    if (n_iter < 16)
        throw std::invalid_argument("frozen_critical_value: n_iter too small");
    LaxOleinikOperator T(view, grid, dt, 0.0, v_max, theta);
    GridFunction u = GridFunction::constant(grid, 0.0);
    IterationTrace trace;
    trace.mean_increment.reserve(static_cast<size_t>(n_iter));
    const int n = grid.n_nodes;
    for (long it = 0; it < n_iter; ++it) {
        GridFunction next = T.apply(u);
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += next[i] - u[i];
        trace.mean_increment.push_back(mean / n / dt);
        u = std::move(next);
    }
    // Drift over the last half; stability is judged by comparing the two
    // quarters inside that half.
    const double half = trace.tail_mean(0.5);
    const double q4 = trace.tail_mean(0.25);
    const size_t n_tr = trace.mean_increment.size();
    double q3 = 0.0;
    {
        const size_t k = std::max<size_t>(1, n_tr / 4);
        const size_t from = n_tr - std::min(n_tr, 2 * k);
        for (size_t i = from; i < from + k; ++i) q3 += trace.mean_increment[i];
        q3 /= k;
    }
    const double stab_tol = 5e-4 * std::max(1.0, std::abs(half));
    if (std::abs(q3 - q4) > stab_tol)
        throw std::runtime_error(
            "frozen_critical_value: drift not stabilized, needs more iterations");
    return -half;
}

namespace {

/// Budget-bounded classification for the probe: 'below' iff the run drifts
/// downward without converging.
bool probe_below(const LagrangianView& view, const TorusGrid1D& grid, double dt,
                 double c, long iter_budget, double v_max) {
    StationarySolution s =
        solve_stationary(view, grid, c, dt,
                         GridFunction::constant(grid, 0.0), 1e-10, iter_budget,
                         v_max);
    if (s.report.converged) return false;
    return s.report.drift_rate < -kProbeDriftEps;
}

} // namespace

AdmissibleProbe admissible_interval_probe(const LagrangianView& view,
                                          const TorusGrid1D& grid, double dt,
                                          double c_lo, double c_hi, int n_bisect,
                                          long iter_budget, double v_max) {
    if (!(c_lo < c_hi))
        throw std::invalid_argument("admissible_interval_probe: c_lo >= c_hi");
    AdmissibleProbe probe;
    bool lo_below = probe_below(view, grid, dt, c_lo, iter_budget, v_max);
    bool hi_below = probe_below(view, grid, dt, c_hi, iter_budget, v_max);
    probe.evaluations = 2;
    probe.c_lo = c_lo;
    probe.c_hi = c_hi;
    if (lo_below == hi_below) {
        probe.bracket_valid = false;
        return probe;
    }
    probe.bracket_valid = true;
    for (int i = 0; i < n_bisect; ++i) {
        const double mid = 0.5 * (probe.c_lo + probe.c_hi);
        ++probe.evaluations;
        if (probe_below(view, grid, dt, mid, iter_budget, v_max))
            probe.c_lo = mid;
        else
            probe.c_hi = mid;
    }
    StationarySolution at_hi =
        solve_stationary(view, grid, probe.c_hi, dt,
                         GridFunction::constant(grid, 0.0), 1e-8,
                         4 * iter_budget, v_max);
    probe.attained = at_hi.report.converged;
    return probe;
}

CalibratedCurve backward_curve(const LagrangianView& view,
                               const StationarySolution& sol, double x0,
                               long n_steps) {
    if (!sol.report.converged)
        throw std::invalid_argument("backward_curve: solution did not converge");
    if (sol.argmin.size() != static_cast<size_t>(sol.u.grid.n_nodes))
        throw std::invalid_argument("backward_curve: missing argmin chain");
    const TorusGrid1D& grid = sol.u.grid;
    CalibratedCurve curve;
    curve.dt = sol.dt;
    curve.T = static_cast<double>(n_steps) * sol.dt;
    curve.samples.resize(static_cast<size_t>(n_steps) + 1);

    std::vector<int> chain(static_cast<size_t>(n_steps) + 1);
    chain[0] = grid.nearest_index(x0);
    for (long k = 0; k < n_steps; ++k)
        chain[static_cast<size_t>(k) + 1] =
            sol.argmin[static_cast<size_t>(chain[static_cast<size_t>(k)])];

    // Sample k sits at time -k*dt; samples[k].v is the forward-in-time
    // velocity of the segment arriving at sample k from sample k+1, which is
    // also the velocity leaving the departure point samples[k+1].x.  The
    // earliest sample copies its neighbor.
    for (long k = 0; k <= n_steps; ++k) {
        const double xk = grid.node(chain[static_cast<size_t>(k)]);
        curve.samples[static_cast<size_t>(k)].x = xk;
        if (k < n_steps) {
            const double xn = grid.node(chain[static_cast<size_t>(k) + 1]);
            curve.samples[static_cast<size_t>(k)].v =
                grid.min_image(xk, xn) / sol.dt;
        }
    }
    if (n_steps > 0)
        curve.samples.back().v = curve.samples[static_cast<size_t>(n_steps) - 1].v;

    // Calibration defect: u(x_end) - u(x_K) should equal the accumulated
    // running cost along the chain.  Each term prices the segment leaving
    // sample k, whose velocity is stored on sample k-1.
    double action = 0.0;
    for (long k = 1; k <= n_steps; ++k) {
        const auto& s = curve.samples[static_cast<size_t>(k)];
        const double v_leaving = curve.samples[static_cast<size_t>(k) - 1].v;
        const double uk = sol.u[chain[static_cast<size_t>(k)]];
        action += sol.dt * (view.eval(s.x, v_leaving, uk) + sol.c);
    }
    const double u_end = sol.u[chain[0]];
    const double u_far = sol.u[chain[static_cast<size_t>(n_steps)]];
    curve.calibration_defect = std::abs(u_end - u_far - action);
    return curve;
}

ResidualReport residual(const ContactHamiltonianSpec& spec, const GridFunction& u,
                        double c, std::optional<double> frozen_theta) {
    const TorusGrid1D& grid = u.grid;
    const int n = grid.n_nodes;
    const double h = grid.h();
    ResidualReport rep;
    rep.r = GridFunction::constant(grid, 0.0);
    rep.kink.assign(static_cast<size_t>(n), 0);
    rep.du_upwind.assign(static_cast<size_t>(n), 0.0);
    const double lip = u.lip();
    const double kink_gap = 10.0 * h * std::max(lip, 1e-30);
    for (int i = 0; i < n; ++i) {
        const double dm = (u[i] - u[(i - 1 + n) % n]) / h;
        const double dp = (u[(i + 1) % n] - u[i]) / h;
        const double uarg = frozen_theta ? *frozen_theta : u[i];
        const double x = grid.node(i);
        const double rm = eval_hamiltonian(spec, x, dm, uarg) - c;
        const double rp = eval_hamiltonian(spec, x, dp, uarg) - c;
        if (std::abs(rm) >= std::abs(rp)) {
            rep.r[i] = rm;
            rep.du_upwind[static_cast<size_t>(i)] = dm;
        } else {
            rep.r[i] = rp;
            rep.du_upwind[static_cast<size_t>(i)] = dp;
        }
        if (std::abs(dm - dp) > kink_gap) {
            rep.kink[static_cast<size_t>(i)] = 1;
            ++rep.n_kinks;
        } else {
            rep.sup_away = std::max(rep.sup_away, std::abs(rep.r[i]));
        }
    }
    return rep;
}

std::vector<StationarySolution> solution_ladder(const LagrangianView& view,
                                                const TorusGrid1D& grid, double c,
                                                double dt,
                                                const std::vector<double>& kappas,
                                                double tol_fix, long max_iter,
                                                double v_max) {
    std::vector<StationarySolution> distinct;
    for (double kappa : kappas) {
        StationarySolution s =
            solve_stationary(view, grid, c, dt,
                             GridFunction::constant(grid, kappa), tol_fix,
                             max_iter, v_max);
        if (!s.report.converged) continue;
        bool fresh = true;
        for (const auto& d : distinct)
            if (GridFunction::sup_distance(d.u, s.u) <= 10.0 * tol_fix) {
                fresh = false;
                break;
            }
        if (fresh) distinct.push_back(std::move(s));
    }
    return distinct;
}

} // namespace ckam
