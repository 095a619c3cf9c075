#include "ckam/flow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "ckam/lax_oleinik.hpp"
#include "ckam/util.hpp"

namespace ckam {

namespace {

constexpr double kBlowupGuard = 1e8;
constexpr long kDefectStride = 64;

struct State {
    double x = 0.0;
    double y = 0.0;
    double u = 0.0;
};

State nudge(const State& s, const State& k, double h) {
    return {s.x + h * k.x, s.y + h * k.y, s.u + h * k.u};
}

template <typename Field>
State rk4_step(const Field& f, const State& s, double dt) {
    const State k1 = f(s);
    const State k2 = f(nudge(s, k1, 0.5 * dt));
    const State k3 = f(nudge(s, k2, 0.5 * dt));
    const State k4 = f(nudge(s, k3, dt));
    return {s.x + dt * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x) / 6.0,
            s.y + dt * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y) / 6.0,
            s.u + dt * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u) / 6.0};
}

bool out_of_bounds(const State& s) {
    return !std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.u) ||
           std::abs(s.y) > kBlowupGuard || std::abs(s.u) > kBlowupGuard;
}

double wrap_period(double x, double period) {
    double w = std::fmod(x, period);
    if (w < 0.0) w += period;
    return w;
}

/// Shared fixed-step driver.  `observe` fills energy and multiplier for a
/// recorded state.
template <typename Field, typename Observe>
Trajectory run_rk4(const Field& field, const Observe& observe, double period,
                   Trajectory::Side side, State s, double T, double dt,
                   const char* who) {
    if (!(dt > 0.0) || dt > 1e-2 + 1e-15)
        throw std::invalid_argument(std::string(who) +
                                    ": dt must lie in (0, 1e-2]");
    if (!(T >= 0.0))
        throw std::invalid_argument(std::string(who) + ": T must be >= 0");
    const long n_steps = std::llround(T / dt);

    Trajectory traj;
    traj.side = side;
    traj.dt = dt;
    traj.samples.reserve(static_cast<size_t>(n_steps) + 1);
    traj.energy.reserve(static_cast<size_t>(n_steps) + 1);
    traj.multiplier.reserve(static_cast<size_t>(n_steps) + 1);

    auto record = [&](const State& st) {
        double h_value = 0.0, mult = 0.0;
        observe(st, h_value, mult);
        traj.samples.push_back({wrap_period(st.x, period), st.y, st.u});
        traj.energy.push_back(h_value);
        traj.multiplier.push_back(mult);
    };

    record(s);
    for (long k = 0; k < n_steps; ++k) {
        const State next = rk4_step(field, s, dt);
        if (k % kDefectStride == 0 && !out_of_bounds(next)) {
            const State half = rk4_step(field, rk4_step(field, s, 0.5 * dt),
                                        0.5 * dt);
            const double d = std::max({std::abs(next.x - half.x),
                                       std::abs(next.y - half.y),
                                       std::abs(next.u - half.u)});
            traj.sampled_defect = std::max(traj.sampled_defect, d);
        }
        if (out_of_bounds(next)) {
            traj.blew_up = true;
            break;
        }
        s = next;
        record(s);
    }
    return traj;
}

} // namespace

Trajectory integrate_contact(const ContactHamiltonianSpec& spec, double c,
                             PhasePoint start, double T, double dt) {
    const auto field = [&spec, c](const State& s) -> State {
        const HamiltonianPartials d = hamiltonian_partials(spec, s.x, s.y, s.u);
        const double h_value = eval_hamiltonian(spec, s.x, s.y, s.u);
        return {d.hp, -d.hx - d.hu * s.y, s.y * d.hp - h_value + c};
    };
    const auto observe = [&spec](const State& s, double& h_value, double& mult) {
        h_value = eval_hamiltonian(spec, s.x, s.y, s.u);
        mult = -hamiltonian_partials(spec, s.x, s.y, s.u).hu;
    };
    return run_rk4(field, observe, spec.period, Trajectory::Side::hamiltonian,
                   {start.x, start.p_or_v, start.u}, T, dt, "integrate_contact");
}

Trajectory integrate_el(const LagrangianView& view, double c, PhasePoint start,
                        double T, double dt) {
    if (!view.has_affine_parts())
        throw std::logic_error(
            "integrate_el: velocity chart needs the quadratic-kinetic closed form");
    const auto field = [&view, c](const State& s) -> State {
        const LagrangianPartials d = view.partials(s.x, s.y, s.u);
        return {s.y, d.lx + d.lu * s.y, view.eval(s.x, s.y, s.u) + c};
    };
    const auto observe = [&view](const State& s, double& h_value, double& mult) {
        const double p = view.dual_momentum(s.x, s.y, s.u);
        h_value = p * s.y - view.eval(s.x, s.y, s.u);
        mult = view.partials(s.x, s.y, s.u).lu; // dL/du = -dH/du at dual pairs
    };
    return run_rk4(field, observe, view.spec->period,
                   Trajectory::Side::lagrangian, {start.x, start.p_or_v, start.u},
                   T, dt, "integrate_el");
}

InvarianceReport mather_invariance_check(const LagrangianView& view,
                                         const GridFunction& u, double c,
                                         const DiscreteMeasure& mu, double T,
                                         double dt) {
    const TorusGrid1D& grid = u.grid;
    if (mu.x_grid.n_nodes != grid.n_nodes || mu.x_grid.period != grid.period)
        throw std::invalid_argument(
            "mather_invariance_check: measure grid differs from the solution grid");

    struct Lift {
        double x = 0.0, p = 0.0, u = 0.0;
    };
    std::vector<Lift> lifts;
    lifts.reserve(mu.cells.size());
    for (const auto& cell : mu.cells) {
        const double x = grid.node(cell.i);
        const double v = mu.v_grid.node(cell.j);
        const double ui = u[cell.i];
        lifts.push_back({x, view.dual_momentum(x, v, ui), ui});
    }

    const ResidualReport rr = residual(*view.spec, u, c);

    std::vector<InvarianceReport> partial(lifts.size());
    parallel_for(static_cast<int>(lifts.size()), [&](int idx) {
        const Lift& l0 = lifts[static_cast<size_t>(idx)];
        const Trajectory traj = integrate_contact(
            *view.spec, c, {l0.x, l0.p, l0.u}, T, dt);
        InvarianceReport local;
        local.any_blow_up = traj.blew_up;
        for (const PhasePoint& s : traj.samples) {
            double dist = HUGE_VAL;
            for (const Lift& l : lifts)
                dist = std::min(dist, std::max({grid.circle_dist(s.x, l.x),
                                                std::abs(s.p_or_v - l.p),
                                                std::abs(s.u - l.u)}));
            local.max_set_distance = std::max(local.max_set_distance, dist);
            const int node = grid.nearest_index(s.x);
            local.max_graph_gap_p = std::max(
                local.max_graph_gap_p,
                std::abs(s.p_or_v - rr.du_upwind[static_cast<size_t>(node)]));
            local.max_graph_gap_u =
                std::max(local.max_graph_gap_u, std::abs(s.u - u.interp(s.x)));
        }
        partial[static_cast<size_t>(idx)] = local;
    });

    InvarianceReport report;
    for (const auto& p : partial) {
        report.max_set_distance = std::max(report.max_set_distance,
                                           p.max_set_distance);
        report.max_graph_gap_p = std::max(report.max_graph_gap_p,
                                          p.max_graph_gap_p);
        report.max_graph_gap_u = std::max(report.max_graph_gap_u,
                                          p.max_graph_gap_u);
        report.any_blow_up = report.any_blow_up || p.any_blow_up;
    }
    return report;
}

} // namespace ckam
