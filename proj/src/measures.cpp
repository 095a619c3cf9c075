#include "ckam/measures.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "ckam/util.hpp"

namespace ckam {

namespace {
constexpr double kMassTol = 1e-9;
constexpr double kCellDrop = 1e-14;   // LP roundoff guard on basic variables
} // namespace

double closedness_residual_of(const TorusGrid1D& x_grid, const VelocityGrid& v_grid,
                              const std::vector<DiscreteMeasure::Cell>& cells) {
    const int n = x_grid.n_nodes;
    std::vector<double> marginal(static_cast<size_t>(n), 0.0);
    for (const auto& c : cells)
        marginal[static_cast<size_t>(c.i)] += v_grid.node(c.j) * c.mass;
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        const double r = marginal[static_cast<size_t>((k - 1 + n) % n)] -
                         marginal[static_cast<size_t>((k + 1) % n)];
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

DiscreteMeasure DiscreteMeasure::make(const TorusGrid1D& x_grid,
                                      const VelocityGrid& v_grid,
                                      std::vector<Cell> cells, double tol_closed) {
    for (const auto& c : cells) {
        if (c.i < 0 || c.i >= x_grid.n_nodes || c.j < 0 || c.j >= v_grid.m_nodes)
            throw std::invalid_argument("DiscreteMeasure: cell index out of range");
        if (!(c.mass >= 0.0) || !std::isfinite(c.mass))
            throw verification_error("DiscreteMeasure: negative or non-finite mass");
    }
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    std::vector<Cell> merged;
    for (const auto& c : cells) {
        if (c.mass == 0.0) continue;
        if (!merged.empty() && merged.back().i == c.i && merged.back().j == c.j)
            merged.back().mass += c.mass;
        else
            merged.push_back(c);
    }
    double total = 0.0;
    for (const auto& c : merged) total += c.mass;
    if (std::abs(total - 1.0) > kMassTol)
        throw verification_error("DiscreteMeasure: total mass " +
                                 format_double(total) + " is not 1");
    const double residual = closedness_residual_of(x_grid, v_grid, merged);
    if (residual > tol_closed)
        throw verification_error("DiscreteMeasure: closedness residual " +
                                 format_double(residual) + " exceeds " +
                                 format_double(tol_closed));
    DiscreteMeasure mu;
    mu.x_grid = x_grid;
    mu.v_grid = v_grid;
    mu.cells = std::move(merged);
    mu.closedness_residual = residual;
    return mu;
}

DiscreteMeasure DiscreteMeasure::dirac(const TorusGrid1D& x_grid,
                                       const VelocityGrid& v_grid, double x,
                                       double v) {
    Cell c;
    c.i = x_grid.nearest_index(x);
    c.j = v_grid.nearest_index(v);
    c.mass = 1.0;
    return make(x_grid, v_grid, {c}, 1e-9);
}

double DiscreteMeasure::mass() const {
    double total = 0.0;
    for (const auto& c : cells) total += c.mass;
    return total;
}

double DiscreteMeasure::integral_position(const GridFunction& f) const {
    double s = 0.0;
    for (const auto& c : cells) s += c.mass * f.interp(x_grid.node(c.i));
    return s;
}

double DiscreteMeasure::mass_near(double x, double v, int cells_away) const {
    const int i0 = x_grid.nearest_index(x);
    const int j0 = v_grid.nearest_index(v);
    const int n = x_grid.n_nodes;
    double s = 0.0;
    for (const auto& c : cells) {
        const int di = std::min((c.i - i0 + n) % n, (i0 - c.i + n) % n);
        if (di <= cells_away && std::abs(c.j - j0) <= cells_away) s += c.mass;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Closed-measure linear program

namespace {

/// Column layout of the measure LP: cell (i, j) -> i*M + j.
int lp_col(int i, int j, int m_nodes) { return i * m_nodes + j; }

} // namespace

LpMeasure closed_measure_lp(const LagrangianView& view, double theta,
                            const TorusGrid1D& x_grid, const VelocityGrid& v_grid,
                            const std::vector<std::pair<int, int>>& forced_zero,
                            double tol_closed) {
    const int N = x_grid.n_nodes;
    const int M = v_grid.m_nodes;
    const long n_full = static_cast<long>(N) * M;
    if (n_full > 200000)
        throw std::invalid_argument("closed_measure_lp: grid too large (over 2e5 cells)");

    std::vector<char> excluded(static_cast<size_t>(n_full), 0);
    for (const auto& [i, j] : forced_zero) {
        if (i < 0 || i >= N || j < 0 || j >= M)
            throw std::invalid_argument("closed_measure_lp: forced-zero cell out of range");
        excluded[static_cast<size_t>(lp_col(i, j, M))] = 1;
    }
    std::vector<int> col_to_cell;   // reduced column -> full cell index
    col_to_cell.reserve(static_cast<size_t>(n_full));
    std::vector<int> cell_to_col(static_cast<size_t>(n_full), -1);
    for (long idx = 0; idx < n_full; ++idx)
        if (!excluded[static_cast<size_t>(idx)]) {
            cell_to_col[static_cast<size_t>(idx)] = static_cast<int>(col_to_cell.size());
            col_to_cell.push_back(static_cast<int>(idx));
        }
    const int n = static_cast<int>(col_to_cell.size());
    if (n == 0) throw std::invalid_argument("closed_measure_lp: all cells excluded");
    const int m = N;                // N-1 closedness rows + the mass row

    std::vector<double> cost(static_cast<size_t>(n));
    for (int col = 0; col < n; ++col) {
        const int idx = col_to_cell[static_cast<size_t>(col)];
        const int i = idx / M, j = idx % M;
        cost[static_cast<size_t>(col)] =
            view.eval(x_grid.node(i), v_grid.node(j), theta);
    }
    std::vector<double> A(static_cast<size_t>(m) * n, 0.0);
    auto row = [&](int r) { return A.data() + static_cast<size_t>(r) * n; };
    for (int k = 0; k + 1 < N; ++k) {          // hat k, last one dropped
        double* r = row(k);
        const int prev = (k - 1 + N) % N, next = (k + 1) % N;
        for (int j = 0; j < M; ++j) {
            const int cp = cell_to_col[static_cast<size_t>(lp_col(prev, j, M))];
            if (cp >= 0) r[cp] += v_grid.node(j);
            const int cn = cell_to_col[static_cast<size_t>(lp_col(next, j, M))];
            if (cn >= 0) r[cn] -= v_grid.node(j);
        }
    }
    {
        double* r = row(m - 1);
        for (int col = 0; col < n; ++col) r[col] = 1.0;   // total mass
    }
    std::vector<double> b(static_cast<size_t>(m), 0.0);
    b[static_cast<size_t>(m - 1)] = 1.0;

    const LpResult lp = solve_lp(cost, A, m, n, b);
    switch (lp.status) {
    case LpResult::Status::optimal:
        break;
    case LpResult::Status::infeasible:
        throw std::runtime_error(
            "closed_measure_lp: program infeasible (internal error: the uniform "
            "measure should always be admissible)");
    case LpResult::Status::unbounded:
        throw std::invalid_argument(
            "closed_measure_lp: objective unbounded (modeling error)");
    case LpResult::Status::iteration_limit:
        throw std::runtime_error("closed_measure_lp: simplex iteration limit");
    }

    std::vector<DiscreteMeasure::Cell> cells;
    double total = 0.0;
    for (int col = 0; col < n; ++col) {
        const double mass = lp.x[static_cast<size_t>(col)];
        if (mass <= kCellDrop) continue;
        const int idx = col_to_cell[static_cast<size_t>(col)];
        cells.push_back({idx / M, idx % M, mass});
        total += mass;
    }
    if (std::abs(total - 1.0) > 1e-7)
        throw std::runtime_error("closed_measure_lp: mass drifted to " +
                                 format_double(total));
    for (auto& c : cells) c.mass /= total;    // absorb simplex roundoff

    LpMeasure out;
    out.critical_value = -lp.value;
    out.measure = DiscreteMeasure::make(x_grid, v_grid, std::move(cells),
                                        std::max(tol_closed, 1e-8));
    out.iterations = lp.phase1_iterations + lp.phase2_iterations;
    out.dropped_rows = lp.dropped_rows;
    return out;
}

MatherFamily enumerate_mather_measures(const LagrangianView& view, double theta,
                                       const TorusGrid1D& x_grid,
                                       const VelocityGrid& v_grid, int max_count,
                                       double value_tol, double tol_closed) {
    MatherFamily family;
    std::set<std::pair<int, int>> forced;
    const int N = x_grid.n_nodes;
    const int M = v_grid.m_nodes;
    for (int round = 0; round < max_count; ++round) {
        LpMeasure lp;
        try {
            lp = closed_measure_lp(view, theta, x_grid, v_grid,
                                   {forced.begin(), forced.end()}, tol_closed);
        } catch (const std::exception&) {
            break;        // exhausted: the remaining cells admit no closed measure
        }
        if (round == 0) {
            family.critical_value = lp.critical_value;
        } else if (std::abs(lp.critical_value - family.critical_value) > value_tol) {
            break;        // strictly worse vertex: off the optimal face
        }
        for (const auto& c : lp.measure.cells) {
            if (c.mass <= 1e-6) continue;
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    const int jj = c.j + dj;
                    if (jj < 0 || jj >= M) continue;
                    forced.insert({(c.i + di + N) % N, jj});
                }
        }
        family.measures.push_back(std::move(lp.measure));
    }
    return family;
}

// ---------------------------------------------------------------------------
// Occupation measures

DiscreteMeasure occupation_measure(const CalibratedCurve& curve, double a, double b,
                                   const TorusGrid1D& x_grid,
                                   const VelocityGrid& v_grid,
                                   double tol_closed_floor) {
    const double dt = curve.dt;
    if (!(b > a) || b - a < 10.0 * dt)
        throw std::invalid_argument("occupation_measure: window shorter than 10 dt");
    if (a < 0.0 || b > curve.T + 1e-12)
        throw std::invalid_argument("occupation_measure: window outside the horizon");

    const int N = x_grid.n_nodes;
    std::vector<double> grid_mass(static_cast<size_t>(N) * v_grid.m_nodes, 0.0);
    const double w = dt / (b - a);
    for (size_t k = 0; k + 1 < curve.samples.size(); ++k) {
        const double t = static_cast<double>(k) * dt;
        if (t < a || t > b) continue;
        // deposit at the step's departure point (one step further back)
        const double x = curve.samples[k + 1].x;
        const int j = v_grid.nearest_index(curve.samples[k].v);
        int i = 0;
        double frac = 0.0;
        x_grid.locate(x, i, frac);
        grid_mass[static_cast<size_t>(i) * v_grid.m_nodes + j] += w * (1.0 - frac);
        grid_mass[static_cast<size_t>((i + 1) % N) * v_grid.m_nodes + j] += w * frac;
    }
    double total = 0.0;
    for (double gm : grid_mass) total += gm;
    if (total <= 0.0)
        throw std::invalid_argument("occupation_measure: window contains no samples");
    std::vector<DiscreteMeasure::Cell> cells;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < v_grid.m_nodes; ++j) {
            const double mass = grid_mass[static_cast<size_t>(i) * v_grid.m_nodes + j];
            if (mass > 0.0) cells.push_back({i, j, mass / total});
        }
    const double tol = std::max(tol_closed_floor,
                                2.0 / (b - a) + 5.0 * (x_grid.h() + dt));
    return DiscreteMeasure::make(x_grid, v_grid, std::move(cells), tol);
}

// ---------------------------------------------------------------------------
// Ordinal classification and the comparison oracle

namespace {
template <typename UArg>
OrdinalReport classify_impl(const DiscreteMeasure& mu, const LagrangianView& view,
                            const UArg& u_at, double eps_ordinal, int measure_id) {
    double integral = 0.0;
    for (const auto& c : mu.cells) {
        const double x = mu.x_grid.node(c.i);
        const double v = mu.v_grid.node(c.j);
        integral += c.mass * view.partials(x, v, u_at(x)).lu;
    }
    OrdinalReport rep;
    rep.integral_duL = integral;
    rep.is_ordinal = std::abs(integral) <= eps_ordinal;
    rep.measure_id = measure_id;
    return rep;
}
} // namespace

OrdinalReport ordinal_classify(const DiscreteMeasure& mu, const LagrangianView& view,
                               double theta, double eps_ordinal, int measure_id) {
    return classify_impl(mu, view, [&](double) { return theta; }, eps_ordinal,
                         measure_id);
}

OrdinalReport ordinal_classify(const DiscreteMeasure& mu, const LagrangianView& view,
                               const GridFunction& u, double eps_ordinal,
                               int measure_id) {
    return classify_impl(mu, view, [&](double x) { return u.interp(x); }, eps_ordinal,
                         measure_id);
}

ComparisonVerdict compare_with_measures(const GridFunction& u1, const GridFunction& u2,
                                        const std::vector<DiscreteMeasure>& measures,
                                        double tol_order) {
    if (u1.grid.n_nodes != u2.grid.n_nodes ||
        u1.grid.period != u2.grid.period)
        throw std::invalid_argument("compare_with_measures: grids differ");

    ComparisonVerdict verdict;
    if (measures.empty()) {
        // no ordinal measures: the solution is unique, the two must coincide
        verdict.uniqueness_mode = true;
        verdict.hypothesis_holds = true;
        verdict.max_violation = GridFunction::sup_distance(u1, u2);
        verdict.conclusion_holds = verdict.max_violation <= tol_order;
        return verdict;
    }
    verdict.hypothesis_holds = true;
    for (const auto& mu : measures)
        if (mu.integral_position(u1) > mu.integral_position(u2)) {
            verdict.hypothesis_holds = false;
            break;
        }
    verdict.max_violation = GridFunction::max_difference(u1, u2);
    verdict.conclusion_holds = verdict.max_violation <= tol_order;
    return verdict;
}

} // namespace ckam
