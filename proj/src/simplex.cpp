#include "ckam/simplex.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace ckam {

namespace {
constexpr double kEnterTol = 1e-9;    // reduced cost threshold for entering
constexpr double kRatioTie = 1e-12;   // ratio-test tie tolerance
constexpr double kFeasTol = 1e-7;     // phase-1 residual / pivot detection
} // namespace

LpResult solve_lp(const std::vector<double>& c, const std::vector<double>& A,
                  int m, int n, const std::vector<double>& b,
                  long max_iterations) {
    if (m <= 0 || n <= 0)
        throw std::invalid_argument("solve_lp: empty program");
    if (A.size() != static_cast<size_t>(m) * static_cast<size_t>(n) ||
        b.size() != static_cast<size_t>(m) || c.size() != static_cast<size_t>(n))
        throw std::invalid_argument("solve_lp: dimension mismatch");

    const int width = n + m;             // original + artificial columns
    std::vector<double> T(static_cast<size_t>(m) * width, 0.0);
    std::vector<double> rhs(b);
    auto row = [&](int i) { return T.data() + static_cast<size_t>(i) * width; };

    for (int i = 0; i < m; ++i) {
        const double flip = rhs[i] < 0.0 ? -1.0 : 1.0;
        rhs[i] *= flip;
        double* r = row(i);
        for (int j = 0; j < n; ++j) r[j] = flip * A[static_cast<size_t>(i) * n + j];
        r[n + i] = 1.0;                  // artificial basis starts feasible
    }
    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;

    int live = m;                        // rows still in the tableau
    LpResult res;

    // Pivot on (r, col): normalize row r, eliminate the column elsewhere and
    // from the reduced-cost row.
    auto pivot = [&](int r, int col, std::vector<double>& cost) {
        double* pr = row(r);
        const double piv = pr[col];
        for (int j = 0; j < width; ++j) pr[j] /= piv;
        rhs[r] /= piv;
        for (int i = 0; i < live; ++i) {
            if (i == r) continue;
            double* ri = row(i);
            const double f = ri[col];
            if (f == 0.0) continue;
            for (int j = 0; j < width; ++j) ri[j] -= f * pr[j];
            rhs[i] -= f * rhs[r];
        }
        if (!cost.empty()) {
            const double f = cost[static_cast<size_t>(col)];
            if (f != 0.0)
                for (int j = 0; j < width; ++j) cost[static_cast<size_t>(j)] -= f * pr[j];
        }
    };

    // Runs one simplex phase; entering column restricted to [0, allowed_n).
    enum class PhaseEnd { optimal, unbounded, limit };
    auto run_phase = [&](std::vector<double>& cost, int allowed_n,
                         long& iterations) -> PhaseEnd {
        for (int r = 0; r < live; ++r) {             // price out the basis
            const double f = cost[static_cast<size_t>(basis[r])];
            if (f == 0.0) continue;
            const double* pr = row(r);
            for (int j = 0; j < width; ++j) cost[static_cast<size_t>(j)] -= f * pr[j];
        }
        for (long it = 0; it < max_iterations; ++it) {
            ++iterations;
            int enter = -1;                           // Bland: smallest index
            for (int j = 0; j < allowed_n; ++j)
                if (cost[static_cast<size_t>(j)] < -kEnterTol) {
                    enter = j;
                    break;
                }
            if (enter < 0) return PhaseEnd::optimal;
            int leave = -1;
            double best = 0.0;
            for (int i = 0; i < live; ++i) {
                const double a = row(i)[enter];
                if (a <= kEnterTol) continue;
                const double ratio = rhs[i] / a;
                if (leave < 0 || ratio < best - kRatioTie ||
                    (std::abs(ratio - best) <= kRatioTie && basis[i] < basis[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave < 0) return PhaseEnd::unbounded;
            pivot(leave, enter, cost);
            basis[leave] = enter;
        }
        return PhaseEnd::limit;
    };

    // Phase 1: minimize the artificial mass.
    std::vector<double> cost1(width, 0.0);
    for (int j = n; j < width; ++j) cost1[static_cast<size_t>(j)] = 1.0;
    const PhaseEnd p1 = run_phase(cost1, width, res.phase1_iterations);
    if (p1 == PhaseEnd::limit) {
        res.status = LpResult::Status::iteration_limit;
        return res;
    }
    double artificial_mass = 0.0;
    for (int i = 0; i < live; ++i)
        if (basis[i] >= n) artificial_mass += rhs[i];
    if (artificial_mass > kFeasTol) {
        res.status = LpResult::Status::infeasible;
        return res;
    }

    // Drive remaining artificials out of the basis; rows with no usable pivot
    // are redundant and dropped.
    std::vector<double> nocost;
    int write = 0;
    for (int i = 0; i < live; ++i) {
        if (basis[i] >= n) {
            int col = -1;
            const double* ri = row(i);
            for (int j = 0; j < n; ++j)
                if (std::abs(ri[j]) > kFeasTol) {
                    col = j;
                    break;
                }
            if (col < 0) continue;                    // redundant row: skip it
            pivot(i, col, nocost);
            basis[i] = col;
        }
        if (write != i) {
            double* dst = row(write);
            const double* src = row(i);
            for (int j = 0; j < width; ++j) dst[j] = src[j];
            rhs[write] = rhs[i];
            basis[write] = basis[i];
        }
        ++write;
    }
    res.dropped_rows = live - write;
    live = write;

    // Phase 2: the real objective over the original columns.
    std::vector<double> cost2(width, 0.0);
    for (int j = 0; j < n; ++j) cost2[static_cast<size_t>(j)] = c[static_cast<size_t>(j)];
    const PhaseEnd p2 = run_phase(cost2, n, res.phase2_iterations);
    if (p2 == PhaseEnd::limit) {
        res.status = LpResult::Status::iteration_limit;
        return res;
    }
    if (p2 == PhaseEnd::unbounded) {
        res.status = LpResult::Status::unbounded;
        return res;
    }

    res.status = LpResult::Status::optimal;
    res.x.assign(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < live; ++i)
        if (basis[i] < n) res.x[static_cast<size_t>(basis[i])] = rhs[i];
    res.value = 0.0;
    for (int j = 0; j < n; ++j) res.value += c[static_cast<size_t>(j)] * res.x[static_cast<size_t>(j)];
    return res;
}

} // namespace ckam
