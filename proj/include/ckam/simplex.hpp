#pragma once

#include <vector>

namespace ckam {

/// Outcome of an equality-form linear program  min c.x, A x = b, x >= 0.
struct LpResult {
    enum class Status { optimal, infeasible, unbounded, iteration_limit };

    Status status = Status::infeasible;
    std::vector<double> x;      // primal solution, empty unless optimal
    double value = 0.0;         // c.x at the optimum
    long phase1_iterations = 0;
    long phase2_iterations = 0;
    int dropped_rows = 0;       // redundant (consistent) equality rows removed
};

/// Dense two-phase tableau simplex with Bland's entering rule, so the pivot
/// sequence is deterministic and cannot cycle.  A is row-major with m rows
/// and n columns.  Rows of A may be linearly dependent: consistent redundant
/// rows are detected after phase 1 and dropped; inconsistent systems report
/// infeasible.  Intended for small dense problems (n up to ~1e5, m up to a
/// few hundred).
LpResult solve_lp(const std::vector<double>& c, const std::vector<double>& A,
                  int m, int n, const std::vector<double>& b,
                  long max_iterations = 200000);

} // namespace ckam
