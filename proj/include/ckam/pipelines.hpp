#pragma once

#include <string>

#include "ckam/config.hpp"

namespace ckam {

/// Where a pipeline writes and the bookkeeping recorded in its report.
struct PipelineContext {
    std::string out_dir = "out";
    long seed = 0;  // reserved for randomized sampling; recorded only
};

/// Command drivers shared by the binary and the tests.  Each writes CSV
/// artifacts plus a key=value report.txt into ctx.out_dir (report.txt holds
/// the run's only timestamp, so data files are byte-reproducible) and
/// returns normally on success.  Failures surface as exceptions that the
/// binary maps to exit codes: config_error -> 1, verification_error -> 2,
/// anything else -> 1.  Divergent solves and blown-up flows are findings,
/// not failures.

/// Fixed-point solve at level c; init_arg is "const:K" or "file:PATH" (a
/// solution-schema CSV on the same grid).  Writes solution.csv.
void run_solve(const RunConfig& cfg, double c, const std::string& init_arg,
               const PipelineContext& ctx);

/// Samples theta -> c(theta) per the [scan] section on the standard scan
/// grids (64 position nodes, 33 velocity nodes up to |v| <= 2), grades the
/// itemized slope checks, probes the bottom of the admissible interval, and
/// classifies its shape.  Writes scan.csv.
void run_scan_c(const RunConfig& cfg, const PipelineContext& ctx);

/// Minimizing closed measures at the frozen level theta on the standard
/// scan grids: one LP solve, or vertex enumeration up to enumerate_count
/// when that is > 1.  Writes measure_<i>.csv per measure.
void run_mather(const RunConfig& cfg, double theta, int enumerate_count,
                const PipelineContext& ctx);

/// Measure-mediated comparison of two sampled solutions read from
/// solution-schema CSVs: if every ordinal measure at theta integrates u1
/// below u2, the pointwise order u1 <= u2 must follow (with no ordinal
/// measure the solutions must coincide).  A failed conclusion under a
/// holding hypothesis is a verification_error.
void run_compare(const RunConfig& cfg, const std::string& u1_path,
                 const std::string& u2_path, double theta,
                 const PipelineContext& ctx);

/// Integrates the characteristic system from start_arg = "x,p,u" for time T
/// at level c with RK4 step dt_ode.  Writes trajectory.csv.
void run_flow(const RunConfig& cfg, const std::string& start_arg, double T,
              double c, double dt_ode, const PipelineContext& ctx);

/// Built-in demonstration pipelines (self-contained presets and grids):
///   fig1: the descending stationary family of the pendulum preset with
///         residual, ordering, and comparison checks plus the minimizing
///         measure at theta = 0;
///   fig2: the two separatrix-branch solutions of the period-2 preset with
///         residual and distinctness checks plus the two-vertex measure
///         enumeration at theta = 0.
void run_example(const std::string& name, const PipelineContext& ctx);

} // namespace ckam
