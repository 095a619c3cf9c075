#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace ckam {

/// Raised when a line-based config file cannot be parsed or validated.
/// The message always embeds "<source>:<line>:" so tooling can jump there.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a run-time check of a mathematical property fails, e.g. a
/// comparison-principle conclusion that its hypothesis promised.  The CLI
/// maps this (and only this) to exit code 2.
struct verification_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Result of a scalar maximization on a bracketing grid.
struct ScalarMax {
    double arg = 0.0;
    double value = 0.0;
};

/// Maximizes f over [lo, hi]: scans n_grid equispaced samples, requires the
/// best sample to be interior (throws std::domain_error otherwise — the box
/// does not bracket the maximizer), then shrinks the bracket around it with
/// golden-section steps.  The incumbent best point is kept, so a maximizer
/// that falls exactly on a scan sample is returned unperturbed.
ScalarMax maximize_on_grid(const std::function<double(double)>& f,
                           double lo, double hi, int n_grid, int n_golden);

/// Runs fn(i) for i in [0, n) on up to `worker_cap()` threads.  Tasks write
/// to disjoint slots chosen by index, so results are deterministic no matter
/// how many workers run.  Exceptions are rethrown on the calling thread.
void parallel_for(int n, const std::function<void(int)>& fn);

/// Worker-count cap: CONTACT_WEAKKAM_THREADS if set (min 1), otherwise the
/// hardware concurrency.
int worker_cap();

/// Formats a double with 17 significant digits, enough to round-trip the
/// exact binary value through decimal text.
std::string format_double(double v);

/// Strict double parser (whole string must be consumed).
/// Returns false on malformed input.
bool parse_double(const std::string& s, double& out);

/// Strict long parser, base 10.
bool parse_long(const std::string& s, long& out);

} // namespace ckam
