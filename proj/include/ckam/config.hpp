#pragma once

#include <optional>
#include <string>

#include "ckam/grid.hpp"
#include "ckam/hamiltonian.hpp"

namespace ckam {

/// Validated run configuration assembled from an ini-style text: `[section]`
/// headers, `key = value` lines, `#` comments.  Sections and keys:
///   [hamiltonian]  preset (pendulum_example | piecewise_example |
///                  mechanical); for mechanical also potential_a0,
///                  potential_cos, potential_sin, coupling_a0, coupling_cos,
///                  coupling_sin (whitespace-separated harmonic coefficient
///                  lists) and u_shift (coupling profile f(u) = u - u_shift).
///   [grid]         period, n_nodes, m_nodes, v_max
///   [solver]       dt, tol_fix, max_iter
///   [measure]      eps_ordinal, tol_closed
///   [scan]         theta_min, theta_max, n_samples, method
///   [output]       dir
/// Every key has the default recorded below; the named presets pin their own
/// period (1 and 2) and reject a conflicting [grid] period.
struct RunConfig {
    std::string preset = "pendulum_example";
    TrigPoly potential;           // mechanical preset only
    TrigPoly coupling;            // mechanical preset only
    std::optional<double> u_shift;

    double period = 1.0;
    int n_nodes = 512;
    int m_nodes = 65;
    double v_max = 4.0;

    double dt = 0.0;              // 0 selects 16 h / v_max
    double tol_fix = 1e-8;
    long max_iter = 200000;

    double eps_ordinal = 1e-3;
    double tol_closed = 1e-8;

    double theta_min = -1.0;
    double theta_max = 2.0;
    int n_samples = 31;
    std::string method = "both";  // lp | laxoleinik | both

    std::string out_dir = "out";

    ContactHamiltonianSpec make_spec() const;
    TorusGrid1D x_grid() const;
    VelocityGrid v_grid() const;
    double dt_or_default() const;
};

/// Parses and validates; unknown sections or keys, duplicate keys,
/// non-numeric values, and constraint violations raise config_error with a
/// "<source>:<line>:" prefix.
RunConfig parse_config(const std::string& text,
                       const std::string& source = "config");

/// parse_config over the file's contents; a missing file is a config_error.
RunConfig load_config_file(const std::string& path);

} // namespace ckam
