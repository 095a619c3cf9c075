#pragma once

#include <string>
#include <vector>

#include "ckam/ccurve.hpp"
#include "ckam/flow.hpp"
#include "ckam/grid.hpp"
#include "ckam/lax_oleinik.hpp"
#include "ckam/measures.hpp"

namespace ckam {

/// All emitters share the conventions: comma separator, one header line,
/// LF line endings, doubles printed with 17 significant digits (lossless
/// decimal round trip), booleans/flags as 0 or 1, NaN spelled "nan".

/// Columns: x, u, du_upwind, residual, kink_flag.
std::string csv_solution(const GridFunction& u, const ResidualReport& rep);

/// Columns: x, v, mass.
std::string csv_measure(const DiscreteMeasure& mu);

/// Columns: t, x, p_or_v, u, H, multiplier.
std::string csv_trajectory(const Trajectory& traj);

/// Columns: theta, c, slope_left, slope_right, integral_duH,
/// ordinal_nonempty, method_gap.
std::string csv_scan(const std::vector<CCurveSample>& samples);

/// Reads a solution-schema CSV back into a GridFunction: the x column must
/// be a uniform ascending grid starting at 0 (its implied period is
/// n * spacing) and the u column supplies the values, bit-identical to what
/// csv_solution printed.  Extra columns are ignored.  Malformed input is a
/// config_error with the offending line.
GridFunction read_solution_csv(const std::string& text,
                               const std::string& source = "csv");

/// Loads the file and delegates to read_solution_csv.
GridFunction load_solution_csv(const std::string& path);

/// Writes text to path, creating parent directories; throws config_error
/// when the path cannot be opened.
void write_text_file(const std::string& path, const std::string& text);

} // namespace ckam
