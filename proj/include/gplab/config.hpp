#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "gplab/ensemble.hpp"

namespace gplab {

/// key -> (value, 1-based line number) from a key=value file. Blank lines and
/// lines starting with '#' are skipped; whitespace around keys and values is
/// trimmed. Duplicate keys and lines without '=' are errors.
using ConfigEntries = std::map<std::string, std::pair<std::string, std::size_t>>;

ConfigEntries read_config(const std::string& path);
ConfigEntries parse_config(const std::string& text);

/// Applies one setting to a plan. Keys: dim, l_grid, schedule (theorem,
/// explicit or a coupling list), c, couplings, samples, seed, out, tol_eig,
/// tol_gp, distribution, v_max, bernoulli_p, potential_levels, experiment,
/// workers, lambda, levels, widths, window, window_positions, box_sides,
/// gap_etas, eps_grid, fields. Lists are comma separated. Throws
/// std::invalid_argument naming the key on bad input.
void apply_setting(ExperimentPlan& plan, const std::string& key, const std::string& value);

void apply_config(ExperimentPlan& plan, const ConfigEntries& entries);

/// Defaults per experiment, matching the desk-scale grids.
ExperimentPlan default_plan(ExperimentKind kind);

}  // namespace gplab
