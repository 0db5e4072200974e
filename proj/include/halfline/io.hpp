#pragma once

#include <string>
#include <utility>

#include "halfline/fixedpoint.hpp"
#include "halfline/mesh.hpp"
#include "halfline/montecarlo.hpp"

namespace halfline {

/// Writes `x,t,u` rows (plus `du_dx` when a derivative is attached),
/// row-major by time level, full-precision decimals, LF endings.
void write_grid_csv(const std::string& path, const GridFunction& g,
                    const GridFunction* derivative = nullptr);

/// Reads a grid CSV written by write_grid_csv. Returns the value grid and,
/// when the file has a du_dx column, the derivative grid.
std::pair<GridFunction, std::optional<GridFunction>> read_grid_csv(const std::string& path);

/// Policy export: `x,t,alpha` rows, same layout as the grid CSV.
void write_policy_csv(const std::string& path, const FeedbackPolicy& policy);

FeedbackPolicy read_policy_csv(const std::string& path, const ControlSet& controls);

/// One diagnostics record as a JSON line:
/// {"n":..,"bielecki_diff":..,"sup_diff":..,"q_estimate":..}.
std::string diagnostics_json_line(const IterationRecord& rec);

void write_diagnostics_jsonl(const std::string& path, const IterationDiagnostics& d);

/// {"mean":..,"stderr":..,"n_paths":..}
std::string estimate_json(const McEstimate& e);

}  // namespace halfline
