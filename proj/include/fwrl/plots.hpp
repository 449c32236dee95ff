#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fwrl/grid_map.hpp"
#include "fwrl/harness.hpp"

namespace fwrl {

// Self-contained SVG output. Every number is printed with fixed precision so
// identical input gives identical bytes.

/// Mean reward per episode for each agent, with a min/max band over seeds.
std::string render_reward_curves_svg(const std::vector<ResultRow>& rows,
                                     const std::string& title = "Reward per episode");

/// One bar per agent: mean distance-inefficiency. Agents with no defined
/// value get an "n/a" label instead of a bar.
std::string render_dist_ineff_svg(const std::vector<AgentSummary>& agents,
                                  const std::string& title = "Distance inefficiency");

struct HeatmapPanel {
    std::string title;
    /// Per-state value indexed by StateId; kUnreachable is drawn grey.
    std::vector<double> values;
    std::optional<CellCoord> start;
    std::optional<CellCoord> goal;
    std::vector<CellCoord> trajectory;
};

struct HeatmapRow {
    std::string label;
    std::vector<HeatmapPanel> panels;
};

/// Grid of panels, one row per agent. Walls are black.
std::string render_value_heatmap_svg(const GridMap& map, const std::vector<HeatmapRow>& rows);

/// curves.svg and dist_ineff.svg into `dir`.
void emit_plots(const ResultsBundle& bundle, const std::filesystem::path& dir);

}  // namespace fwrl
