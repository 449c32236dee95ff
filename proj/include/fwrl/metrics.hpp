#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fwrl/grid_map.hpp"
#include "fwrl/oracle.hpp"

namespace fwrl {

struct StepRecord {
    CellCoord state;
    Action action = Direction::Up;
    double reward = 0.0;
    CellCoord next_state;
    bool respawned = false;
};

/// One episode's trajectory. spawn_points[0] is the initial spawn and each
/// respawn appends one more, so segment i starts at spawn_points[i].
struct EpisodeLog {
    std::vector<StepRecord> records;
    std::vector<CellCoord> spawn_points;
    CellCoord goal;
};

struct EpisodeSummary {
    double total_reward = 0.0;
    std::optional<double> dist_ineff;
    int goals_reached = 0;
    int steps = 0;
};

double total_reward(const EpisodeLog& log);

/// Distance travelled over completed segments divided by the sum of their
/// shortest spawn-to-goal distances. Bumps move nothing; the final segment
/// counts only if it ends on the goal. Empty when no segment completed.
std::optional<double> distance_inefficiency(const EpisodeLog& log, const DistanceTable& oracle,
                                            const GridMap& map);

EpisodeSummary summarize_episode(const EpisodeLog& log, const DistanceTable& oracle,
                                 const GridMap& map);

/// Median of the final ceil(20%) of the series.
double median_last_fraction(std::span<const double> rewards, double fraction = 0.2);

/// 1-based index of the first episode whose trailing mean (window 10, or
/// fewer at the start) reaches fraction * (final trailing mean). Empty when
/// never reached, which happens whenever the final mean is negative and no
/// earlier window beats it.
std::optional<int> efficiency_index(std::span<const double> rewards, std::size_t window = 10,
                                    double fraction = 0.9);

/// Mean over defined entries; empty when none is defined.
std::optional<double> mean_defined(std::span<const std::optional<double>> values);

struct RunSummary {
    std::vector<double> rewards;
    std::vector<std::optional<double>> dist_ineff;
    double median_reward_last20 = 0.0;
    std::optional<int> efficiency_index;
    std::optional<double> mean_dist_ineff;
};

RunSummary summarize_run(std::span<const EpisodeSummary> episodes);

}  // namespace fwrl
