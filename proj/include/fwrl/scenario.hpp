#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fwrl/agents.hpp"
#include "fwrl/grid_map.hpp"

namespace fwrl {

struct ScenarioEpisode {
    CellCoord start;
    CellCoord goal;
};

/// Scripted transfer test: train on fixed (start, goal) episodes, then
/// follow each agent's greedy policy on a held-out pair.
struct ScenarioScript {
    std::string map = "h_maze";
    std::vector<ScenarioEpisode> training;
    ScenarioEpisode test;
    bool terminate_on_goal = true;
    std::uint64_t seed = 0;
    std::vector<AgentKind> agents = {AgentKind::FWRL, AgentKind::QLCAT};
    double epsilon = 0.1;
    double alpha = 1.0;
    double goal_reward = 10.0;
    double step_reward = -1.0;
    double wind_prob = 0.25;
    /// Step cap per training episode.
    int training_steps = 1000;
    /// Step budget for the greedy test episode.
    int test_steps = 300;

    /// Cells must be free; the test goal must be some training goal and the
    /// test start some training start. Throws std::invalid_argument.
    void validate(const GridMap& map) const;
};

/// Two training episodes whose shortest paths share the middle corridor of
/// h_maze, tested on the first goal from the second start.
ScenarioScript default_h_maze_script();

/// Flat `key = value` format; see docs/config.md. Throws ConfigError.
ScenarioScript parse_scenario_script(std::string_view text);

struct ValueSnapshot {
    std::string label;
    CellCoord start;
    CellCoord goal;
    /// max_a of the agent's action values toward `goal`, indexed by StateId.
    std::vector<double> state_values;
    std::vector<CellCoord> trajectory;
};

struct AgentScenarioResult {
    AgentKind algo = AgentKind::FWRL;
    std::vector<int> training_steps;
    std::vector<bool> training_reached;
    bool reached = false;
    int steps = 0;
    std::vector<CellCoord> trajectory;  // includes the start cell
    std::vector<ValueSnapshot> snapshots;  // one per training episode, then the test
    std::vector<FWTable> fw_snapshots;     // FWRL only, after each training episode
};

struct ScenarioReport {
    std::string map_name;
    int oracle_distance = 0;
    std::vector<AgentScenarioResult> agents;
};

ScenarioReport run_scenario(const ScenarioScript& script);

void write_scenario_json(const ScenarioReport& report, std::ostream& out);

/// scenario.json, fw_snapshot_ep<N>.csv and heatmap.svg into `dir`.
void write_scenario(const ScenarioReport& report, const GridMap& map,
                    const std::filesystem::path& dir);

}  // namespace fwrl
