#pragma once

#include <cstdint>
#include <stdexcept>

#include "fwrl/grid_map.hpp"
#include "fwrl/rng.hpp"

namespace fwrl {

struct EnvConfig {
    GridMap map;
    int steps_per_episode = 300;
    double goal_reward = 10.0;
    double step_reward = -1.0;
    /// Probability that a wind cell overrides the chosen action.
    double wind_prob = 0.25;

    /// Throws std::invalid_argument when an invariant is broken.
    void validate() const;
};

struct EnvState {
    CellCoord agent;
    CellCoord goal;
    int step_index = 0;
    Rng rng;

    friend bool operator==(const EnvState&, const EnvState&) = default;
};

struct StepOutcome {
    /// Cell the move ended in. Equals the goal when reached_goal is set,
    /// even though the agent itself has already been respawned.
    CellCoord next_state;
    double reward = 0.0;
    bool reached_goal = false;
    bool respawned = false;
    bool episode_done = false;
    /// Where the agent is after the step: next_state, or the respawn cell.
    CellCoord agent;

    friend bool operator==(const StepOutcome&, const StepOutcome&) = default;
};

class EpisodeOver : public std::logic_error {
 public:
    EpisodeOver() : std::logic_error("step called after the episode finished") {}
};

/// Neighbouring cell in direction `action`, or `pos` when that cell is a wall.
CellCoord intended_move(CellCoord pos, Direction action, const GridMap& map);

/// Episodic multi-goal grid world. Reaching the goal pays goal_reward and
/// teleports the agent to a random non-goal cell; the goal and the episode
/// clock are unchanged. Episodes always last exactly steps_per_episode steps.
class Environment {
 public:
    explicit Environment(EnvConfig config);

    const EnvConfig& config() const { return config_; }
    const GridMap& map() const { return config_.map; }

    /// Uniform goal, then uniform agent cell distinct from the goal.
    EnvState begin_episode(std::uint64_t seed) const;
    /// Advances `state` by one step. Throws EpisodeOver when the episode is done.
    StepOutcome step(EnvState& state, Action action) const;

 private:
    CellCoord sample_excluding(Rng& rng, CellCoord excluded) const;

    EnvConfig config_;
};

}  // namespace fwrl
