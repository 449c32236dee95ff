#include "fwrl/env.hpp"

#include <cmath>
#include <string>

namespace fwrl {

void EnvConfig::validate() const {
    if (steps_per_episode <= 0) {
        throw std::invalid_argument("steps_per_episode must be positive");
    }
    if (!(goal_reward > 0.0)) throw std::invalid_argument("goal_reward must be > 0");
    if (!(step_reward <= 0.0)) throw std::invalid_argument("step_reward must be <= 0");
    if (!(goal_reward > std::abs(step_reward))) {
        throw std::invalid_argument("goal_reward must exceed |step_reward|");
    }
    if (!(wind_prob >= 0.0 && wind_prob <= 1.0)) {
        throw std::invalid_argument("wind_prob must lie in [0, 1]");
    }
}

CellCoord intended_move(CellCoord pos, Direction action, const GridMap& map) {
    CellCoord next = pos;
    switch (action) {
        case Direction::Up:
            --next.y;
            break;
        case Direction::Down:
            ++next.y;
            break;
        case Direction::Left:
            --next.x;
            break;
        case Direction::Right:
            ++next.x;
            break;
    }
    return map.is_wall(next) ? pos : next;
}

Environment::Environment(EnvConfig config) : config_(std::move(config)) { config_.validate(); }

CellCoord Environment::sample_excluding(Rng& rng, CellCoord excluded) const {
    const auto& states = config_.map.states();
    const StateId skip = config_.map.require_state(excluded);
    auto idx = static_cast<StateId>(rng.below(states.size() - 1));
    if (idx >= skip) ++idx;
    return states[idx];
}

EnvState Environment::begin_episode(std::uint64_t seed) const {
    EnvState st{{}, {}, 0, Rng(seed)};
    const auto& states = config_.map.states();
    st.goal = states[st.rng.below(states.size())];
    st.agent = sample_excluding(st.rng, st.goal);
    return st;
}

StepOutcome Environment::step(EnvState& state, Action action) const {
    if (state.step_index >= config_.steps_per_episode) throw EpisodeOver();

    const auto& map = config_.map;
    Direction move = action;
    const Cell& here = map.at(state.agent);
    // No draw at wind_prob == 0 so a windy map replays the calm map's stream.
    if (here.kind == CellKind::Wind && config_.wind_prob > 0.0 &&
        state.rng.bernoulli(config_.wind_prob)) {
        move = here.wind;
    }

    StepOutcome out;
    out.next_state = intended_move(state.agent, move, map);
    out.reached_goal = out.next_state == state.goal;
    if (out.reached_goal) {
        out.reward = config_.goal_reward;
        out.respawned = true;
        state.agent = sample_excluding(state.rng, state.goal);
    } else {
        out.reward = config_.step_reward;
        state.agent = out.next_state;
    }
    ++state.step_index;
    out.episode_done = state.step_index == config_.steps_per_episode;
    out.agent = state.agent;
    return out;
}

}  // namespace fwrl
