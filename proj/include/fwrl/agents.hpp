#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "fwrl/grid_map.hpp"
#include "fwrl/rng.hpp"

namespace fwrl {

enum class TieBreak : std::uint8_t { FixedOrder, SeededRandom };
enum class AgentKind : std::uint8_t { FWRL, QL, QLCAT, MBRL };

inline constexpr std::array<AgentKind, 4> kAgentKinds = {AgentKind::FWRL, AgentKind::QL,
                                                         AgentKind::QLCAT, AgentKind::MBRL};

std::string_view to_string(AgentKind kind);
std::optional<AgentKind> parse_agent_kind(std::string_view name);
std::string_view to_string(TieBreak tb);
std::optional<TieBreak> parse_tie_break(std::string_view name);

struct AgentConfig {
    double epsilon = 0.1;
    double alpha = 0.1;
    double gamma = 1.0;
    double q_init = 0.0;
    TieBreak tie_break = TieBreak::SeededRandom;

    void validate() const;
};

using ActionValues = std::array<double, kNumActions>;

inline constexpr double kUnreachable = -std::numeric_limits<double>::infinity();
inline bool is_reachable(double v) { return v != kUnreachable; }

/// Arg-max over actions. FixedOrder takes the first maximum in up, down,
/// left, right order; SeededRandom draws uniformly among the maxima.
/// All-unreachable values count as a tie over every action.
Direction select_greedy(const ActionValues& values, TieBreak tie_break, Rng& rng);

// ---------------------------------------------------------------------------
// Floyd-Warshall RL

/// Goal-conditioned action values F[s, a, g]: best known return of taking
/// `a` in `s` and then reaching `g`, excluding goal rewards. Starts at
/// kUnreachable everywhere. Rows (s, a) are contiguous over g.
class FWTable {
 public:
    explicit FWTable(std::size_t num_states);

    std::size_t num_states() const { return n_; }
    double at(StateId s, Action a, StateId g) const { return values_[offset(s, a) + g]; }
    void set(StateId s, Action a, StateId g, double v) { values_[offset(s, a) + g] = v; }
    ActionValues action_values(StateId s, StateId g) const;
    /// max_a F[s, a, g]
    double best(StateId s, StateId g) const;
    std::span<const double> raw() const { return values_; }

    friend bool operator==(const FWTable&, const FWTable&) = default;

 private:
    std::size_t offset(StateId s, Action a) const {
        return (static_cast<std::size_t>(s) * kNumActions + index_of(a)) * n_;
    }

    std::size_t n_;
    std::vector<double> values_;
};

Direction fwrl_policy(const FWTable& table, StateId s, StateId goal, TieBreak tie_break,
                      Rng& rng);

/// One max-plus relaxation pass through `pivot`:
///   F[k, a, l] = max(F[k, a, l], F[k, a, pivot] + max_p F[pivot, p, l]).
/// Unreachable operands never produce an update.
void fwrl_relax_through(FWTable& table, StateId pivot);

/// Records one transition. Goal-reward transitions (r >= goal_reward) are
/// ignored entirely. Otherwise writes the direct edge F[s, a, s_next] = r and
/// relaxes through s, then through s_next.
void fwrl_observe(FWTable& table, StateId s, Action a, double r, StateId s_next,
                  double goal_reward);

// ---------------------------------------------------------------------------
// Q-learning

/// Dense Q[key, a]. Keys are states for QL and (state, goal) pairs for QLCAT.
class QTable {
 public:
    QTable(std::size_t num_keys, double q_init);

    std::size_t num_keys() const { return num_keys_; }
    double q_init() const { return q_init_; }
    double at(std::size_t key, Action a) const { return values_[key * kNumActions + index_of(a)]; }
    void set(std::size_t key, Action a, double v) { values_[key * kNumActions + index_of(a)] = v; }
    ActionValues action_values(std::size_t key) const;
    double max_value(std::size_t key) const;
    bool is_uniform_init() const;

    friend bool operator==(const QTable&, const QTable&) = default;

 private:
    std::size_t num_keys_;
    double q_init_;
    std::vector<double> values_;
};

/// Q[key, a] += alpha * (r + gamma * max_a' Q[next_key, a'] - Q[key, a])
void ql_update(QTable& table, std::size_t key, Action a, double r, std::size_t next_key,
               double alpha, double gamma);
void ql_reset(QTable& table);

// ---------------------------------------------------------------------------
// Tabular model-based RL

/// Frequentist dynamics and reward estimates.
class ModelTables {
 public:
    explicit ModelTables(std::size_t num_states);

    std::size_t num_states() const { return n_; }
    std::uint32_t count(StateId s, Action a, StateId s_next) const {
        return counts_[pair_index(s, a) * n_ + s_next];
    }
    std::uint32_t visits(StateId s, Action a) const { return visits_[pair_index(s, a)]; }
    double reward_sum(StateId s, Action a) const { return reward_sum_[pair_index(s, a)]; }
    /// counts / visits; 0 when (s, a) was never visited.
    double probability(StateId s, Action a, StateId s_next) const;
    /// Observed successors of (s, a) with their counts, ascending by state.
    const std::vector<std::pair<StateId, std::uint32_t>>& successors(StateId s, Action a) const {
        return successors_[pair_index(s, a)];
    }

    /// Returns true when s_next is a successor of (s, a) not seen before.
    bool record(StateId s, Action a, double r, StateId s_next);

 private:
    std::size_t pair_index(StateId s, Action a) const {
        return static_cast<std::size_t>(s) * kNumActions + index_of(a);
    }

    std::size_t n_;
    std::vector<std::uint32_t> counts_;
    std::vector<std::uint32_t> visits_;
    std::vector<double> reward_sum_;
    std::vector<std::vector<std::pair<StateId, std::uint32_t>>> successors_;
};

/// counts(s,a,s_next) += 1, visits(s,a) += 1, reward_sum(s,a) += r.
/// Returns true when the successor support of (s, a) grew.
bool mbrl_observe(ModelTables& model, StateId s, Action a, double r, StateId s_next);

struct MbrlPlan {
    /// Horizon-limited action values, indexed by state. All zero at the goal.
    std::vector<ActionValues> q;

    Direction action(StateId s, TieBreak tie_break, Rng& rng) const;
    /// Greedy policy with FixedOrder ties.
    std::vector<Direction> policy() const;
};

/// Undiscounted finite-horizon value iteration on the estimated MDP.
/// Entering `goal` pays goal_reward and terminates. Unvisited (s, a) pairs
/// are self-loops paying step_reward.
MbrlPlan mbrl_plan(const ModelTables& model, StateId goal, int horizon, double goal_reward,
                   double step_reward);

// ---------------------------------------------------------------------------
// Agent contract

struct Transition {
    StateId state = 0;
    Action action = Direction::Up;
    double reward = 0.0;
    StateId next_state = 0;
};

/// Static facts about the task that an agent may be built with.
struct TaskInfo {
    std::size_t num_states = 0;
    double goal_reward = 10.0;
    double step_reward = -1.0;
    int horizon = 300;
};

class Agent {
 public:
    Agent(AgentConfig config, TaskInfo task);
    virtual ~Agent() = default;
    Agent(const Agent&) = delete;
    Agent& operator=(const Agent&) = delete;

    virtual AgentKind kind() const = 0;
    /// Called once before every episode with that episode's goal.
    virtual void begin_episode(StateId goal) = 0;
    virtual void observe(const Transition& t, StateId goal) = 0;
    /// Values the greedy policy maximises in `s` when heading for `goal`.
    virtual ActionValues action_values(StateId s, StateId goal) = 0;

    Direction greedy(StateId s, StateId goal, TieBreak tie_break, Rng& rng);
    /// Epsilon-greedy with the configured epsilon and tie-break.
    Direction act(StateId s, StateId goal, Rng& rng);

    const AgentConfig& config() const { return config_; }
    const TaskInfo& task() const { return task_; }

 protected:
    AgentConfig config_;
    TaskInfo task_;
};

/// With probability epsilon a uniform action, otherwise agent.greedy(...).
Direction act(Agent& agent, StateId s, StateId goal, double epsilon, Rng& rng);

class FwrlAgent final : public Agent {
 public:
    FwrlAgent(AgentConfig config, TaskInfo task);
    AgentKind kind() const override { return AgentKind::FWRL; }
    void begin_episode(StateId) override {}
    void observe(const Transition& t, StateId goal) override;
    ActionValues action_values(StateId s, StateId goal) override;
    const FWTable& table() const { return table_; }

 private:
    FWTable table_;
};

/// Q-learning over states; the table is cleared at every episode start.
class QlAgent final : public Agent {
 public:
    QlAgent(AgentConfig config, TaskInfo task);
    AgentKind kind() const override { return AgentKind::QL; }
    void begin_episode(StateId goal) override;
    void observe(const Transition& t, StateId goal) override;
    ActionValues action_values(StateId s, StateId goal) override;
    const QTable& table() const { return table_; }

 private:
    QTable table_;
};

/// Q-learning over (state, goal) keys, retained across episodes.
class QlcatAgent final : public Agent {
 public:
    QlcatAgent(AgentConfig config, TaskInfo task);
    AgentKind kind() const override { return AgentKind::QLCAT; }
    void begin_episode(StateId) override {}
    void observe(const Transition& t, StateId goal) override;
    ActionValues action_values(StateId s, StateId goal) override;
    const QTable& table() const { return table_; }
    std::size_t key(StateId s, StateId goal) const {
        return static_cast<std::size_t>(s) * task_.num_states + goal;
    }

 private:
    QTable table_;
};

/// Counts-based model, replanned when the goal changes or a new successor
/// is observed. Every transition is recorded, goal rewards included.
class MbrlAgent final : public Agent {
 public:
    MbrlAgent(AgentConfig config, TaskInfo task);
    AgentKind kind() const override { return AgentKind::MBRL; }
    void begin_episode(StateId goal) override;
    void observe(const Transition& t, StateId goal) override;
    ActionValues action_values(StateId s, StateId goal) override;
    const ModelTables& model() const { return model_; }

 private:
    const MbrlPlan& plan_for(StateId goal);

    ModelTables model_;
    MbrlPlan plan_;
    std::optional<StateId> planned_goal_;
    bool stale_ = true;
};

std::unique_ptr<Agent> make_agent(AgentKind kind, const AgentConfig& config, const TaskInfo& task);

}  // namespace fwrl
