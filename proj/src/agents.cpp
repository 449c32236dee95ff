#include "fwrl/agents.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace fwrl {

std::string_view to_string(AgentKind kind) {
    switch (kind) {
        case AgentKind::FWRL:
            return "FWRL";
        case AgentKind::QL:
            return "QL";
        case AgentKind::QLCAT:
            return "QLCAT";
        case AgentKind::MBRL:
            return "MBRL";
    }
    return "?";
}

std::optional<AgentKind> parse_agent_kind(std::string_view name) {
    for (AgentKind k : kAgentKinds) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

std::string_view to_string(TieBreak tb) {
    return tb == TieBreak::FixedOrder ? "fixed" : "random";
}

std::optional<TieBreak> parse_tie_break(std::string_view name) {
    if (name == "fixed" || name == "FixedOrder") return TieBreak::FixedOrder;
    if (name == "random" || name == "SeededRandom") return TieBreak::SeededRandom;
    return std::nullopt;
}

void AgentConfig::validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
}

Direction select_greedy(const ActionValues& values, TieBreak tie_break, Rng& rng) {
    const double best = *std::max_element(values.begin(), values.end());
    if (tie_break == TieBreak::FixedOrder) {
        for (std::size_t i = 0; i < kNumActions; ++i) {
            if (values[i] == best) return kDirections[i];
        }
    }
    std::array<Direction, kNumActions> ties{};
    std::size_t n = 0;
    for (std::size_t i = 0; i < kNumActions; ++i) {
        if (values[i] == best) ties[n++] = kDirections[i];
    }
    return n == 1 ? ties[0] : ties[rng.below(n)];
}

// ---------------------------------------------------------------------------

FWTable::FWTable(std::size_t num_states)
    : n_(num_states), values_(num_states * kNumActions * num_states, kUnreachable) {}

ActionValues FWTable::action_values(StateId s, StateId g) const {
    ActionValues out{};
    for (std::size_t i = 0; i < kNumActions; ++i) out[i] = at(s, kDirections[i], g);
    return out;
}

double FWTable::best(StateId s, StateId g) const {
    const auto v = action_values(s, g);
    return *std::max_element(v.begin(), v.end());
}

Direction fwrl_policy(const FWTable& table, StateId s, StateId goal, TieBreak tie_break,
                      Rng& rng) {
    return select_greedy(table.action_values(s, goal), tie_break, rng);
}

void fwrl_relax_through(FWTable& table, StateId pivot) {
    const std::size_t n = table.num_states();
    // Frozen before the pass: max_p F[pivot, p, l], restricted to reachable l.
    std::vector<std::pair<StateId, double>> onward;
    onward.reserve(n);
    for (StateId l = 0; l < n; ++l) {
        const double v = table.best(pivot, l);
        if (is_reachable(v)) onward.emplace_back(l, v);
    }
    if (onward.empty()) return;
    for (StateId k = 0; k < n; ++k) {
        for (Direction a : kDirections) {
            const double to_pivot = table.at(k, a, pivot);
            if (!is_reachable(to_pivot)) continue;
            for (const auto& [l, via] : onward) {
                const double candidate = to_pivot + via;
                if (candidate > table.at(k, a, l)) table.set(k, a, l, candidate);
            }
        }
    }
}

void fwrl_observe(FWTable& table, StateId s, Action a, double r, StateId s_next,
                  double goal_reward) {
    if (r >= goal_reward) return;
    table.set(s, a, s_next, r);
    fwrl_relax_through(table, s);
    fwrl_relax_through(table, s_next);
}

// ---------------------------------------------------------------------------

QTable::QTable(std::size_t num_keys, double q_init)
    : num_keys_(num_keys), q_init_(q_init), values_(num_keys * kNumActions, q_init) {}

ActionValues QTable::action_values(std::size_t key) const {
    ActionValues out{};
    for (std::size_t i = 0; i < kNumActions; ++i) out[i] = values_[key * kNumActions + i];
    return out;
}

double QTable::max_value(std::size_t key) const {
    const auto v = action_values(key);
    return *std::max_element(v.begin(), v.end());
}

bool QTable::is_uniform_init() const {
    return std::all_of(values_.begin(), values_.end(), [&](double v) { return v == q_init_; });
}

void ql_update(QTable& table, std::size_t key, Action a, double r, std::size_t next_key,
               double alpha, double gamma) {
    const double q = table.at(key, a);
    const double target = r + gamma * table.max_value(next_key);
    table.set(key, a, q + alpha * (target - q));
}

void ql_reset(QTable& table) { table = QTable(table.num_keys(), table.q_init()); }

// ---------------------------------------------------------------------------

ModelTables::ModelTables(std::size_t num_states)
    : n_(num_states),
      counts_(num_states * kNumActions * num_states, 0),
      visits_(num_states * kNumActions, 0),
      reward_sum_(num_states * kNumActions, 0.0),
      successors_(num_states * kNumActions) {}

double ModelTables::probability(StateId s, Action a, StateId s_next) const {
    const auto v = visits(s, a);
    return v == 0 ? 0.0 : static_cast<double>(count(s, a, s_next)) / v;
}

bool ModelTables::record(StateId s, Action a, double r, StateId s_next) {
    const std::size_t p = pair_index(s, a);
    const bool fresh = counts_[p * n_ + s_next]++ == 0;
    ++visits_[p];
    reward_sum_[p] += r;
    auto& succ = successors_[p];
    auto it = std::lower_bound(succ.begin(), succ.end(), s_next,
                               [](const auto& e, StateId t) { return e.first < t; });
    if (it != succ.end() && it->first == s_next) {
        ++it->second;
    } else {
        succ.insert(it, {s_next, 1});
    }
    return fresh;
}

bool mbrl_observe(ModelTables& model, StateId s, Action a, double r, StateId s_next) {
    return model.record(s, a, r, s_next);
}

Direction MbrlPlan::action(StateId s, TieBreak tie_break, Rng& rng) const {
    return select_greedy(q[s], tie_break, rng);
}

std::vector<Direction> MbrlPlan::policy() const {
    std::vector<Direction> out;
    out.reserve(q.size());
    Rng unused(0);
    for (const auto& values : q) out.push_back(select_greedy(values, TieBreak::FixedOrder, unused));
    return out;
}

MbrlPlan mbrl_plan(const ModelTables& model, StateId goal, int horizon, double goal_reward,
                   double step_reward) {
    const std::size_t n = model.num_states();
    MbrlPlan plan;
    plan.q.assign(n, ActionValues{});
    std::vector<double> value(n, 0.0);
    std::vector<double> next_value(n, 0.0);
    for (int h = 0; h < horizon; ++h) {
        for (StateId s = 0; s < n; ++s) {
            if (s == goal) continue;
            for (std::size_t i = 0; i < kNumActions; ++i) {
                const Direction a = kDirections[i];
                const auto visits = model.visits(s, a);
                double q = 0.0;
                if (visits == 0) {
                    q = step_reward + value[s];
                } else {
                    const double mean_reward = model.reward_sum(s, a) / visits;
                    for (const auto& [t, c] : model.successors(s, a)) {
                        const double p = static_cast<double>(c) / visits;
                        q += p * (t == goal ? goal_reward : mean_reward + value[t]);
                    }
                }
                plan.q[s][i] = q;
            }
            next_value[s] = *std::max_element(plan.q[s].begin(), plan.q[s].end());
        }
        std::swap(value, next_value);
    }
    return plan;
}

// ---------------------------------------------------------------------------

Agent::Agent(AgentConfig config, TaskInfo task) : config_(config), task_(task) {
    config_.validate();
    if (task_.num_states == 0) throw std::invalid_argument("agent needs at least one state");
}

Direction Agent::greedy(StateId s, StateId goal, TieBreak tie_break, Rng& rng) {
    return select_greedy(action_values(s, goal), tie_break, rng);
}

Direction Agent::act(StateId s, StateId goal, Rng& rng) {
    return fwrl::act(*this, s, goal, config_.epsilon, rng);
}

Direction act(Agent& agent, StateId s, StateId goal, double epsilon, Rng& rng) {
    if (rng.bernoulli(epsilon)) return kDirections[rng.below(kNumActions)];
    return agent.greedy(s, goal, agent.config().tie_break, rng);
}

FwrlAgent::FwrlAgent(AgentConfig config, TaskInfo task)
    : Agent(config, task), table_(task.num_states) {}

void FwrlAgent::observe(const Transition& t, StateId) {
    fwrl_observe(table_, t.state, t.action, t.reward, t.next_state, task_.goal_reward);
}

ActionValues FwrlAgent::action_values(StateId s, StateId goal) {
    return table_.action_values(s, goal);
}

QlAgent::QlAgent(AgentConfig config, TaskInfo task)
    : Agent(config, task), table_(task.num_states, config.q_init) {}

void QlAgent::begin_episode(StateId) { ql_reset(table_); }

void QlAgent::observe(const Transition& t, StateId) {
    ql_update(table_, t.state, t.action, t.reward, t.next_state, config_.alpha, config_.gamma);
}

ActionValues QlAgent::action_values(StateId s, StateId) { return table_.action_values(s); }

QlcatAgent::QlcatAgent(AgentConfig config, TaskInfo task)
    : Agent(config, task), table_(task.num_states * task.num_states, config.q_init) {}

void QlcatAgent::observe(const Transition& t, StateId goal) {
    ql_update(table_, key(t.state, goal), t.action, t.reward, key(t.next_state, goal),
              config_.alpha, config_.gamma);
}

ActionValues QlcatAgent::action_values(StateId s, StateId goal) {
    return table_.action_values(key(s, goal));
}

MbrlAgent::MbrlAgent(AgentConfig config, TaskInfo task)
    : Agent(config, task), model_(task.num_states) {}

void MbrlAgent::begin_episode(StateId goal) {
    if (planned_goal_ != goal) stale_ = true;
}

void MbrlAgent::observe(const Transition& t, StateId) {
    if (mbrl_observe(model_, t.state, t.action, t.reward, t.next_state)) stale_ = true;
}

const MbrlPlan& MbrlAgent::plan_for(StateId goal) {
    if (stale_ || planned_goal_ != goal) {
        plan_ = mbrl_plan(model_, goal, task_.horizon, task_.goal_reward, task_.step_reward);
        planned_goal_ = goal;
        stale_ = false;
    }
    return plan_;
}

ActionValues MbrlAgent::action_values(StateId s, StateId goal) { return plan_for(goal).q[s]; }

std::unique_ptr<Agent> make_agent(AgentKind kind, const AgentConfig& config, const TaskInfo& task) {
    switch (kind) {
        case AgentKind::FWRL:
            return std::make_unique<FwrlAgent>(config, task);
        case AgentKind::QL:
            return std::make_unique<QlAgent>(config, task);
        case AgentKind::QLCAT:
            return std::make_unique<QlcatAgent>(config, task);
        case AgentKind::MBRL:
            return std::make_unique<MbrlAgent>(config, task);
    }
    throw std::invalid_argument("unknown agent kind");
}

}  // namespace fwrl
