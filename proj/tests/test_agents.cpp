#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "fwrl/agents.hpp"
#include "fwrl/env.hpp"
#include "fwrl/oracle.hpp"

using namespace fwrl;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Random-walk transitions with goal rewards already stripped.
std::vector<Transition> random_walk(const GridMap& map, int steps, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Transition> out;
    StateId s = static_cast<StateId>(rng.below(map.num_states()));
    for (int t = 0; t < steps; ++t) {
        const Direction a = kDirections[rng.below(4)];
        const StateId next = map.require_state(intended_move(map.coord(s), a, map));
        out.push_back({s, a, -1.0, next});
        s = next;
    }
    return out;
}

FWTable explored(const GridMap& map, int steps, std::uint64_t seed) {
    FWTable table(map.num_states());
    for (const auto& t : random_walk(map, steps, seed)) {
        fwrl_observe(table, t.state, t.action, t.reward, t.next_state, 10.0);
    }
    return table;
}

class FixedValues final : public Agent {
 public:
    FixedValues(AgentConfig c, ActionValues v) : Agent(c, TaskInfo{4}), values_(v) {}
    AgentKind kind() const override { return AgentKind::FWRL; }
    void begin_episode(StateId) override {}
    void observe(const Transition&, StateId) override {}
    ActionValues action_values(StateId, StateId) override { return values_; }

 private:
    ActionValues values_;
};

}  // namespace

TEST(SelectGreedy, Examples) {
    Rng rng(1);
    EXPECT_EQ(select_greedy({-3, -2, -5, -kInf}, TieBreak::FixedOrder, rng), Direction::Down);
    EXPECT_EQ(select_greedy({-3, -2, -5, -kInf}, TieBreak::SeededRandom, rng), Direction::Down);
    EXPECT_EQ(select_greedy({-kInf, -kInf, -kInf, -kInf}, TieBreak::FixedOrder, rng), Direction::Up);
    EXPECT_EQ(select_greedy({-1, -4, -1, -1}, TieBreak::FixedOrder, rng), Direction::Up);
    std::map<Direction, int> seen;
    for (int i = 0; i < 4000; ++i) {
        ++seen[select_greedy({-kInf, -kInf, -kInf, -kInf}, TieBreak::SeededRandom, rng)];
    }
    EXPECT_EQ(seen.size(), 4u);
    for (auto [d, c] : seen) EXPECT_NEAR(c, 1000, 5 * std::sqrt(4000 * 0.25 * 0.75));
}

TEST(FwrlObserve, ChainGivesMinusTwo) {
    // s0 -> s1 -> s2 along a corridor; Floyd-Warshall on the 3-node graph gives -2.
    const auto m = parse_map("#####\n#...#\n#####");
    FWTable t(m.num_states());
    fwrl_observe(t, 0, Direction::Right, -1.0, 1, 10.0);
    fwrl_observe(t, 1, Direction::Right, -1.0, 2, 10.0);
    EXPECT_EQ(t.at(0, Direction::Right, 1), -1.0);
    EXPECT_EQ(t.at(1, Direction::Right, 2), -1.0);
    EXPECT_EQ(t.at(0, Direction::Right, 2), -2.0);
    EXPECT_EQ(t.at(0, Direction::Left, 2), -kInf);
    Rng rng(0);
    EXPECT_EQ(fwrl_policy(t, 0, 2, TieBreak::FixedOrder, rng), Direction::Right);
}

TEST(FwrlObserve, GoalRewardSkipped) {
    const auto m = bundled_map("h_maze");
    FWTable t = explored(m, 500, 3);
    const FWTable before = t;
    fwrl_observe(t, 0, Direction::Down, 10.0, 1, 10.0);
    fwrl_observe(t, 2, Direction::Up, 25.0, 1, 10.0);
    EXPECT_EQ(t, before);
}

TEST(FwrlRelax, UnreachableIsAbsorbing) {
    FWTable t(3);
    t.set(1, Direction::Up, 2, -1.0);
    const FWTable before = t;
    fwrl_relax_through(t, 1);  // nothing reaches pivot 1
    EXPECT_EQ(t, before);
    t.set(0, Direction::Up, 1, -1.0);
    fwrl_relax_through(t, 1);
    EXPECT_EQ(t.at(0, Direction::Up, 2), -2.0);
    for (double v : t.raw()) EXPECT_FALSE(std::isnan(v));
}

TEST(FwrlObserve, CorridorPolicyAfterExploration) {
    const auto m = parse_map("#####\n#...#\n#####");
    const FWTable t = explored(m, 200, 9);
    Rng rng(0);
    EXPECT_EQ(fwrl_policy(t, 0, 2, TieBreak::FixedOrder, rng), Direction::Right);
    EXPECT_EQ(fwrl_policy(t, 1, 2, TieBreak::FixedOrder, rng), Direction::Right);
    EXPECT_EQ(fwrl_policy(t, 2, 0, TieBreak::FixedOrder, rng), Direction::Left);
}

TEST(FwrlProperties, RelaxationMonotone) {
    const auto m = bundled_map("four_room");
    FWTable t(m.num_states());
    const auto stream = random_walk(m, 3000, 21);
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const auto& tr = stream[i];
        const FWTable before = t;
        fwrl_observe(t, tr.state, tr.action, tr.reward, tr.next_state, 10.0);
        if (i % 97 != 0) continue;  // a full compare every step is slow
        for (std::size_t k = 0; k < t.raw().size(); ++k) ASSERT_GE(t.raw()[k], before.raw()[k]);
    }
}

TEST(FwrlProperties, ValueBound) {
    for (const char* name : {"four_room", "h_maze"}) {
        const auto m = bundled_map(name);
        const auto n = static_cast<double>(m.num_states());
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const FWTable t = explored(m, 4000, seed);
            for (double v : t.raw()) {
                if (!is_reachable(v)) continue;
                ASSERT_LE(v, -1.0);
                ASSERT_GE(v, -(n - 1));
                ASSERT_EQ(v, std::floor(v));
            }
        }
    }
}

TEST(FwrlProperties, ConvergesToOracleOnHMaze) {
    const auto m = bundled_map("h_maze");
    const FWTable t = explored(m, 20000, 4);
    const auto d = bfs_all_pairs(m);
    const auto n = static_cast<StateId>(m.num_states());
    for (StateId s = 0; s < n; ++s) {
        for (Direction a : kDirections) {
            const StateId next = m.require_state(intended_move(m.coord(s), a, m));
            for (StateId g = 0; g < n; ++g) {
                ASSERT_EQ(t.at(s, a, g), -(1.0 + *d.at(next, g)));
            }
        }
        for (StateId g = 0; g < n; ++g) {
            if (g != s) ASSERT_EQ(t.best(s, g), -*d.at(s, g));
        }
    }
    // Triangle property at convergence.
    for (StateId i = 0; i < n; ++i)
        for (Direction a : kDirections)
            for (StateId j = 0; j < n; ++j)
                for (StateId k = 0; k < n; ++k)
                    ASSERT_GE(t.at(i, a, j), t.at(i, a, k) + t.best(k, j));
}

TEST(FwrlProperties, GoalInvariance) {
    const auto m = bundled_map("four_room");
    const TaskInfo task{m.num_states(), 10.0, -1.0, 300};
    FwrlAgent a(AgentConfig{}, task), b(AgentConfig{}, task);
    const auto stream = random_walk(m, 4000, 8);
    std::mt19937_64 gen(3);
    for (std::size_t i = 0; i < stream.size(); ++i) {
        if (i % 300 == 0) {
            a.begin_episode(static_cast<StateId>(gen() % m.num_states()));
            b.begin_episode(static_cast<StateId>(gen() % m.num_states()));
        }
        const auto& t = stream[i];
        a.observe(t, static_cast<StateId>(gen() % m.num_states()));
        b.observe(t, static_cast<StateId>(gen() % m.num_states()));
        // Each run also sees goal hits the other does not.
        if (gen() % 5 == 0) a.observe({t.state, t.action, 10.0, t.next_state}, t.next_state);
        if (gen() % 7 == 0) b.observe({t.state, t.action, 10.0, t.next_state}, t.next_state);
    }
    EXPECT_TRUE(a.table() == b.table());
}

TEST(QlUpdate, Examples) {
    QTable q(3, 0.0);
    ql_update(q, 0, Direction::Right, -1.0, 1, 1.0, 1.0);
    EXPECT_EQ(q.at(0, Direction::Right), -1.0);
    const QTable before = q;
    ql_update(q, 0, Direction::Left, 5.0, 1, 0.0, 1.0);
    EXPECT_EQ(q, before);
    ql_update(q, 2, Direction::Up, 1.0, 1, 0.5, 0.9);
    EXPECT_DOUBLE_EQ(q.at(2, Direction::Up), 0.5);
    EXPECT_EQ(q.at(1, Direction::Down), 0.0);
}

TEST(QlUpdate, CorridorConvergence) {
    // Value iteration on the corridor s0 - s1 - s2(goal): V(s1) = 10, V(s0) = 9.
    const double goal = 10.0, step = -1.0;
    double v1 = 0.0, v0 = 0.0;
    for (int i = 0; i < 5; ++i) {
        v1 = goal;
        v0 = step + v1;
    }
    ASSERT_EQ(v0, goal + (2 - 1) * step);

    QTable q(3, 0.0);
    for (int sweep = 0; sweep < 5; ++sweep) {
        ql_update(q, 0, Direction::Right, step, 1, 1.0, 1.0);
        ql_update(q, 1, Direction::Right, goal, 2, 1.0, 1.0);
    }
    EXPECT_EQ(q.at(0, Direction::Right), v0);
    EXPECT_EQ(q.at(1, Direction::Right), v1);
}

TEST(QlAgents, ResetAndRetention) {
    const TaskInfo task{5, 10.0, -1.0, 300};
    AgentConfig cfg;
    cfg.q_init = 0.5;
    QlAgent ql(cfg, task);
    QlcatAgent cat(cfg, task);
    ql.begin_episode(2);
    cat.begin_episode(2);
    EXPECT_TRUE(ql.table().is_uniform_init());
    ql.observe({0, Direction::Up, -1.0, 1}, 2);
    cat.observe({0, Direction::Up, -1.0, 1}, 2);
    EXPECT_FALSE(ql.table().is_uniform_init());
    ql.begin_episode(3);
    cat.begin_episode(3);
    EXPECT_TRUE(ql.table().is_uniform_init());
    EXPECT_EQ(ql.table().at(0, Direction::Up), 0.5);
    EXPECT_FALSE(cat.table().is_uniform_init());
    EXPECT_NE(cat.action_values(0, 2), cat.action_values(0, 3));
    QTable t(2, 0.5);
    t.set(1, Direction::Left, 7.0);
    ql_reset(t);
    EXPECT_TRUE(t.is_uniform_init());
}

TEST(Mbrl, ObservationCounts) {
    ModelTables m(3);
    EXPECT_TRUE(mbrl_observe(m, 0, Direction::Up, -1.0, 1));
    EXPECT_EQ(m.probability(0, Direction::Up, 1), 1.0);
    EXPECT_FALSE(mbrl_observe(m, 0, Direction::Up, -1.0, 1));
    EXPECT_TRUE(mbrl_observe(m, 0, Direction::Up, -1.0, 2));
    EXPECT_TRUE(mbrl_observe(m, 0, Direction::Up, -1.0, 0));
    EXPECT_FALSE(mbrl_observe(m, 0, Direction::Up, -1.0, 0));
    EXPECT_EQ(m.visits(0, Direction::Up), 5u);
    EXPECT_EQ(m.reward_sum(0, Direction::Up), -5.0);
    EXPECT_DOUBLE_EQ(m.probability(0, Direction::Up, 1), 0.4);

    ModelTables two(3);
    mbrl_observe(two, 1, Direction::Left, -1.0, 0);
    mbrl_observe(two, 1, Direction::Left, -1.0, 2);
    EXPECT_EQ(two.probability(1, Direction::Left, 0), 0.5);
    EXPECT_EQ(two.probability(1, Direction::Left, 2), 0.5);
    EXPECT_EQ(two.probability(1, Direction::Right, 2), 0.0);
}

TEST(Mbrl, NormalizationAndWindEstimate) {
    const Environment env(EnvConfig{bundled_map("windy_four_room")});
    const auto& map = env.map();
    ModelTables model(map.num_states());
    EnvState st = env.begin_episode(6);
    st.goal = {9, 1};
    const StateId s = map.require_state({2, 7});
    for (int i = 0; i < 1000; ++i) {
        st.agent = {2, 7};
        st.step_index = 0;
        const auto out = env.step(st, Direction::Up);
        mbrl_observe(model, s, Direction::Up, out.reward, map.require_state(out.next_state));
    }
    EXPECT_NEAR(model.probability(s, Direction::Up, map.require_state({3, 7})), 0.25, 0.05);
    double total = 0.0;
    for (StateId t = 0; t < map.num_states(); ++t) total += model.probability(s, Direction::Up, t);
    EXPECT_DOUBLE_EQ(total, 1.0);
}

TEST(Mbrl, PlanOnFullyObservedFourRoom) {
    const auto map = bundled_map("four_room");
    const auto n = static_cast<StateId>(map.num_states());
    ModelTables model(n);
    for (StateId s = 0; s < n; ++s)
        for (Direction a : kDirections)
            mbrl_observe(model, s, a, -1.0, map.require_state(intended_move(map.coord(s), a, map)));
    const auto d = bfs_all_pairs(map);
    for (StateId g = 0; g < n; g += 7) {
        const auto policy = mbrl_plan(model, g, 300, 10.0, -1.0).policy();
        for (StateId start = 0; start < n; ++start) {
            if (start == g) continue;
            StateId s = start;
            int steps = 0;
            while (s != g && steps < 300) {
                s = map.require_state(intended_move(map.coord(s), policy[s], map));
                ++steps;
            }
            ASSERT_EQ(steps, *d.at(start, g));
        }
    }
}

TEST(Mbrl, EmptyModelAndCorridor) {
    const auto map = bundled_map("four_room");
    ModelTables empty(map.num_states());
    for (Direction a : mbrl_plan(empty, 0, 300, 10.0, -1.0).policy()) EXPECT_EQ(a, Direction::Up);

    // Only the top corridor of the first room, heading right to (4,1).
    ModelTables model(map.num_states());
    for (int x = 1; x < 4; ++x) {
        mbrl_observe(model, map.require_state({x, 1}), Direction::Right, -1.0,
                     map.require_state({x + 1, 1}));
    }
    const StateId goal = map.require_state({4, 1});
    const auto plan = mbrl_plan(model, goal, 300, 10.0, -1.0);
    const auto policy = plan.policy();
    for (int x = 1; x < 4; ++x) EXPECT_EQ(policy[map.require_state({x, 1})], Direction::Right);
    // By hand: 10 at (3,1), 10 - 1 at (2,1), 10 - 2 at (1,1).
    EXPECT_EQ(plan.q[map.require_state({3, 1})][index_of(Direction::Right)], 10.0);
    EXPECT_EQ(plan.q[map.require_state({1, 1})][index_of(Direction::Right)], 8.0);
}

TEST(Act, EpsilonExtremes) {
    Rng rng(17);
    FixedValues agent(AgentConfig{}, {0.0, 1.0, 0.0, 0.0});
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(act(agent, 0, 1, 0.0, rng), Direction::Down);

    constexpr int kDraws = 10000;
    std::array<int, 4> counts{};
    for (int i = 0; i < kDraws; ++i) ++counts[index_of(act(agent, 0, 1, 1.0, rng))];
    const double expect = kDraws / 4.0;
    const double sigma = std::sqrt(kDraws * 0.25 * 0.75);
    double chi2 = 0.0;
    for (int c : counts) {
        EXPECT_LE(std::abs(c - expect), 5 * sigma);
        chi2 += (c - expect) * (c - expect) / expect;
    }
    EXPECT_LT(chi2, 16.27);  // 3 dof, 0.999 quantile
}

TEST(Act, GreedyFrequencyAtEpsilonTenth) {
    // 0.9 + 0.1 / 4 = 0.925
    constexpr int kDraws = 100000;
    Rng rng(23);
    FixedValues agent(AgentConfig{}, {0.0, 1.0, 0.0, 0.0});
    int greedy = 0;
    for (int i = 0; i < kDraws; ++i) greedy += act(agent, 0, 1, 0.1, rng) == Direction::Down;
    EXPECT_NEAR(static_cast<double>(greedy) / kDraws, 0.925, 0.005);
}

TEST(Agents, FactoryAndConfig) {
    const TaskInfo task{10, 10.0, -1.0, 50};
    for (AgentKind k : kAgentKinds) {
        auto a = make_agent(k, AgentConfig{}, task);
        EXPECT_EQ(a->kind(), k);
        EXPECT_EQ(parse_agent_kind(to_string(k)), k);
    }
    EXPECT_FALSE(parse_agent_kind("DQN"));
    AgentConfig bad;
    bad.epsilon = 1.5;
    EXPECT_THROW(make_agent(AgentKind::QL, bad, task), std::invalid_argument);
    bad = AgentConfig{};
    bad.gamma = 0.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    EXPECT_EQ(parse_tie_break("fixed"), TieBreak::FixedOrder);
    EXPECT_EQ(parse_tie_break("random"), TieBreak::SeededRandom);
}

TEST(Agents, MbrlAgentUsesModel) {
    const auto map = bundled_map("four_room");
    const TaskInfo task{map.num_states(), 10.0, -1.0, 300};
    MbrlAgent agent(AgentConfig{}, task);
    const StateId goal = map.require_state({4, 1});
    agent.begin_episode(goal);
    for (int x = 1; x < 4; ++x) {
        agent.observe({map.require_state({x, 1}), Direction::Right, -1.0, map.require_state({x + 1, 1})},
                      goal);
    }
    Rng rng(0);
    EXPECT_EQ(agent.greedy(map.require_state({1, 1}), goal, TieBreak::FixedOrder, rng),
              Direction::Right);
    EXPECT_EQ(agent.model().visits(map.require_state({1, 1}), Direction::Right), 1u);
}
