#include "fwrl/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "fwrl/env.hpp"
#include "fwrl/harness.hpp"
#include "fwrl/oracle.hpp"
#include "fwrl/plots.hpp"

namespace fwrl {

namespace {

std::string describe(CellCoord c) {
    return "(" + std::to_string(c.x) + ", " + std::to_string(c.y) + ")";
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<CellCoord> parse_cell(std::string_view s) {
    s = trim(s);
    const auto comma = s.find(',');
    if (comma == std::string_view::npos) return std::nullopt;
    auto num = [](std::string_view t, int& out) {
        t = trim(t);
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
        return ec == std::errc{} && ptr == t.data() + t.size() && !t.empty();
    };
    CellCoord c;
    if (!num(s.substr(0, comma), c.x) || !num(s.substr(comma + 1), c.y)) return std::nullopt;
    return c;
}

/// "x,y -> x,y"
std::optional<ScenarioEpisode> parse_pair(std::string_view s) {
    const auto arrow = s.find("->");
    if (arrow == std::string_view::npos) return std::nullopt;
    auto start = parse_cell(s.substr(0, arrow));
    auto goal = parse_cell(s.substr(arrow + 2));
    if (!start || !goal) return std::nullopt;
    return ScenarioEpisode{*start, *goal};
}

std::vector<double> state_values(Agent& agent, const GridMap& map, StateId goal) {
    std::vector<double> out(map.num_states());
    for (StateId s = 0; s < map.num_states(); ++s) {
        const auto v = agent.action_values(s, goal);
        out[s] = *std::max_element(v.begin(), v.end());
    }
    return out;
}

nlohmann::ordered_json cell_json(CellCoord c) { return nlohmann::ordered_json::array({c.x, c.y}); }

}  // namespace

void ScenarioScript::validate(const GridMap& map) const {
    if (training.empty()) throw std::invalid_argument("scenario needs at least one training episode");
    auto check = [&](CellCoord c, const char* what) {
        if (!map.state_of(c)) {
            throw std::invalid_argument(std::string(what) + " " + describe(c) + " is not a free cell");
        }
    };
    for (const auto& ep : training) {
        check(ep.start, "training start");
        check(ep.goal, "training goal");
        if (ep.start == ep.goal) throw std::invalid_argument("training start equals its goal");
    }
    check(test.start, "test start");
    check(test.goal, "test goal");
    if (test.start == test.goal) throw std::invalid_argument("test start equals test goal");
    const bool goal_seen = std::any_of(training.begin(), training.end(),
                                       [&](const auto& ep) { return ep.goal == test.goal; });
    const bool start_seen = std::any_of(training.begin(), training.end(),
                                        [&](const auto& ep) { return ep.start == test.start; });
    if (!goal_seen) throw std::invalid_argument("test goal must be a training goal");
    if (!start_seen) throw std::invalid_argument("test start must be a training start");
    if (training_steps < 1 || test_steps < 1) throw std::invalid_argument("step budgets must be positive");
}

ScenarioScript default_h_maze_script() {
    ScenarioScript s;
    s.map = "h_maze";
    s.training = {{{1, 1}, {7, 5}}, {{1, 7}, {7, 7}}};
    s.test = {{1, 7}, {7, 5}};
    return s;
}

ScenarioScript parse_scenario_script(std::string_view text) {
    ScenarioScript s = default_h_maze_script();
    bool custom_training = false;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, std::string(line), "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        auto fail = [&](const std::string& why) {
            return ConfigError(line_no, key, why + " (got '" + std::string(value) + "')");
        };
        auto real = [&] {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc{} || ptr != value.data() + value.size()) throw fail("expected a number");
            return v;
        };
        auto integer = [&] {
            long long v = 0;
            const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
            if (ec != std::errc{} || ptr != value.data() + value.size()) throw fail("expected an integer");
            return v;
        };
        if (key == "map") {
            s.map = std::string(value);
        } else if (key == "train") {
            auto p = parse_pair(value);
            if (!p) throw fail("expected 'x,y -> x,y'");
            if (!custom_training) s.training.clear();
            custom_training = true;
            s.training.push_back(*p);
        } else if (key == "test") {
            auto p = parse_pair(value);
            if (!p) throw fail("expected 'x,y -> x,y'");
            s.test = *p;
        } else if (key == "terminate_on_goal") {
            if (value == "true") {
                s.terminate_on_goal = true;
            } else if (value == "false") {
                s.terminate_on_goal = false;
            } else {
                throw fail("expected true or false");
            }
        } else if (key == "seed") {
            const auto v = integer();
            if (v < 0) throw fail("must be non-negative");
            s.seed = static_cast<std::uint64_t>(v);
        } else if (key == "agents") {
            s.agents.clear();
            std::size_t p = 0;
            while (p <= value.size()) {
                const auto comma = std::min(value.find(',', p), value.size());
                auto kind = parse_agent_kind(trim(value.substr(p, comma - p)));
                if (!kind) throw fail("unknown agent");
                s.agents.push_back(*kind);
                p = comma + 1;
            }
        } else if (key == "epsilon") {
            s.epsilon = real();
        } else if (key == "alpha") {
            s.alpha = real();
        } else if (key == "goal_reward") {
            s.goal_reward = real();
        } else if (key == "step_reward") {
            s.step_reward = real();
        } else if (key == "wind_prob") {
            s.wind_prob = real();
        } else if (key == "training_steps") {
            s.training_steps = static_cast<int>(integer());
        } else if (key == "test_steps") {
            s.test_steps = static_cast<int>(integer());
        } else {
            throw ConfigError(line_no, key, "unknown key");
        }
    }
    return s;
}

ScenarioReport run_scenario(const ScenarioScript& script) {
    const GridMap map = resolve_map(script.map);
    script.validate(map);

    EnvConfig train_cfg{map, script.training_steps, script.goal_reward, script.step_reward,
                        script.wind_prob};
    EnvConfig test_cfg = train_cfg;
    test_cfg.steps_per_episode = script.test_steps;
    const Environment train_env(train_cfg);
    const Environment test_env(test_cfg);

    ScenarioReport report;
    report.map_name = map.name();
    const auto dist = bfs_distances(map, map.require_state(script.test.start));
    report.oracle_distance = dist[map.require_state(script.test.goal)].value_or(-1);

    AgentConfig cfg;
    cfg.epsilon = script.epsilon;
    cfg.alpha = script.alpha;
    cfg.tie_break = TieBreak::SeededRandom;
    const TaskInfo task{map.num_states(), script.goal_reward, script.step_reward,
                        script.training_steps};

    for (AgentKind kind : script.agents) {
        auto agent = make_agent(kind, cfg, task);
        Rng agent_rng(mix_seed(script.seed, 1));
        AgentScenarioResult result;
        result.algo = kind;

        for (std::size_t i = 0; i < script.training.size(); ++i) {
            const auto& ep = script.training[i];
            const StateId goal = map.require_state(ep.goal);
            EnvState st{ep.start, ep.goal, 0,
                        Rng(episode_seed(script.seed, static_cast<int>(i) + 1))};
            agent->begin_episode(goal);
            std::vector<CellCoord> trajectory{ep.start};
            bool reached = false;
            int steps = 0;
            while (true) {
                const StateId s = map.require_state(st.agent);
                const Action a = agent->act(s, goal, agent_rng);
                const StepOutcome out = train_env.step(st, a);
                ++steps;
                agent->observe({s, a, out.reward, map.require_state(out.next_state)}, goal);
                trajectory.push_back(out.next_state);
                if (out.reached_goal) reached = true;
                if ((out.reached_goal && script.terminate_on_goal) || out.episode_done) break;
            }
            result.training_steps.push_back(steps);
            result.training_reached.push_back(reached);
            result.snapshots.push_back({"episode " + std::to_string(i + 1), ep.start, ep.goal,
                                        state_values(*agent, map, goal), std::move(trajectory)});
            if (const auto* fw = dynamic_cast<const FwrlAgent*>(agent.get())) {
                result.fw_snapshots.push_back(fw->table());
            }
        }

        // Greedy evaluation with fixed tie-breaking and no learning.
        const StateId goal = map.require_state(script.test.goal);
        EnvState st{script.test.start, script.test.goal, 0,
                    Rng(episode_seed(script.seed, static_cast<int>(script.training.size()) + 1))};
        agent->begin_episode(goal);
        result.trajectory.push_back(st.agent);
        while (true) {
            const StateId s = map.require_state(st.agent);
            const Action a = agent->greedy(s, goal, TieBreak::FixedOrder, agent_rng);
            const StepOutcome out = test_env.step(st, a);
            ++result.steps;
            result.trajectory.push_back(out.next_state);
            if (out.reached_goal) {
                result.reached = true;
                break;
            }
            if (out.episode_done) break;
        }
        result.snapshots.push_back({"test", script.test.start, script.test.goal,
                                    state_values(*agent, map, goal), result.trajectory});
        report.agents.push_back(std::move(result));
    }
    return report;
}

void write_scenario_json(const ScenarioReport& report, std::ostream& out) {
    nlohmann::ordered_json doc;
    doc["map"] = report.map_name;
    doc["oracle_distance"] = report.oracle_distance;
    nlohmann::ordered_json agents = nlohmann::ordered_json::array();
    for (const auto& a : report.agents) {
        nlohmann::ordered_json entry;
        entry["algo"] = std::string(to_string(a.algo));
        entry["training_steps"] = a.training_steps;
        entry["training_reached"] = a.training_reached;
        entry["reached"] = a.reached;
        entry["steps"] = a.steps;
        nlohmann::ordered_json traj = nlohmann::ordered_json::array();
        for (auto c : a.trajectory) traj.push_back(cell_json(c));
        entry["trajectory"] = traj;
        agents.push_back(entry);
    }
    doc["agents"] = agents;
    out << doc.dump(2) << '\n';
}

void write_scenario(const ScenarioReport& report, const GridMap& map,
                    const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "scenario.json", std::ios::binary);
        write_scenario_json(report, out);
    }
    std::vector<HeatmapRow> rows;
    for (const auto& a : report.agents) {
        HeatmapRow row{std::string(to_string(a.algo)), {}};
        for (const auto& snap : a.snapshots) {
            row.panels.push_back({snap.label, snap.state_values, snap.start, snap.goal, snap.trajectory});
        }
        rows.push_back(std::move(row));
        for (std::size_t i = 0; i < a.fw_snapshots.size(); ++i) {
            std::ofstream out(dir / ("fw_snapshot_ep" + std::to_string(i + 1) + ".csv"),
                              std::ios::binary);
            write_fw_snapshot_csv(a.fw_snapshots[i], map, out);
        }
    }
    std::ofstream svg(dir / "heatmap.svg", std::ios::binary);
    svg << render_value_heatmap_svg(map, rows);
}

}  // namespace fwrl
