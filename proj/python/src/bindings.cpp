#include <map>
#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fwrl/agents.hpp"
#include "fwrl/env.hpp"
#include "fwrl/grid_map.hpp"
#include "fwrl/harness.hpp"
#include "fwrl/metrics.hpp"
#include "fwrl/oracle.hpp"
#include "fwrl/plots.hpp"
#include "fwrl/scenario.hpp"

namespace py = pybind11;
using namespace fwrl;

namespace {

using XY = std::pair<int, int>;

CellCoord cell(const XY& p) { return {p.first, p.second}; }
XY xy(CellCoord c) { return {c.x, c.y}; }

std::vector<XY> xy_list(const std::vector<CellCoord>& cs) {
    std::vector<XY> out;
    out.reserve(cs.size());
    for (auto c : cs) out.push_back(xy(c));
    return out;
}

AgentKind agent_kind(const std::string& name) {
    auto k = parse_agent_kind(name);
    if (!k) throw py::value_error("unknown agent '" + name + "'");
    return *k;
}

// Distance tables go to Python as nested lists; None marks unreachable.
std::vector<std::vector<std::optional<double>>> table_rows(const DistanceTable& t) {
    const auto n = static_cast<StateId>(t.num_states());
    std::vector<std::vector<std::optional<double>>> out(n, std::vector<std::optional<double>>(n));
    for (StateId i = 0; i < n; ++i)
        for (StateId j = 0; j < n; ++j) out[i][j] = t.at(i, j);
    return out;
}

}  // namespace

PYBIND11_MODULE(_fwrl, m) {
    m.doc() = "Goal-conditioned gridworld agents, oracles and experiment harness";

    py::register_exception<MapError>(m, "MapError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<EpisodeOver>(m, "EpisodeOver", PyExc_RuntimeError);

    py::enum_<Direction>(m, "Direction")
        .value("Up", Direction::Up)
        .value("Down", Direction::Down)
        .value("Left", Direction::Left)
        .value("Right", Direction::Right);

    py::enum_<CellKind>(m, "CellKind")
        .value("Wall", CellKind::Wall)
        .value("Free", CellKind::Free)
        .value("Wind", CellKind::Wind);

    // maps
    py::class_<GridMap>(m, "GridMap")
        .def_property_readonly("width", &GridMap::width)
        .def_property_readonly("height", &GridMap::height)
        .def_property_readonly("name", &GridMap::name)
        .def_property_readonly("num_states", &GridMap::num_states)
        .def_property_readonly("states", [](const GridMap& g) { return xy_list(g.states()); })
        .def("coord", [](const GridMap& g, StateId s) {
            if (s >= g.num_states()) throw py::index_error("state out of range");
            return xy(g.coord(s));
        })
        .def("state_of", [](const GridMap& g, XY p) { return g.state_of(cell(p)); })
        .def("is_wall", [](const GridMap& g, XY p) { return g.is_wall(cell(p)); })
        .def("kind", [](const GridMap& g, XY p) {
            if (!g.in_bounds(cell(p))) throw py::index_error("cell out of bounds");
            return g.at(cell(p)).kind;
        })
        .def("wind", [](const GridMap& g, XY p) -> std::optional<Direction> {
            if (!g.in_bounds(cell(p))) throw py::index_error("cell out of bounds");
            const auto& c = g.at(cell(p));
            if (c.kind != CellKind::Wind) return std::nullopt;
            return c.wind;
        })
        .def("__eq__", [](const GridMap& a, const GridMap& b) { return a == b; })
        .def("__str__", &serialize_map)
        .def("__repr__", [](const GridMap& g) {
            return "<GridMap " + g.name() + " " + std::to_string(g.width()) + "x" +
                   std::to_string(g.height()) + ">";
        });

    m.def("parse_map", [](const std::string& text, const std::string& name) {
        return parse_map(text, name);
    }, py::arg("text"), py::arg("name") = "");
    m.def("serialize_map", &serialize_map);
    m.def("load_map", [](const std::filesystem::path& p) { return load_map_file(p); });
    m.def("bundled_map", [](const std::string& name) { return bundled_map(name); });
    m.def("bundled_maps", [] {
        std::map<std::string, GridMap> out;
        for (auto& [name, g] : bundled_maps()) out.emplace(name, g);
        return out;
    });

    // env
    py::class_<EnvState>(m, "EnvState")
        .def_property_readonly("agent", [](const EnvState& s) { return xy(s.agent); })
        .def_property_readonly("goal", [](const EnvState& s) { return xy(s.goal); })
        .def_readonly("step_index", &EnvState::step_index);

    py::class_<StepOutcome>(m, "StepOutcome")
        .def_property_readonly("next_state", [](const StepOutcome& o) { return xy(o.next_state); })
        .def_readonly("reward", &StepOutcome::reward)
        .def_readonly("reached_goal", &StepOutcome::reached_goal)
        .def_readonly("respawned", &StepOutcome::respawned)
        .def_readonly("episode_done", &StepOutcome::episode_done)
        .def_property_readonly("agent", [](const StepOutcome& o) { return xy(o.agent); });

    py::class_<Environment>(m, "Environment")
        .def(py::init([](const GridMap& map, int steps, double goal_reward, double step_reward,
                         double wind_prob) {
                 return Environment(EnvConfig{map, steps, goal_reward, step_reward, wind_prob});
             }),
             py::arg("map"), py::arg("steps_per_episode") = 300, py::arg("goal_reward") = 10.0,
             py::arg("step_reward") = -1.0, py::arg("wind_prob") = 0.25)
        .def_property_readonly("map", &Environment::map)
        .def("begin_episode", &Environment::begin_episode, py::arg("seed"))
        .def("step", &Environment::step, py::arg("state"), py::arg("action"));

    m.def("intended_move", [](XY pos, Direction a, const GridMap& g) {
        return xy(intended_move(cell(pos), a, g));
    });

    // oracles
    m.def("bfs_distances", &bfs_distances, py::arg("map"), py::arg("source"));
    m.def("dijkstra", &dijkstra, py::arg("map"), py::arg("source"), py::arg("edge_weight") = 1.0);
    m.def("floyd_warshall", [](const GridMap& g, double w) { return table_rows(floyd_warshall(g, w)); },
          py::arg("map"), py::arg("edge_weight") = 1.0);
    m.def("bfs_all_pairs", [](const GridMap& g, double w) { return table_rows(bfs_all_pairs(g, w)); },
          py::arg("map"), py::arg("edge_weight") = 1.0);

    // agents
    py::class_<Rng>(m, "Rng")
        .def(py::init<std::uint64_t>(), py::arg("seed") = 0)
        .def("uniform01", &Rng::uniform01)
        .def("below", &Rng::below);

    py::class_<Agent>(m, "Agent")
        .def_property_readonly("kind", [](const Agent& a) { return std::string(to_string(a.kind())); })
        .def("begin_episode", &Agent::begin_episode, py::arg("goal"))
        .def("observe", [](Agent& a, StateId s, Direction act, double r, StateId s_next, StateId goal) {
            a.observe(Transition{s, act, r, s_next}, goal);
        }, py::arg("state"), py::arg("action"), py::arg("reward"), py::arg("next_state"), py::arg("goal"))
        .def("action_values", [](Agent& a, StateId s, StateId g) {
            auto v = a.action_values(s, g);
            return std::vector<double>(v.begin(), v.end());
        }, py::arg("state"), py::arg("goal"))
        .def("act", &Agent::act, py::arg("state"), py::arg("goal"), py::arg("rng"))
        .def("fw_value", [](const Agent& a, StateId s, Direction act, StateId g) {
            auto* fw = dynamic_cast<const FwrlAgent*>(&a);
            if (!fw) throw py::type_error("fw_value needs an FWRL agent");
            return fw->table().at(s, act, g);
        }, py::arg("state"), py::arg("action"), py::arg("goal"));

    m.def("make_agent", [](const std::string& kind, std::size_t num_states, double epsilon,
                           double alpha, double gamma, double q_init, const std::string& tie_break,
                           double goal_reward, double step_reward, int horizon) {
        AgentConfig cfg;
        cfg.epsilon = epsilon;
        cfg.alpha = alpha;
        cfg.gamma = gamma;
        cfg.q_init = q_init;
        auto tb = parse_tie_break(tie_break);
        if (!tb) throw py::value_error("unknown tie_break '" + tie_break + "'");
        cfg.tie_break = *tb;
        cfg.validate();
        return make_agent(agent_kind(kind), cfg, TaskInfo{num_states, goal_reward, step_reward, horizon});
    }, py::arg("kind"), py::arg("num_states"), py::arg("epsilon") = 0.1, py::arg("alpha") = 0.1,
       py::arg("gamma") = 1.0, py::arg("q_init") = 0.0, py::arg("tie_break") = "random",
       py::arg("goal_reward") = 10.0, py::arg("step_reward") = -1.0, py::arg("horizon") = 300);

    // metrics
    m.def("median_last_fraction", [](const std::vector<double>& r, double f) {
        return median_last_fraction(r, f);
    }, py::arg("rewards"), py::arg("fraction") = 0.2);
    m.def("efficiency_index", [](const std::vector<double>& r, std::size_t w, double f) {
        return efficiency_index(r, w, f);
    }, py::arg("rewards"), py::arg("window") = 10, py::arg("fraction") = 0.9);

    // harness
    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("map", &RunConfig::map)
        .def_readwrite("steps_per_episode", &RunConfig::steps_per_episode)
        .def_readwrite("goal_reward", &RunConfig::goal_reward)
        .def_readwrite("step_reward", &RunConfig::step_reward)
        .def_readwrite("wind_prob", &RunConfig::wind_prob)
        .def_readwrite("episodes", &RunConfig::episodes)
        .def_readwrite("seeds", &RunConfig::seeds)
        .def_readwrite("output_dir", &RunConfig::output_dir)
        .def_readwrite("jobs", &RunConfig::jobs)
        .def_property("agents",
            [](const RunConfig& c) {
                std::vector<std::string> out;
                for (auto k : c.agents) out.emplace_back(to_string(k));
                return out;
            },
            [](RunConfig& c, const std::vector<std::string>& names) {
                c.agents.clear();
                for (const auto& n : names) c.agents.push_back(agent_kind(n));
            })
        .def_property("epsilon", [](const RunConfig& c) { return c.agent.epsilon; },
                      [](RunConfig& c, double v) { c.agent.epsilon = v; })
        .def_property("alpha", [](const RunConfig& c) { return c.agent.alpha; },
                      [](RunConfig& c, double v) { c.agent.alpha = v; })
        .def_property("gamma", [](const RunConfig& c) { return c.agent.gamma; },
                      [](RunConfig& c, double v) { c.agent.gamma = v; })
        .def("validate", &RunConfig::validate);

    m.def("parse_run_config", [](const std::string& text) { return parse_run_config(text); });
    m.def("load_run_config", &load_run_config);

    py::class_<ResultsBundle>(m, "ResultsBundle")
        .def_readonly("map_name", &ResultsBundle::map_name)
        .def_property_readonly("rows", [](const ResultsBundle& b) {
            py::list out;
            for (const auto& r : b.rows) {
                py::dict d;
                d["algo"] = std::string(to_string(r.algo));
                d["seed"] = r.seed;
                d["episode"] = r.episode;
                d["steps"] = r.summary.steps;
                d["total_reward"] = r.summary.total_reward;
                d["goals_reached"] = r.summary.goals_reached;
                d["dist_ineff"] = r.summary.dist_ineff;
                out.append(d);
            }
            return out;
        })
        .def_property_readonly("summary", [](const ResultsBundle& b) {
            py::dict out;
            for (const auto& a : b.agents) {
                py::dict d;
                d["median_reward_last20"] = a.median_reward_last20;
                d["efficiency_index"] = a.efficiency_index;
                d["efficiency_index_by_seed"] = a.efficiency_index_by_seed;
                d["mean_dist_ineff"] = a.mean_dist_ineff;
                out[py::str(std::string(to_string(a.algo)))] = d;
            }
            return out;
        })
        .def("csv", [](const ResultsBundle& b) {
            std::ostringstream os;
            write_results_csv(b, os);
            return os.str();
        })
        .def("write", [](const ResultsBundle& b, const std::filesystem::path& dir, bool plots) {
            write_results(b, dir);
            if (plots) emit_plots(b, dir);
        }, py::arg("dir"), py::arg("plots") = false);

    m.def("run_experiment", &run_experiment, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    // scenario
    py::class_<ScenarioScript>(m, "ScenarioScript")
        .def(py::init(&default_h_maze_script))
        .def_readwrite("map", &ScenarioScript::map)
        .def_readwrite("terminate_on_goal", &ScenarioScript::terminate_on_goal)
        .def_readwrite("seed", &ScenarioScript::seed)
        .def_readwrite("epsilon", &ScenarioScript::epsilon)
        .def_readwrite("alpha", &ScenarioScript::alpha)
        .def_readwrite("training_steps", &ScenarioScript::training_steps)
        .def_readwrite("test_steps", &ScenarioScript::test_steps)
        .def_readwrite("wind_prob", &ScenarioScript::wind_prob)
        .def_property("training",
            [](const ScenarioScript& s) {
                std::vector<std::pair<XY, XY>> out;
                for (const auto& e : s.training) out.push_back({xy(e.start), xy(e.goal)});
                return out;
            },
            [](ScenarioScript& s, const std::vector<std::pair<XY, XY>>& eps) {
                s.training.clear();
                for (const auto& [a, b] : eps) s.training.push_back({cell(a), cell(b)});
            })
        .def_property("test",
            [](const ScenarioScript& s) { return std::pair<XY, XY>{xy(s.test.start), xy(s.test.goal)}; },
            [](ScenarioScript& s, const std::pair<XY, XY>& p) { s.test = {cell(p.first), cell(p.second)}; })
        .def_property("agents",
            [](const ScenarioScript& s) {
                std::vector<std::string> out;
                for (auto k : s.agents) out.emplace_back(to_string(k));
                return out;
            },
            [](ScenarioScript& s, const std::vector<std::string>& names) {
                s.agents.clear();
                for (const auto& n : names) s.agents.push_back(agent_kind(n));
            });

    m.def("parse_scenario_script", [](const std::string& text) { return parse_scenario_script(text); });

    m.def("run_scenario", [](const ScenarioScript& script) {
        const auto report = run_scenario(script);
        py::dict out;
        out["map"] = report.map_name;
        out["oracle_distance"] = report.oracle_distance;
        py::dict agents;
        for (const auto& a : report.agents) {
            py::dict d;
            d["reached"] = a.reached;
            d["steps"] = a.steps;
            d["trajectory"] = xy_list(a.trajectory);
            d["training_steps"] = a.training_steps;
            d["training_reached"] = std::vector<bool>(a.training_reached.begin(), a.training_reached.end());
            agents[py::str(std::string(to_string(a.algo)))] = d;
        }
        out["agents"] = agents;
        return out;
    }, py::arg("script") = default_h_maze_script());
}
