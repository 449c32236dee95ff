#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "fwrl/harness.hpp"
#include "fwrl/oracle.hpp"
#include "fwrl/scenario.hpp"
#include "test_support.hpp"

using namespace fwrl;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string csv_of(const ResultsBundle& b) {
    std::ostringstream s;
    write_results_csv(b, s);
    return s.str();
}

std::string json_of(const ResultsBundle& b) {
    std::ostringstream s;
    write_summary_json(b, s);
    return s.str();
}

RunConfig small_config() {
    RunConfig c;
    c.episodes = 4;
    c.seeds = {3, 1};
    c.steps_per_episode = 60;
    return c;
}

}  // namespace

TEST(RunConfigParse, FullFile) {
    const auto c = parse_run_config(
        "# comment\n"
        "map = windy_four_room\n"
        "steps_per_episode = 120   # trailing comment\n"
        "episodes = 7\n"
        "seeds = 0-2, 9\n"
        "agents = FWRL, QLCAT\n"
        "epsilon = 0.2\nalpha = 0.5\ngamma = 0.95\nq_init = 1\n"
        "tie_break = fixed\n"
        "goal_reward = 20\nstep_reward = -0.5\nwind_prob = 0.1\n"
        "output_dir = somewhere\njobs = 2\n");
    EXPECT_EQ(c.map, "windy_four_room");
    EXPECT_EQ(c.steps_per_episode, 120);
    EXPECT_EQ(c.episodes, 7);
    EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{0, 1, 2, 9}));
    EXPECT_EQ(c.agents, (std::vector<AgentKind>{AgentKind::FWRL, AgentKind::QLCAT}));
    EXPECT_EQ(c.agent.epsilon, 0.2);
    EXPECT_EQ(c.agent.alpha, 0.5);
    EXPECT_EQ(c.agent.gamma, 0.95);
    EXPECT_EQ(c.agent.q_init, 1.0);
    EXPECT_EQ(c.agent.tie_break, TieBreak::FixedOrder);
    EXPECT_EQ(c.goal_reward, 20.0);
    EXPECT_EQ(c.step_reward, -0.5);
    EXPECT_EQ(c.wind_prob, 0.1);
    EXPECT_EQ(c.output_dir, "somewhere");
    EXPECT_EQ(c.jobs, 2u);
    EXPECT_NO_THROW(c.validate());
}

TEST(RunConfigParse, DefaultsMatchProtocol) {
    const auto c = parse_run_config("");
    EXPECT_EQ(c.map, "four_room");
    EXPECT_EQ(c.episodes, 100);
    EXPECT_EQ(c.steps_per_episode, 300);
    EXPECT_EQ(c.seeds.size(), 10u);
    EXPECT_EQ(c.agent.epsilon, 0.1);
    EXPECT_EQ(c.agents.size(), 4u);
}

TEST(RunConfigParse, ErrorsCarryLineAndField) {
    auto expect_error = [](const std::string& text, int line, const std::string& field) {
        try {
            parse_run_config(text);
            ADD_FAILURE() << "accepted: " << text;
        } catch (const ConfigError& e) {
            EXPECT_EQ(e.line(), line) << text;
            EXPECT_EQ(e.field(), field) << text;
        }
    };
    expect_error("map = h_maze\nepisodes = ten\n", 2, "episodes");
    expect_error("\n\nfrobnicate = 1\n", 3, "frobnicate");
    expect_error("agents = FWRL, DQN\n", 1, "agents");
    expect_error("seeds = 5-2\n", 1, "seeds");
    expect_error("epsilon = 2\n", 1, "epsilon");
    expect_error("just words\n", 1, "just words");
    expect_error("tie_break = sometimes\n", 1, "tie_break");
}

TEST(RunConfig, Validation) {
    auto c = small_config();
    c.seeds = {1, 1};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = small_config();
    c.seeds.clear();
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = small_config();
    c.map = "no_such_map_file.txt";
    EXPECT_THROW(c.validate(), std::exception);
}

TEST(OutputDir, Precedence) {
    ::unsetenv("FWRL_OUT_DIR");
    EXPECT_EQ(resolve_output_dir(std::nullopt, ""), "fwrl_out");
    ::setenv("FWRL_OUT_DIR", "/tmp/from_env", 1);
    EXPECT_EQ(resolve_output_dir(std::nullopt, ""), "/tmp/from_env");
    EXPECT_EQ(resolve_output_dir(std::nullopt, "cfg"), "cfg");
    EXPECT_EQ(resolve_output_dir(std::string("cli"), "cfg"), "cli");
    ::unsetenv("FWRL_OUT_DIR");
}

TEST(RunExperiment, SingleRow) {
    RunConfig c;
    c.episodes = 1;
    c.seeds = {7};
    c.agents = {AgentKind::QL};
    const auto b = run_experiment(c);
    ASSERT_EQ(b.rows.size(), 1u);
    const auto csv = csv_of(b);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "algo,seed,episode,steps,total_reward,goals_reached,dist_ineff");
    EXPECT_EQ(b.rows[0].summary.steps, 300);
}

TEST(RunExperiment, DeterministicAndOrderIndependent) {
    auto c = small_config();
    c.jobs = 1;
    const auto a = run_experiment(c);
    const auto b = run_experiment(c);
    EXPECT_EQ(csv_of(a), csv_of(b));
    c.jobs = 8;
    const auto par = run_experiment(c);
    EXPECT_EQ(csv_of(a), csv_of(par));
    EXPECT_EQ(json_of(a), json_of(par));
    c.seeds = {1, 3};
    EXPECT_EQ(json_of(a), json_of(run_experiment(c)));
    // Rows are sorted by (algo, seed, episode).
    for (std::size_t i = 1; i < a.rows.size(); ++i) {
        const auto& p = a.rows[i - 1];
        const auto& q = a.rows[i];
        EXPECT_LT(std::tie(p.algo, p.seed, p.episode), std::tie(q.algo, q.seed, q.episode));
    }
}

TEST(RunExperiment, SeedsAreIndependent) {
    auto c = small_config();
    const auto both = run_experiment(c);
    c.seeds = {3};
    const auto one = run_experiment(c);
    for (const auto& r : one.rows) {
        const auto it = std::find_if(both.rows.begin(), both.rows.end(), [&](const ResultRow& x) {
            return x.algo == r.algo && x.seed == r.seed && x.episode == r.episode;
        });
        ASSERT_NE(it, both.rows.end());
        EXPECT_EQ(it->summary.total_reward, r.summary.total_reward);
        EXPECT_EQ(it->summary.dist_ineff, r.summary.dist_ineff);
    }
}

TEST(Results, CsvRoundTripAndFiles) {
    const auto b = run_experiment(small_config());
    std::istringstream in(csv_of(b));
    const auto rows = read_results_csv(in);
    ASSERT_EQ(rows.size(), b.rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].algo, b.rows[i].algo);
        EXPECT_EQ(rows[i].summary.total_reward, b.rows[i].summary.total_reward);
        EXPECT_EQ(rows[i].summary.dist_ineff, b.rows[i].summary.dist_ineff);
    }
    const auto dir = testkit::scratch_dir("harness_results");
    write_results(b, dir);
    EXPECT_EQ(slurp(dir / "results.csv"), csv_of(b));
    const auto doc = nlohmann::json::parse(slurp(dir / "summary.json"));
    EXPECT_EQ(doc["map"], "four_room");
    for (const char* k : {"FWRL", "QL", "QLCAT", "MBRL"}) {
        ASSERT_TRUE(doc["agents"].contains(k));
        for (const char* f : {"median_reward_last20", "efficiency_index", "mean_dist_ineff"}) {
            EXPECT_TRUE(doc["agents"][k].contains(f)) << k << " " << f;
        }
    }
    std::istringstream bad("algo,seed\n");
    EXPECT_THROW(read_results_csv(bad), std::runtime_error);
}

TEST(Results, EmptyDistIneffField) {
    ResultsBundle b;
    b.rows.push_back({AgentKind::QL, 0, 1, EpisodeSummary{-300.0, std::nullopt, 0, 300}});
    b.rows.push_back({AgentKind::FWRL, 0, 1, EpisodeSummary{52.0, 1.25, 8, 300}});
    EXPECT_EQ(csv_of(b),
              "algo,seed,episode,steps,total_reward,goals_reached,dist_ineff\n"
              "QL,0,1,300,-300,0,\n"
              "FWRL,0,1,300,52,8,1.25\n");
}

TEST(Results, FormatNumber) {
    EXPECT_EQ(format_number(-300.0), "-300");
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Summaries, UndefinedEfficiencyRanksLast) {
    std::vector<ResultRow> rows;
    // Seed 0 improves, seeds 1 and 2 stay flat and negative.
    for (std::uint64_t seed = 0; seed < 3; ++seed)
        for (int ep = 1; ep <= 20; ++ep)
            rows.push_back({AgentKind::QL, seed, ep,
                            EpisodeSummary{seed == 0 ? ep * 1.0 : -300.0, std::nullopt, 0, 300}});
    const auto s = summarize_agents(rows);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0].efficiency_index_by_seed[0], efficiency_index(std::vector<double>{
        1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20}));
    EXPECT_FALSE(s[0].efficiency_index_by_seed[1]);
    EXPECT_FALSE(s[0].efficiency_index);  // median lands on an undefined seed
    EXPECT_EQ(s[0].median_reward_last20, -300.0);
}

TEST(FwSnapshot, RoundTrip) {
    const auto map = bundled_map("h_maze");
    FWTable t(map.num_states());
    t.set(0, Direction::Down, 1, -1.0);
    t.set(3, Direction::Left, 2, -4.0);
    std::ostringstream out;
    write_fw_snapshot_csv(t, map, out);
    const auto text = out.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "state_x,state_y,action,goal_x,goal_y,value");
    EXPECT_NE(text.find("-inf"), std::string::npos);
    std::istringstream in(text);
    EXPECT_TRUE(read_fw_snapshot_csv(in, map) == t);
}

TEST(Scenario, DefaultHMaze) {
    const auto script = default_h_maze_script();
    const auto report = run_scenario(script);
    const auto map = bundled_map("h_maze");
    EXPECT_EQ(report.oracle_distance,
              *bfs_all_pairs(map).at(map.require_state(script.test.start),
                                     map.require_state(script.test.goal)));
    ASSERT_EQ(report.agents.size(), 2u);
    const auto& fw = report.agents[0];
    const auto& cat = report.agents[1];
    EXPECT_EQ(fw.algo, AgentKind::FWRL);
    EXPECT_TRUE(fw.reached);
    EXPECT_EQ(fw.steps, report.oracle_distance);
    EXPECT_EQ(fw.trajectory.front(), script.test.start);
    EXPECT_EQ(fw.trajectory.back(), script.test.goal);
    EXPECT_EQ(cat.algo, AgentKind::QLCAT);
    EXPECT_FALSE(cat.reached);
    EXPECT_EQ(cat.steps, script.test_steps);
    EXPECT_EQ(fw.fw_snapshots.size(), script.training.size());
    EXPECT_EQ(fw.snapshots.size(), script.training.size() + 1);
    for (bool r : fw.training_reached) EXPECT_TRUE(r);
}

TEST(Scenario, MemorisedPairBothReach) {
    // One-step Q-learning backs the goal value up one cell per episode, so
    // QLCAT needs the pair repeated. FWRL never records a step into the
    // current goal, so the second episode (which passes through (7,5)) stays.
    auto script = default_h_maze_script();
    script.test = script.training[0];
    const auto pair = script.training;
    for (int i = 1; i < 10; ++i) script.training.insert(script.training.end(), pair.begin(), pair.end());
    const auto report = run_scenario(script);
    for (const auto& a : report.agents) EXPECT_TRUE(a.reached) << to_string(a.algo);
}

TEST(Scenario, FwrlCannotLearnEdgesIntoItsOnlyGoal) {
    // Goal-reward steps are skipped entirely, so training only toward (7,5)
    // leaves every F(., ., (7,5)) unreachable.
    auto script = default_h_maze_script();
    script.agents = {AgentKind::FWRL};
    script.training.assign(5, script.training[0]);
    script.test = script.training[0];
    const auto report = run_scenario(script);
    EXPECT_FALSE(report.agents[0].reached);
    const auto map = bundled_map("h_maze");
    const auto& table = report.agents[0].fw_snapshots.back();
    const StateId g = map.require_state({7, 5});
    for (StateId s = 0; s < map.num_states(); ++s) EXPECT_FALSE(is_reachable(table.best(s, g)));
}

TEST(Scenario, ValidationAndParsing) {
    const auto map = bundled_map("h_maze");
    auto s = default_h_maze_script();
    s.test.goal = {4, 4};  // never a training goal
    EXPECT_THROW(s.validate(map), std::invalid_argument);
    s = default_h_maze_script();
    s.training[0].start = {0, 0};
    EXPECT_THROW(s.validate(map), std::invalid_argument);

    const auto parsed = parse_scenario_script(
        "map = h_maze\n"
        "train = 1,1 -> 7,5\n"
        "train = 1,7 -> 7,7\n"
        "test = 1,7 -> 7,5\n"
        "seed = 0\n");
    const auto def = default_h_maze_script();
    ASSERT_EQ(parsed.training.size(), 2u);
    EXPECT_EQ(parsed.training[1].goal, def.training[1].goal);
    EXPECT_EQ(parsed.test.start, def.test.start);
    EXPECT_THROW(parse_scenario_script("train = 1,1 => 7,5\n"), ConfigError);
}

TEST(Scenario, Outputs) {
    const auto report = run_scenario(default_h_maze_script());
    const auto dir = testkit::scratch_dir("scenario_out");
    write_scenario(report, bundled_map("h_maze"), dir);
    const auto doc = nlohmann::json::parse(slurp(dir / "scenario.json"));
    EXPECT_EQ(doc["oracle_distance"], 10);
    EXPECT_TRUE(std::filesystem::exists(dir / "fw_snapshot_ep1.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "heatmap.svg"));
    std::ostringstream a, b;
    write_scenario_json(report, a);
    write_scenario_json(run_scenario(default_h_maze_script()), b);
    EXPECT_EQ(a.str(), b.str());
}
