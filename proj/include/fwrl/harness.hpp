#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fwrl/agents.hpp"
#include "fwrl/env.hpp"
#include "fwrl/metrics.hpp"

namespace fwrl {

/// Reported with the 1-based line and the offending key.
class ConfigError : public std::runtime_error {
 public:
    ConfigError(int line, std::string field, const std::string& message);
    int line() const { return line_; }
    const std::string& field() const { return field_; }

 private:
    int line_;
    std::string field_;
};

struct RunConfig {
    std::string map = "four_room";  // bundled name or map file path
    int steps_per_episode = 300;
    double goal_reward = 10.0;
    double step_reward = -1.0;
    double wind_prob = 0.25;
    std::vector<AgentKind> agents = {kAgentKinds.begin(), kAgentKinds.end()};
    AgentConfig agent;
    int episodes = 100;
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::string output_dir;
    /// Concurrent (agent, seed) jobs; 0 picks the hardware concurrency.
    unsigned jobs = 0;

    void validate() const;
    EnvConfig env_config() const;
};

/// Flat `key = value` lines; '#' starts a comment. See docs/config.md.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

/// --out, then the config's output_dir, then $FWRL_OUT_DIR, then "fwrl_out".
std::filesystem::path resolve_output_dir(const std::optional<std::string>& cli_out,
                                         const std::string& config_out);

struct ResultRow {
    AgentKind algo = AgentKind::FWRL;
    std::uint64_t seed = 0;
    int episode = 0;  // 1-based
    EpisodeSummary summary;
};

struct AgentSummary {
    AgentKind algo = AgentKind::FWRL;
    /// Median total reward pooled over the last 20% of every seed's episodes.
    double median_reward_last20 = 0.0;
    /// Median over seeds of the per-seed efficiency index, seeds that never
    /// reach the threshold ranking last. Empty when the median is such a seed.
    std::optional<double> efficiency_index;
    std::vector<std::optional<int>> efficiency_index_by_seed;
    std::optional<double> mean_dist_ineff;
};

struct ResultsBundle {
    std::string map_name;
    std::vector<ResultRow> rows;  // sorted by (algo, seed, episode)
    std::vector<AgentSummary> agents;
};

/// Runs one agent for one episode from `seed`, returning the trajectory.
EpisodeLog run_episode(Agent& agent, const Environment& env, std::uint64_t episode_seed,
                       Rng& agent_rng);

/// Seed used for the environment of episode `episode` (1-based) of `run_seed`.
std::uint64_t episode_seed(std::uint64_t run_seed, int episode);

ResultsBundle run_experiment(const RunConfig& config);

/// Recomputes per-agent summaries from the rows.
std::vector<AgentSummary> summarize_agents(const std::vector<ResultRow>& rows);

inline constexpr std::string_view kResultsHeader =
    "algo,seed,episode,steps,total_reward,goals_reached,dist_ineff";

void write_results_csv(const ResultsBundle& bundle, std::ostream& out);
std::vector<ResultRow> read_results_csv(std::istream& in);
void write_summary_json(const ResultsBundle& bundle, std::ostream& out);

/// Writes results.csv and summary.json into `dir`, creating it if needed.
void write_results(const ResultsBundle& bundle, const std::filesystem::path& dir);

/// Shortest round-trip decimal form.
std::string format_number(double v);

/// state_x,state_y,action,goal_x,goal_y,value with "-inf" for unreachable.
void write_fw_snapshot_csv(const FWTable& table, const GridMap& map, std::ostream& out);
FWTable read_fw_snapshot_csv(std::istream& in, const GridMap& map);

}  // namespace fwrl
