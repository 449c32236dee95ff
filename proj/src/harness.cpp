#include "fwrl/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

namespace fwrl {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        out.push_back(trim(s.substr(pos, next == std::string_view::npos ? next : next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return value;
}

std::optional<std::vector<std::uint64_t>> parse_seed_list(std::string_view s) {
    std::vector<std::uint64_t> out;
    for (auto item : split(s, ',')) {
        const auto dash = item.find('-');
        if (dash != std::string_view::npos && dash > 0) {
            auto lo = parse_number<std::uint64_t>(item.substr(0, dash));
            auto hi = parse_number<std::uint64_t>(item.substr(dash + 1));
            if (!lo || !hi || *lo > *hi) return std::nullopt;
            for (auto v = *lo; v <= *hi; ++v) out.push_back(v);
        } else {
            auto v = parse_number<std::uint64_t>(item);
            if (!v) return std::nullopt;
            out.push_back(*v);
        }
    }
    return out;
}

}  // namespace

ConfigError::ConfigError(int line, std::string field, const std::string& message)
    : std::runtime_error("config line " + std::to_string(line) + ", field '" + field +
                         "': " + message),
      line_(line),
      field_(std::move(field)) {}

void RunConfig::validate() const {
    if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
    if (seeds.empty()) throw std::invalid_argument("seeds must not be empty");
    auto sorted = seeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw std::invalid_argument("seeds must be distinct");
    }
    if (agents.empty()) throw std::invalid_argument("at least one agent is required");
    agent.validate();
    env_config().validate();
}

EnvConfig RunConfig::env_config() const {
    return EnvConfig{resolve_map(map), steps_per_episode, goal_reward, step_reward, wind_prob};
}

RunConfig parse_run_config(std::string_view text) {
    RunConfig cfg;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(line_no, std::string(line), "expected 'key = value'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        auto fail = [&](const std::string& why) -> ConfigError {
            return ConfigError(line_no, key, why + " (got '" + std::string(value) + "')");
        };
        auto real = [&]() {
            auto v = parse_number<double>(value);
            if (!v || !std::isfinite(*v)) throw fail("expected a number");
            return *v;
        };
        auto integer = [&]() {
            auto v = parse_number<int>(value);
            if (!v) throw fail("expected an integer");
            return *v;
        };

        if (key == "map") {
            if (value.empty()) throw fail("expected a map name or path");
            cfg.map = std::string(value);
        } else if (key == "steps_per_episode") {
            cfg.steps_per_episode = integer();
            if (cfg.steps_per_episode < 1) throw fail("must be positive");
        } else if (key == "episodes") {
            cfg.episodes = integer();
            if (cfg.episodes < 1) throw fail("must be >= 1");
        } else if (key == "goal_reward") {
            cfg.goal_reward = real();
        } else if (key == "step_reward") {
            cfg.step_reward = real();
        } else if (key == "wind_prob") {
            cfg.wind_prob = real();
            if (cfg.wind_prob < 0.0 || cfg.wind_prob > 1.0) throw fail("must lie in [0, 1]");
        } else if (key == "agents") {
            cfg.agents.clear();
            for (auto name : split(value, ',')) {
                auto kind = parse_agent_kind(name);
                if (!kind) throw fail("unknown agent '" + std::string(name) + "'");
                cfg.agents.push_back(*kind);
            }
        } else if (key == "epsilon") {
            cfg.agent.epsilon = real();
            if (cfg.agent.epsilon < 0.0 || cfg.agent.epsilon > 1.0) throw fail("must lie in [0, 1]");
        } else if (key == "alpha") {
            cfg.agent.alpha = real();
            if (cfg.agent.alpha < 0.0 || cfg.agent.alpha > 1.0) throw fail("must lie in [0, 1]");
        } else if (key == "gamma") {
            cfg.agent.gamma = real();
            if (cfg.agent.gamma <= 0.0 || cfg.agent.gamma > 1.0) throw fail("must lie in (0, 1]");
        } else if (key == "q_init") {
            cfg.agent.q_init = real();
        } else if (key == "tie_break") {
            auto tb = parse_tie_break(value);
            if (!tb) throw fail("expected 'fixed' or 'random'");
            cfg.agent.tie_break = *tb;
        } else if (key == "seeds") {
            auto seeds = parse_seed_list(value);
            if (!seeds || seeds->empty()) throw fail("expected a list like '0-9' or '1, 5, 7'");
            cfg.seeds = std::move(*seeds);
        } else if (key == "output_dir") {
            cfg.output_dir = std::string(value);
        } else if (key == "jobs") {
            const int j = integer();
            if (j < 0) throw fail("must be >= 0");
            cfg.jobs = static_cast<unsigned>(j);
        } else {
            throw ConfigError(line_no, key, "unknown key");
        }
    }
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

std::filesystem::path resolve_output_dir(const std::optional<std::string>& cli_out,
                                         const std::string& config_out) {
    if (cli_out && !cli_out->empty()) return *cli_out;
    if (!config_out.empty()) return config_out;
    if (const char* env = std::getenv("FWRL_OUT_DIR"); env != nullptr && *env != '\0') return env;
    return "fwrl_out";
}

// ---------------------------------------------------------------------------

std::uint64_t episode_seed(std::uint64_t run_seed, int episode) {
    return mix_seed(run_seed, 0x1000 + static_cast<std::uint64_t>(episode));
}

EpisodeLog run_episode(Agent& agent, const Environment& env, std::uint64_t seed,
                       Rng& agent_rng) {
    const GridMap& map = env.map();
    EnvState state = env.begin_episode(seed);
    const StateId goal = map.require_state(state.goal);
    agent.begin_episode(goal);

    EpisodeLog log;
    log.goal = state.goal;
    log.spawn_points.push_back(state.agent);
    log.records.reserve(static_cast<std::size_t>(env.config().steps_per_episode));
    bool done = false;
    while (!done) {
        const CellCoord here = state.agent;
        const StateId s = map.require_state(here);
        const Action a = agent.act(s, goal, agent_rng);
        const StepOutcome out = env.step(state, a);
        agent.observe({s, a, out.reward, map.require_state(out.next_state)}, goal);
        log.records.push_back({here, a, out.reward, out.next_state, out.respawned});
        if (out.respawned) log.spawn_points.push_back(out.agent);
        done = out.episode_done;
    }
    return log;
}

namespace {

std::vector<ResultRow> run_job(const RunConfig& config, const Environment& env,
                               const DistanceTable& oracle, AgentKind kind, std::uint64_t seed) {
    const TaskInfo task{env.map().num_states(), config.goal_reward, config.step_reward,
                        config.steps_per_episode};
    auto agent = make_agent(kind, config.agent, task);
    Rng agent_rng(mix_seed(seed, 1));
    std::vector<ResultRow> rows;
    rows.reserve(static_cast<std::size_t>(config.episodes));
    for (int ep = 1; ep <= config.episodes; ++ep) {
        const EpisodeLog log = run_episode(*agent, env, episode_seed(seed, ep), agent_rng);
        rows.push_back({kind, seed, ep, summarize_episode(log, oracle, env.map())});
    }
    return rows;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::vector<AgentSummary> summarize_agents(const std::vector<ResultRow>& rows) {
    // (algo, seed) -> episode summaries in episode order
    std::map<std::pair<AgentKind, std::uint64_t>, std::vector<const ResultRow*>> runs;
    for (const auto& r : rows) runs[{r.algo, r.seed}].push_back(&r);

    std::map<AgentKind, AgentSummary> by_agent;
    std::map<AgentKind, std::vector<double>> pooled_tail;
    std::map<AgentKind, std::vector<std::optional<double>>> pooled_ineff;
    for (auto& [key, run] : runs) {
        std::sort(run.begin(), run.end(),
                  [](const ResultRow* a, const ResultRow* b) { return a->episode < b->episode; });
        std::vector<EpisodeSummary> eps;
        for (const auto* r : run) eps.push_back(r->summary);
        const RunSummary rs = summarize_run(eps);
        auto& agent = by_agent[key.first];
        agent.algo = key.first;
        agent.efficiency_index_by_seed.push_back(rs.efficiency_index);
        const auto take = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(rs.rewards.size()))));
        pooled_tail[key.first].insert(pooled_tail[key.first].end(),
                                      rs.rewards.end() - static_cast<std::ptrdiff_t>(take),
                                      rs.rewards.end());
        pooled_ineff[key.first].insert(pooled_ineff[key.first].end(), rs.dist_ineff.begin(),
                                       rs.dist_ineff.end());
    }
    std::vector<AgentSummary> out;
    for (auto& [kind, agent] : by_agent) {
        agent.median_reward_last20 = median_of(pooled_tail[kind]);
        // Never reaching the threshold ranks worst. The median is undefined
        // when it falls on such a seed.
        std::vector<double> eff;
        for (const auto& e : agent.efficiency_index_by_seed) {
            eff.push_back(e ? static_cast<double>(*e) : std::numeric_limits<double>::infinity());
        }
        const double med = median_of(eff);
        if (std::isfinite(med)) agent.efficiency_index = med;
        agent.mean_dist_ineff = mean_defined(pooled_ineff[kind]);
        out.push_back(agent);
    }
    return out;
}

ResultsBundle run_experiment(const RunConfig& config) {
    config.validate();
    const Environment env(config.env_config());
    const DistanceTable oracle = bfs_all_pairs(env.map());

    struct Job {
        AgentKind kind;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (AgentKind k : config.agents) {
        for (auto seed : config.seeds) jobs.push_back({k, seed});
    }
    unsigned workers = config.jobs != 0 ? config.jobs : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));

    ResultsBundle bundle;
    bundle.map_name = env.map().name().empty() ? config.map : env.map().name();
    for (std::size_t start = 0; start < jobs.size(); start += workers) {
        std::vector<std::future<std::vector<ResultRow>>> batch;
        for (std::size_t i = start; i < std::min(jobs.size(), start + workers); ++i) {
            batch.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                                       [&, job = jobs[i]] {
                                           return run_job(config, env, oracle, job.kind, job.seed);
                                       }));
        }
        for (auto& f : batch) {
            auto rows = f.get();
            bundle.rows.insert(bundle.rows.end(), rows.begin(), rows.end());
        }
    }
    std::sort(bundle.rows.begin(), bundle.rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.algo, a.seed, a.episode) < std::tie(b.algo, b.seed, b.episode);
    });
    bundle.agents = summarize_agents(bundle.rows);
    return bundle;
}

// ---------------------------------------------------------------------------

std::string format_number(double v) {
    if (v == -std::numeric_limits<double>::infinity()) return "-inf";
    if (v == std::numeric_limits<double>::infinity()) return "inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_results_csv(const ResultsBundle& bundle, std::ostream& out) {
    out << kResultsHeader << '\n';
    for (const auto& r : bundle.rows) {
        out << to_string(r.algo) << ',' << r.seed << ',' << r.episode << ',' << r.summary.steps
            << ',' << format_number(r.summary.total_reward) << ',' << r.summary.goals_reached
            << ',' << (r.summary.dist_ineff ? format_number(*r.summary.dist_ineff) : "") << '\n';
    }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kResultsHeader) {
        throw std::runtime_error("results.csv: unexpected header");
    }
    std::vector<ResultRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = split(line, ',');
        auto bad = [&] {
            return std::runtime_error("results.csv line " + std::to_string(line_no) + ": malformed row");
        };
        if (f.size() != 7) throw bad();
        ResultRow r;
        auto kind = parse_agent_kind(f[0]);
        auto seed = parse_number<std::uint64_t>(f[1]);
        auto ep = parse_number<int>(f[2]);
        auto steps = parse_number<int>(f[3]);
        auto reward = parse_number<double>(f[4]);
        auto goals = parse_number<int>(f[5]);
        if (!kind || !seed || !ep || !steps || !reward || !goals) throw bad();
        r.algo = *kind;
        r.seed = *seed;
        r.episode = *ep;
        r.summary.steps = *steps;
        r.summary.total_reward = *reward;
        r.summary.goals_reached = *goals;
        if (!f[6].empty()) {
            auto d = parse_number<double>(f[6]);
            if (!d) throw bad();
            r.summary.dist_ineff = *d;
        }
        rows.push_back(r);
    }
    return rows;
}

void write_summary_json(const ResultsBundle& bundle, std::ostream& out) {
    nlohmann::ordered_json doc;
    doc["map"] = bundle.map_name;
    nlohmann::ordered_json agents = nlohmann::ordered_json::object();
    for (const auto& a : bundle.agents) {
        nlohmann::ordered_json entry;
        entry["median_reward_last20"] = a.median_reward_last20;
        if (a.efficiency_index) {
            entry["efficiency_index"] = *a.efficiency_index;
        } else {
            entry["efficiency_index"] = nullptr;
        }
        nlohmann::ordered_json by_seed = nlohmann::ordered_json::array();
        for (const auto& e : a.efficiency_index_by_seed) {
            if (e) {
                by_seed.push_back(*e);
            } else {
                by_seed.push_back(nullptr);
            }
        }
        entry["efficiency_index_by_seed"] = by_seed;
        if (a.mean_dist_ineff) {
            entry["mean_dist_ineff"] = *a.mean_dist_ineff;
        } else {
            entry["mean_dist_ineff"] = nullptr;
        }
        agents[std::string(to_string(a.algo))] = entry;
    }
    doc["agents"] = agents;
    out << doc.dump(2) << '\n';
}

void write_results(const ResultsBundle& bundle, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream csv(dir / "results.csv", std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write " + (dir / "results.csv").string());
        write_results_csv(bundle, csv);
    }
    std::ofstream json(dir / "summary.json", std::ios::binary);
    if (!json) throw std::runtime_error("cannot write " + (dir / "summary.json").string());
    write_summary_json(bundle, json);
}

void write_fw_snapshot_csv(const FWTable& table, const GridMap& map, std::ostream& out) {
    out << "state_x,state_y,action,goal_x,goal_y,value\n";
    for (StateId s = 0; s < table.num_states(); ++s) {
        const CellCoord sc = map.coord(s);
        for (Direction a : kDirections) {
            for (StateId g = 0; g < table.num_states(); ++g) {
                const CellCoord gc = map.coord(g);
                out << sc.x << ',' << sc.y << ',' << to_string(a) << ',' << gc.x << ',' << gc.y
                    << ',' << format_number(table.at(s, a, g)) << '\n';
            }
        }
    }
}

FWTable read_fw_snapshot_csv(std::istream& in, const GridMap& map) {
    FWTable table(map.num_states());
    std::string line;
    std::getline(in, line);
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = split(line, ',');
        auto bad = [&] {
            return std::runtime_error("snapshot line " + std::to_string(line_no) + ": malformed row");
        };
        if (f.size() != 6) throw bad();
        auto sx = parse_number<int>(f[0]);
        auto sy = parse_number<int>(f[1]);
        auto a = parse_direction(f[2]);
        auto gx = parse_number<int>(f[3]);
        auto gy = parse_number<int>(f[4]);
        if (!sx || !sy || !a || !gx || !gy) throw bad();
        double v = kUnreachable;
        if (f[5] != "-inf") {
            auto parsed = parse_number<double>(f[5]);
            if (!parsed) throw bad();
            v = *parsed;
        }
        table.set(map.require_state({*sx, *sy}), *a, map.require_state({*gx, *gy}), v);
    }
    return table;
}

}  // namespace fwrl
