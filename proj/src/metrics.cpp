#include "fwrl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fwrl {

double total_reward(const EpisodeLog& log) {
    double sum = 0.0;
    for (const auto& r : log.records) sum += r.reward;
    return sum;
}

std::optional<double> distance_inefficiency(const EpisodeLog& log, const DistanceTable& oracle,
                                            const GridMap& map) {
    const StateId goal = map.require_state(log.goal);
    double travelled = 0.0;
    double shortest = 0.0;
    double segment_moves = 0.0;
    std::size_t segment = 0;
    for (const auto& rec : log.records) {
        if (rec.next_state != rec.state) segment_moves += 1.0;
        if (!rec.respawned) continue;
        if (segment >= log.spawn_points.size()) {
            throw std::invalid_argument("episode log has fewer spawn points than respawns");
        }
        const auto d = oracle.at(map.require_state(log.spawn_points[segment]), goal);
        if (!d) throw std::invalid_argument("goal unreachable from a spawn point");
        travelled += segment_moves;
        shortest += *d;
        segment_moves = 0.0;
        ++segment;
    }
    if (shortest == 0.0) return std::nullopt;
    return travelled / shortest;
}

EpisodeSummary summarize_episode(const EpisodeLog& log, const DistanceTable& oracle,
                                 const GridMap& map) {
    EpisodeSummary s;
    s.total_reward = total_reward(log);
    s.dist_ineff = distance_inefficiency(log, oracle, map);
    s.steps = static_cast<int>(log.records.size());
    s.goals_reached = static_cast<int>(std::count_if(
        log.records.begin(), log.records.end(), [](const StepRecord& r) { return r.respawned; }));
    return s;
}

double median_last_fraction(std::span<const double> rewards, double fraction) {
    if (rewards.empty()) return 0.0;
    const auto take = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(rewards.size()))));
    std::vector<double> tail(rewards.end() - static_cast<std::ptrdiff_t>(take), rewards.end());
    std::sort(tail.begin(), tail.end());
    const std::size_t m = tail.size() / 2;
    return tail.size() % 2 == 1 ? tail[m] : 0.5 * (tail[m - 1] + tail[m]);
}

std::optional<int> efficiency_index(std::span<const double> rewards, std::size_t window,
                                    double fraction) {
    if (rewards.empty()) return std::nullopt;
    std::vector<double> trailing(rewards.size());
    for (std::size_t i = 0; i < rewards.size(); ++i) {
        const std::size_t lo = i + 1 >= window ? i + 1 - window : 0;
        const double sum = std::accumulate(rewards.begin() + static_cast<std::ptrdiff_t>(lo),
                                           rewards.begin() + static_cast<std::ptrdiff_t>(i) + 1, 0.0);
        trailing[i] = sum / static_cast<double>(i + 1 - lo);
    }
    const double final_mean = trailing.back();
    const double threshold = fraction * final_mean;
    const double slack = 1e-9 * std::max(1.0, std::abs(final_mean));
    for (std::size_t i = 0; i < trailing.size(); ++i) {
        if (trailing[i] >= threshold - slack) return static_cast<int>(i) + 1;
    }
    return std::nullopt;
}

std::optional<double> mean_defined(std::span<const std::optional<double>> values) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& v : values) {
        if (v) {
            sum += *v;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

RunSummary summarize_run(std::span<const EpisodeSummary> episodes) {
    RunSummary out;
    for (const auto& e : episodes) {
        out.rewards.push_back(e.total_reward);
        out.dist_ineff.push_back(e.dist_ineff);
    }
    out.median_reward_last20 = median_last_fraction(out.rewards);
    out.efficiency_index = efficiency_index(out.rewards);
    out.mean_dist_ineff = mean_defined(out.dist_ineff);
    return out;
}

}  // namespace fwrl
