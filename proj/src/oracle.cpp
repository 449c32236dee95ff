#include "fwrl/oracle.hpp"

#include <deque>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>

#include "fwrl/env.hpp"

namespace fwrl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<StateId> neighbours(const GridMap& map, StateId s) {
    std::vector<StateId> out;
    const CellCoord here = map.coord(s);
    for (Direction d : kDirections) {
        const CellCoord next = intended_move(here, d, map);
        if (next != here) out.push_back(map.require_state(next));
    }
    return out;
}

void require_positive(double edge_weight) {
    if (!(edge_weight > 0.0)) throw std::invalid_argument("edge_weight must be positive");
}

}  // namespace

std::vector<std::optional<int>> bfs_distances(const GridMap& map, StateId source) {
    std::vector<std::optional<int>> dist(map.num_states());
    std::deque<StateId> frontier{source};
    dist[source] = 0;
    while (!frontier.empty()) {
        const StateId s = frontier.front();
        frontier.pop_front();
        for (StateId t : neighbours(map, s)) {
            if (!dist[t]) {
                dist[t] = *dist[s] + 1;
                frontier.push_back(t);
            }
        }
    }
    return dist;
}

std::vector<std::optional<double>> dijkstra(const GridMap& map, StateId source,
                                            double edge_weight) {
    require_positive(edge_weight);
    const std::size_t n = map.num_states();
    std::vector<double> best(n, kInf);
    std::vector<bool> done(n, false);
    using Entry = std::pair<double, StateId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    best[source] = 0.0;
    queue.emplace(0.0, source);
    while (!queue.empty()) {
        const auto [d, s] = queue.top();
        queue.pop();
        if (done[s]) continue;
        done[s] = true;
        for (StateId t : neighbours(map, s)) {
            if (d + edge_weight < best[t]) {
                best[t] = d + edge_weight;
                queue.emplace(best[t], t);
            }
        }
    }
    std::vector<std::optional<double>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (best[i] < kInf) out[i] = best[i];
    }
    return out;
}

DistanceTable::DistanceTable(std::size_t num_states)
    : n_(num_states), dist_(num_states * num_states, kInf) {}

std::optional<double> DistanceTable::at(StateId from, StateId to) const {
    const double d = dist_[from * n_ + to];
    if (d == kInf) return std::nullopt;
    return d;
}

void DistanceTable::set(StateId from, StateId to, std::optional<double> d) {
    dist_[from * n_ + to] = d.value_or(kInf);
}

DistanceTable floyd_warshall(const GridMap& map, double edge_weight) {
    require_positive(edge_weight);
    const std::size_t n = map.num_states();
    std::vector<double> d(n * n, kInf);
    for (StateId i = 0; i < n; ++i) {
        d[i * n + i] = 0.0;
        for (StateId j : neighbours(map, i)) d[i * n + j] = edge_weight;
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const double ik = d[i * n + k];
            if (ik == kInf) continue;
            for (std::size_t j = 0; j < n; ++j) {
                const double kj = d[k * n + j];
                if (kj != kInf && ik + kj < d[i * n + j]) d[i * n + j] = ik + kj;
            }
        }
    }
    DistanceTable table(n);
    for (StateId i = 0; i < n; ++i) {
        for (StateId j = 0; j < n; ++j) {
            if (d[i * n + j] < kInf) table.set(i, j, d[i * n + j]);
        }
    }
    return table;
}

DistanceTable bfs_all_pairs(const GridMap& map, double edge_weight) {
    require_positive(edge_weight);
    const std::size_t n = map.num_states();
    DistanceTable table(n);
    for (StateId i = 0; i < n; ++i) {
        const auto row = bfs_distances(map, i);
        for (StateId j = 0; j < n; ++j) {
            if (row[j]) table.set(i, j, *row[j] * edge_weight);
        }
    }
    return table;
}

}  // namespace fwrl
