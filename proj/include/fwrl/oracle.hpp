#pragma once

#include <optional>
#include <vector>

#include "fwrl/grid_map.hpp"

namespace fwrl {

// Exact shortest paths on the wind-free free-cell graph. Edges are the
// non-trivial intended moves, so a bump into a wall is not an edge.

/// Step counts from `source`, indexed by StateId. Empty entries are unreachable.
std::vector<std::optional<int>> bfs_distances(const GridMap& map, StateId source);

/// Weighted distances from `source` with uniform edge weight (> 0).
std::vector<std::optional<double>> dijkstra(const GridMap& map, StateId source,
                                            double edge_weight);

/// All-pairs shortest distances over the states of one map.
class DistanceTable {
 public:
    explicit DistanceTable(std::size_t num_states);

    std::size_t num_states() const { return n_; }
    std::optional<double> at(StateId from, StateId to) const;
    void set(StateId from, StateId to, std::optional<double> d);

    friend bool operator==(const DistanceTable&, const DistanceTable&) = default;

 private:
    std::size_t n_;
    std::vector<double> dist_;  // +inf marks unreachable
};

DistanceTable floyd_warshall(const GridMap& map, double edge_weight);

/// All-pairs table assembled from one BFS per source, scaled by edge_weight.
DistanceTable bfs_all_pairs(const GridMap& map, double edge_weight = 1.0);

}  // namespace fwrl
