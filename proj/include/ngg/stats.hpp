#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ngg/errors.hpp"
#include "ngg/network.hpp"

namespace ngg {

struct NetworkStats {
  double avg_degree = 0.0;
  double avg_path_length = 0.0;
  double clustering_coefficient = 0.0;
};

/// Local clustering of node i: closed triplets over C(deg, 2); 0 when deg < 2.
inline double local_clustering(const Network& net, NodeId i) {
  const auto nbrs = net.neighbors(i);
  const std::size_t d = nbrs.size();
  if (d < 2) return 0.0;
  std::size_t links = 0;
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a + 1; b < d; ++b)
      if (net.adjacent(nbrs[a], nbrs[b])) ++links;
  return static_cast<double>(links) / (static_cast<double>(d) * static_cast<double>(d - 1) / 2.0);
}

/// Average degree, exact average shortest-path length over unordered pairs,
/// and mean local clustering coefficient. Throws Disconnected.
inline NetworkStats compute_stats(const Network& net) {
  const std::size_t m = net.node_count();
  if (m < 2) throw InvalidParam("stats need at least two nodes");

  NetworkStats stats;
  stats.avg_degree = 2.0 * static_cast<double>(net.edge_count()) / static_cast<double>(m);

  // Plain BFS per source; distances are summed as integers so the mean is exact
  // up to the final division.
  std::uint64_t distance_sum = 0;
  std::vector<std::uint32_t> dist(m);
  std::vector<NodeId> queue(m);
  for (NodeId s = 0; s < m; ++s) {
    std::fill(dist.begin(), dist.end(), UINT32_MAX);
    dist[s] = 0;
    std::size_t head = 0, tail = 0;
    queue[tail++] = s;
    while (head < tail) {
      const NodeId u = queue[head++];
      for (NodeId v : net.neighbors(u)) {
        if (dist[v] != UINT32_MAX) continue;
        dist[v] = dist[u] + 1;
        queue[tail++] = v;
      }
    }
    if (tail != m) throw Disconnected("network has " + std::to_string(m - tail) + " nodes unreachable from node " +
                                      std::to_string(s));
    for (NodeId v = s + 1; v < m; ++v) distance_sum += dist[v];
  }
  const double pairs = static_cast<double>(m) * static_cast<double>(m - 1) / 2.0;
  stats.avg_path_length = static_cast<double>(distance_sum) / pairs;

  double cc_sum = 0.0;
  for (NodeId i = 0; i < m; ++i) cc_sum += local_clustering(net, i);
  stats.clustering_coefficient = cc_sum / static_cast<double>(m);
  return stats;
}

}  // namespace ngg
