#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ngg/errors.hpp"

namespace ngg {

using NodeId = std::uint32_t;

enum class NetworkModel { RandomGraph, SmallWorld, ScaleFree };

struct RandomGraphParams {
  double p = 0.0;  // edge probability
  bool operator==(const RandomGraphParams&) const = default;
};

struct SmallWorldParams {
  std::size_t k = 1;  // lattice neighbours on each side
  double rp = 0.0;    // rewiring probability
  bool operator==(const SmallWorldParams&) const = default;
};

/// How a new scale-free node draws its e degree-weighted targets.
enum class Attachment {
  /// e independent draws; repeated targets collapse into one edge.
  WithReplacement,
  /// e distinct targets, each drawn among those not yet picked.
  WithoutReplacement,
};

struct ScaleFreeParams {
  std::size_t n0 = 1;  // seed clique size
  std::size_t e = 1;   // attachment draws per new node
  Attachment attachment = Attachment::WithReplacement;
  bool operator==(const ScaleFreeParams&) const = default;
};

/// Generation recipe for one of the three supported network families.
struct NetworkSpec {
  std::size_t m = 2;
  std::variant<RandomGraphParams, SmallWorldParams, ScaleFreeParams> params;

  NetworkModel model() const noexcept { return static_cast<NetworkModel>(params.index()); }

  /// Throws InvalidParam when the recipe cannot produce a valid network.
  void validate() const {
    if (m < 2) throw InvalidParam("network: m must be >= 2");
    if (const auto* rg = std::get_if<RandomGraphParams>(&params)) {
      if (!(rg->p > 0.0 && rg->p < 1.0)) throw InvalidParam("random graph: p must lie in (0, 1)");
    } else if (const auto* ws = std::get_if<SmallWorldParams>(&params)) {
      if (ws->k < 1) throw InvalidParam("small world: k must be >= 1");
      if (2 * ws->k >= m) throw InvalidParam("small world: 2k must be < m");
      if (!(ws->rp >= 0.0 && ws->rp <= 1.0)) throw InvalidParam("small world: rp must lie in [0, 1]");
    } else if (const auto* sf = std::get_if<ScaleFreeParams>(&params)) {
      if (sf->n0 < 1 || sf->n0 + 1 > m) throw InvalidParam("scale free: n0 must satisfy 1 <= n0 < m");
      if (sf->e < 1 || sf->e > sf->n0) throw InvalidParam("scale free: e must satisfy 1 <= e <= n0");
    }
  }

  bool operator==(const NetworkSpec&) const = default;
};

inline std::string model_name(NetworkModel model) {
  switch (model) {
    case NetworkModel::RandomGraph: return "rg";
    case NetworkModel::SmallWorld: return "ws";
    case NetworkModel::ScaleFree: return "ba";
  }
  return "?";
}

/// Short label in the style "RG-0.05", "WS-20-0.2", "BA-50".
inline std::string spec_label(const NetworkSpec& spec) {
  auto fmt = [](double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  };
  if (const auto* rg = std::get_if<RandomGraphParams>(&spec.params)) return "RG-" + fmt(rg->p);
  if (const auto* ws = std::get_if<SmallWorldParams>(&spec.params))
    return "WS-" + std::to_string(ws->k) + "-" + fmt(ws->rp);
  const auto& sf = std::get<ScaleFreeParams>(spec.params);
  return "BA-" + std::to_string(sf.e);
}

/// Symmetric bit matrix used while building and for O(1) adjacency queries.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(std::size_t n) : n_(n), words_per_row_((n + 63) / 64), bits_(n * words_per_row_, 0) {}

  std::size_t size() const noexcept { return n_; }

  bool test(std::size_t i, std::size_t j) const noexcept {
    return (bits_[i * words_per_row_ + j / 64] >> (j % 64)) & 1U;
  }
  void set(std::size_t i, std::size_t j) noexcept {
    bits_[i * words_per_row_ + j / 64] |= std::uint64_t{1} << (j % 64);
    bits_[j * words_per_row_ + i / 64] |= std::uint64_t{1} << (i % 64);
  }
  void reset(std::size_t i, std::size_t j) noexcept {
    bits_[i * words_per_row_ + j / 64] &= ~(std::uint64_t{1} << (j % 64));
    bits_[j * words_per_row_ + i / 64] &= ~(std::uint64_t{1} << (i % 64));
  }

  bool operator==(const AdjacencyMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> bits_;
};

/// Undirected simple graph on nodes 0..M-1.
///
/// Holds sorted adjacency lists for traversal and a bit matrix for constant-time
/// edge queries. Construction rejects self-loops and duplicate edges; it does not
/// check connectivity, see is_connected().
class Network {
 public:
  Network() = default;

  static Network from_edges(std::size_t m, std::span<const std::pair<NodeId, NodeId>> edges, NetworkSpec spec = {}) {
    Network net;
    net.spec_ = std::move(spec);
    net.spec_.m = m;
    net.matrix_ = AdjacencyMatrix(m);
    net.adj_.assign(m, {});
    for (auto [u, v] : edges) {
      if (u >= m || v >= m) throw InvalidParam("edge endpoint out of range");
      if (u == v) throw InvalidParam("self-loop on node " + std::to_string(u));
      if (net.matrix_.test(u, v)) throw InvalidParam("duplicate edge " + std::to_string(u) + "-" + std::to_string(v));
      net.matrix_.set(u, v);
      net.adj_[u].push_back(v);
      net.adj_[v].push_back(u);
    }
    for (auto& list : net.adj_) std::sort(list.begin(), list.end());
    net.edge_count_ = edges.size();
    return net;
  }

  std::size_t node_count() const noexcept { return adj_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  std::size_t degree(NodeId i) const noexcept { return adj_[i].size(); }
  std::span<const NodeId> neighbors(NodeId i) const noexcept { return adj_[i]; }
  bool adjacent(NodeId i, NodeId j) const noexcept { return matrix_.test(i, j); }
  const NetworkSpec& spec() const noexcept { return spec_; }

  /// Edge list with u < v, sorted lexicographically.
  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edge_count_);
    for (NodeId u = 0; u < adj_.size(); ++u)
      for (NodeId v : adj_[u])
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  bool operator==(const Network& other) const { return adj_ == other.adj_; }

 private:
  NetworkSpec spec_;
  AdjacencyMatrix matrix_;
  std::vector<std::vector<NodeId>> adj_;
  std::size_t edge_count_ = 0;
};

/// Hop distances from `source`; unreachable nodes get SIZE_MAX.
inline std::vector<std::size_t> bfs_distances(const Network& net, NodeId source) {
  std::vector<std::size_t> dist(net.node_count(), SIZE_MAX);
  std::vector<NodeId> frontier{source};
  dist[source] = 0;
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const NodeId u = frontier[head];
    for (NodeId v : net.neighbors(u)) {
      if (dist[v] != SIZE_MAX) continue;
      dist[v] = dist[u] + 1;
      frontier.push_back(v);
    }
  }
  return dist;
}

inline bool is_connected(const Network& net) {
  if (net.node_count() == 0) return true;
  const auto dist = bfs_distances(net, 0);
  return std::none_of(dist.begin(), dist.end(), [](std::size_t d) { return d == SIZE_MAX; });
}

}  // namespace ngg
