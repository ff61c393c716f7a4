#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ngg/errors.hpp"
#include "ngg/network.hpp"
#include "ngg/random.hpp"

namespace ngg {

/// Attempts made by gen_random_graph / gen_small_world before giving up on connectivity.
inline constexpr int kConnectivityAttempts = 100;

namespace detail {

using EdgeList = std::vector<std::pair<NodeId, NodeId>>;

template <typename Build>
Network build_connected(const NetworkSpec& spec, Build&& build) {
  for (int attempt = 0; attempt < kConnectivityAttempts; ++attempt) {
    Network net = Network::from_edges(spec.m, build(), spec);
    if (is_connected(net)) return net;
  }
  throw ConnectivityFailure(spec_label(spec) + " with m=" + std::to_string(spec.m) + ": no connected sample in " +
                            std::to_string(kConnectivityAttempts) + " attempts");
}

}  // namespace detail

/// Erdős–Rényi G(M, P): every unordered pair is an edge independently with probability P.
/// Redrawn until connected.
template <RandomSource R>
Network gen_random_graph(std::size_t m, double p, R& rng) {
  const NetworkSpec spec{m, RandomGraphParams{p}};
  spec.validate();
  return detail::build_connected(spec, [&] {
    detail::EdgeList edges;
    for (NodeId u = 0; u < m; ++u)
      for (NodeId v = u + 1; v < m; ++v)
        if (rng.bernoulli(p)) edges.emplace_back(u, v);
    return edges;
  });
}

/// Watts–Strogatz small world.
///
/// Ring lattice with each node linked to its k nearest neighbours on either
/// side; then for offset j = 1..k and node u = 0..M-1 the lattice edge
/// (u, u+j mod M) is rewired with probability rp to (u, w), w uniform over the
/// nodes that are neither u nor already adjacent to u. Nodes already adjacent to
/// everyone keep their edge. Redrawn until connected.
template <RandomSource R>
Network gen_small_world(std::size_t m, std::size_t k, double rp, R& rng) {
  const NetworkSpec spec{m, SmallWorldParams{k, rp}};
  spec.validate();
  return detail::build_connected(spec, [&] {
    AdjacencyMatrix adj(m);
    std::vector<std::size_t> degree(m, 2 * k);
    for (std::size_t u = 0; u < m; ++u)
      for (std::size_t j = 1; j <= k; ++j) adj.set(u, (u + j) % m);

    for (std::size_t j = 1; j <= k; ++j) {
      for (std::size_t u = 0; u < m; ++u) {
        if (!rng.bernoulli(rp)) continue;
        if (degree[u] >= m - 1) continue;
        const std::size_t v = (u + j) % m;
        std::size_t w = 0;
        do {
          w = rng.uniform_index(m);
        } while (w == u || adj.test(u, w));
        adj.reset(u, v);
        adj.set(u, w);
        --degree[v];
        ++degree[w];
      }
    }

    detail::EdgeList edges;
    for (NodeId u = 0; u < m; ++u)
      for (NodeId v = u + 1; v < m; ++v)
        if (adj.test(u, v)) edges.emplace_back(u, v);
    return edges;
  });
}

/// Barabási–Albert preferential attachment.
///
/// Starts from a complete graph on n0 nodes; every later node makes e
/// degree-weighted draws among the existing nodes, using degrees from before
/// its own edges are added.
///
/// - WithReplacement: the e draws are independent and repeated targets merge
///   into a single edge, so a node gets between 1 and e edges.
/// - WithoutReplacement: each draw excludes targets already picked, giving
///   exactly C(n0, 2) + e (M - n0) edges.
///
/// The result is always connected.
template <RandomSource R>
Network gen_scale_free(std::size_t m, std::size_t n0, std::size_t e, R& rng,
                       Attachment attachment = Attachment::WithReplacement) {
  const NetworkSpec spec{m, ScaleFreeParams{n0, e, attachment}};
  spec.validate();

  detail::EdgeList edges;
  // One entry per edge endpoint: a uniform pick from it is a degree-weighted pick.
  std::vector<NodeId> endpoints;
  for (NodeId u = 0; u < n0; ++u) {
    for (NodeId v = u + 1; v < n0; ++v) {
      edges.emplace_back(u, v);
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }

  std::vector<char> picked(m, 0);
  std::vector<NodeId> targets;
  for (NodeId fresh = static_cast<NodeId>(n0); fresh < m; ++fresh) {
    targets.clear();
    // A single-node seed has no degree mass yet; fall back to uniform.
    auto draw = [&] {
      return endpoints.empty() ? static_cast<NodeId>(rng.uniform_index(fresh))
                               : endpoints[rng.uniform_index(endpoints.size())];
    };
    if (attachment == Attachment::WithReplacement) {
      for (std::size_t k = 0; k < e; ++k) {
        const NodeId t = draw();
        if (picked[t]) continue;
        picked[t] = 1;
        targets.push_back(t);
      }
    } else {
      // Rejecting picked nodes samples the degree distribution conditioned on
      // the remaining candidates.
      while (targets.size() < e) {
        const NodeId t = draw();
        if (picked[t]) continue;
        picked[t] = 1;
        targets.push_back(t);
      }
    }
    for (NodeId t : targets) {
      picked[t] = 0;
      edges.emplace_back(t, fresh);
      endpoints.push_back(t);
      endpoints.push_back(fresh);
    }
  }

  Network net = Network::from_edges(m, edges, spec);
  if (!is_connected(net)) throw ConnectivityFailure("scale free generator produced a disconnected graph");
  return net;
}

/// Dispatch on the spec's model.
template <RandomSource R>
Network generate(const NetworkSpec& spec, R& rng) {
  spec.validate();
  switch (spec.model()) {
    case NetworkModel::RandomGraph: return gen_random_graph(spec.m, std::get<RandomGraphParams>(spec.params).p, rng);
    case NetworkModel::SmallWorld: {
      const auto& ws = std::get<SmallWorldParams>(spec.params);
      return gen_small_world(spec.m, ws.k, ws.rp, rng);
    }
    case NetworkModel::ScaleFree: {
      const auto& sf = std::get<ScaleFreeParams>(spec.params);
      return gen_scale_free(spec.m, sf.n0, sf.e, rng, sf.attachment);
    }
  }
  throw InvalidParam("unknown network model");
}

}  // namespace ngg
