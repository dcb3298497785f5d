// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "types.hpp"

namespace fdtopk {

// Parameters for the preferential-attachment overlay generator.
// attachmentEdges is the number of edges each newly added node brings.
struct TopologyConfig {
  std::uint32_t nodeCount = 0;
  std::uint32_t attachmentEdges = 2;
  std::uint64_t seed = 0;
};

// Undirected overlay graph G(P, E). Adjacency is symmetric, without
// self-loops or duplicate edges. Peer ids are dense integers 0..n-1.
class TopologyGraph {
 public:
  TopologyGraph() = default;
  explicit TopologyGraph(std::uint32_t nodeCount);

  static TopologyGraph from_edges(
      std::uint32_t nodeCount,
      std::span<const std::pair<PeerId, PeerId>> edges);

  std::uint32_t node_count() const { return static_cast<std::uint32_t>(adjacency_.size()); }
  std::uint64_t edge_count() const { return edgeCount_; }

  // Sorted neighbor list of p.
  const std::vector<PeerId>& neighbors(PeerId p) const { return adjacency_[p]; }
  std::uint32_t degree(PeerId p) const { return static_cast<std::uint32_t>(adjacency_[p].size()); }
  bool has_edge(PeerId a, PeerId b) const;

  void add_edge(PeerId a, PeerId b);

  // Textual dump/load: header "nodes <N> edges <M>", then "u v" per line, u < v.
  void dump(std::ostream& out) const;
  static TopologyGraph load(std::istream& in);

 private:
  std::vector<std::vector<PeerId>> adjacency_;
  std::uint64_t edgeCount_ = 0;
};

// Seeded Barabasi-Albert preferential attachment. Always connected.
// Throws std::invalid_argument unless 1 <= attachmentEdges < nodeCount.
TopologyGraph generate_topology(const TopologyConfig& config);

// Mean degree (degrees counted in the full graph) over the given peer set.
// Throws std::invalid_argument on an empty set.
double average_degree(const TopologyGraph& graph, std::span<const PeerId> peers);

// Sorted BFS ball of radius ttl around origin, origin included.
std::vector<PeerId> reachable_set(const TopologyGraph& graph, PeerId origin, int ttl);

// Eccentricity of origin: smallest ttl whose ball covers every node.
// Throws std::runtime_error if some node is unreachable.
int coverage_ttl(const TopologyGraph& graph, PeerId origin);

// Edge count of the subgraph induced by a peer set (|E(P_Q)|).
std::uint64_t induced_edge_count(const TopologyGraph& graph, std::span<const PeerId> peers);

}  // namespace fdtopk
