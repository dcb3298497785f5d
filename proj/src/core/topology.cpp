// SPDX-License-Identifier: Apache-2.0
#include "topology.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace fdtopk {

TopologyGraph::TopologyGraph(std::uint32_t nodeCount) : adjacency_(nodeCount) {}

TopologyGraph TopologyGraph::from_edges(
    std::uint32_t nodeCount, std::span<const std::pair<PeerId, PeerId>> edges) {
  TopologyGraph g(nodeCount);
  for (const auto& [a, b] : edges) g.add_edge(a, b);
  return g;
}

bool TopologyGraph::has_edge(PeerId a, PeerId b) const {
  const auto& adj = adjacency_[a];
  return std::binary_search(adj.begin(), adj.end(), b);
}

void TopologyGraph::add_edge(PeerId a, PeerId b) {
  if (a == b) throw std::invalid_argument("self-loop");
  if (a >= node_count() || b >= node_count()) throw std::invalid_argument("node out of range");
  if (has_edge(a, b)) throw std::invalid_argument("duplicate edge");
  adjacency_[a].insert(std::lower_bound(adjacency_[a].begin(), adjacency_[a].end(), b), b);
  adjacency_[b].insert(std::lower_bound(adjacency_[b].begin(), adjacency_[b].end(), a), a);
  ++edgeCount_;
}

void TopologyGraph::dump(std::ostream& out) const {
  out << "nodes " << node_count() << " edges " << edge_count() << "\n";
  for (PeerId u = 0; u < node_count(); ++u)
    for (PeerId v : adjacency_[u])
      if (u < v) out << u << " " << v << "\n";
}

TopologyGraph TopologyGraph::load(std::istream& in) {
  std::string nodesTok, edgesTok;
  std::uint32_t n = 0;
  std::uint64_t m = 0;
  in >> nodesTok >> n >> edgesTok >> m;
  if (!in || nodesTok != "nodes" || edgesTok != "edges")
    throw std::runtime_error("bad graph header");
  TopologyGraph g(n);
  for (std::uint64_t i = 0; i < m; ++i) {
    PeerId u, v;
    in >> u >> v;
    if (!in) throw std::runtime_error("truncated edge list");
    g.add_edge(u, v);
  }
  return g;
}

TopologyGraph generate_topology(const TopologyConfig& config) {
  if (config.nodeCount < 1) throw std::invalid_argument("nodeCount must be >= 1");
  if (config.attachmentEdges < 1) throw std::invalid_argument("attachmentEdges must be >= 1");
  if (config.attachmentEdges >= config.nodeCount)
    throw std::invalid_argument("attachmentEdges must be < nodeCount");

  const std::uint32_t n = config.nodeCount;
  const std::uint32_t m = config.attachmentEdges;
  TopologyGraph g(n);

  // Seed clique of min(n, m+1) nodes, then preferential attachment of m
  // edges per new node. The repeated-endpoint list gives degree-proportional
  // sampling.
  const std::uint32_t core = std::min(n, m + 1);
  std::vector<PeerId> endpoints;
  endpoints.reserve(2ull * m * n);
  for (PeerId u = 0; u < core; ++u)
    for (PeerId v = u + 1; v < core; ++v) {
      g.add_edge(u, v);
      endpoints.push_back(u);
      endpoints.push_back(v);
    }

  std::mt19937_64 rng(splitmix64(config.seed ^ 0x746f706f6c6f6779ull));
  std::vector<PeerId> chosen;
  for (PeerId node = core; node < n; ++node) {
    chosen.clear();
    while (chosen.size() < m) {
      std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
      PeerId target = endpoints[pick(rng)];
      if (std::find(chosen.begin(), chosen.end(), target) == chosen.end())
        chosen.push_back(target);
    }
    for (PeerId target : chosen) {
      g.add_edge(node, target);
      endpoints.push_back(node);
      endpoints.push_back(target);
    }
  }
  return g;
}

double average_degree(const TopologyGraph& graph, std::span<const PeerId> peers) {
  if (peers.empty()) throw std::invalid_argument("empty peer set");
  std::uint64_t total = 0;
  for (PeerId p : peers) total += graph.degree(p);
  return static_cast<double>(total) / static_cast<double>(peers.size());
}

std::vector<PeerId> reachable_set(const TopologyGraph& graph, PeerId origin, int ttl) {
  if (origin >= graph.node_count()) throw std::invalid_argument("origin not in graph");
  if (ttl < 0) throw std::invalid_argument("ttl must be >= 0");
  std::vector<int> dist(graph.node_count(), -1);
  std::deque<PeerId> queue{origin};
  dist[origin] = 0;
  std::vector<PeerId> out{origin};
  while (!queue.empty()) {
    PeerId p = queue.front();
    queue.pop_front();
    if (dist[p] == ttl) continue;
    for (PeerId q : graph.neighbors(p)) {
      if (dist[q] >= 0) continue;
      dist[q] = dist[p] + 1;
      out.push_back(q);
      queue.push_back(q);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

int coverage_ttl(const TopologyGraph& graph, PeerId origin) {
  if (origin >= graph.node_count()) throw std::invalid_argument("origin not in graph");
  std::vector<int> dist(graph.node_count(), -1);
  std::deque<PeerId> queue{origin};
  dist[origin] = 0;
  std::uint32_t seen = 1;
  int ecc = 0;
  while (!queue.empty()) {
    PeerId p = queue.front();
    queue.pop_front();
    for (PeerId q : graph.neighbors(p)) {
      if (dist[q] >= 0) continue;
      dist[q] = dist[p] + 1;
      ecc = std::max(ecc, dist[q]);
      ++seen;
      queue.push_back(q);
    }
  }
  if (seen != graph.node_count()) {
    std::ostringstream msg;
    msg << "graph disconnected: " << (graph.node_count() - seen)
        << " peers unreachable from " << origin;
    throw std::runtime_error(msg.str());
  }
  return ecc;
}

std::uint64_t induced_edge_count(const TopologyGraph& graph, std::span<const PeerId> peers) {
  std::unordered_set<PeerId> inSet(peers.begin(), peers.end());
  std::uint64_t count = 0;
  for (PeerId p : peers)
    for (PeerId q : graph.neighbors(p))
      if (p < q && inSet.count(q)) ++count;
  return count;
}

}  // namespace fdtopk
