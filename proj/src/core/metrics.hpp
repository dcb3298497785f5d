// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "datastore.hpp"
#include "protocol.hpp"
#include "topology.hpp"
#include "types.hpp"

namespace fdtopk {

// Counters for one simulated query.
struct MetricsReport {
  std::uint64_t seed = 0;
  std::string algorithm;
  std::uint32_t nPeers = 0;
  int k = 0;
  int ttl = 0;
  std::uint64_t mFw = 0;
  std::uint64_t mBw = 0;
  std::uint64_t mRt = 0;
  std::uint64_t bBw = 0;        // backward score-list entry bytes only
  std::uint64_t totalBytes = 0; // every delivered message, headers included
  double responseTimeMs = 0.0;
  double acQ = 0.0;
  std::uint64_t lostLists = 0;
  std::uint64_t urgentListsSent = 0;

  static std::string csv_header();
  std::string to_csv_row() const;
  static MetricsReport from_csv_row(const std::string& row);
};

// Exact top-k score multiset over the union of databases reachable within
// ttl hops of the origin. Independent of any protocol code path.
ScoreList oracle_top_k(const TopologyGraph& graph, std::span<const PeerDatabase> databases,
                       PeerId origin, int ttl, int k);

// ac_Q = |T_Q intersect T_r| / |T_r| (multiset intersection on (owner, score));
// defined as 0 for empty T_r.
double accuracy(const ScoreList& tQ, const ScoreList& tR);

// Closed-form predictors.
double predict_mfw_basic(double dG, std::uint64_t nPQ);
std::uint64_t predict_mfw_strategy1(std::uint64_t edgesInPQ);
std::uint64_t predict_bbw(int k, int entryBytes, std::uint64_t nPQ);

}  // namespace fdtopk
