// SPDX-License-Identifier: Apache-2.0
#include "metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace fdtopk {

std::string MetricsReport::csv_header() {
  return "seed,algorithm,nPeers,k,ttl,mFw,mBw,mRt,bBw,totalBytes,responseTimeMs,acQ,"
         "lostLists,urgentListsSent";
}

std::string MetricsReport::to_csv_row() const {
  char buf[96];
  std::ostringstream out;
  out << seed << ',' << algorithm << ',' << nPeers << ',' << k << ',' << ttl << ',' << mFw
      << ',' << mBw << ',' << mRt << ',' << bBw << ',' << totalBytes << ',';
  std::snprintf(buf, sizeof buf, "%.3f,%.6f", responseTimeMs, acQ);
  out << buf << ',' << lostLists << ',' << urgentListsSent;
  return out.str();
}

MetricsReport MetricsReport::from_csv_row(const std::string& row) {
  std::istringstream in(row);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (fields.size() != 14) throw std::invalid_argument("expected 14 CSV fields");
  MetricsReport r;
  r.seed = std::stoull(fields[0]);
  r.algorithm = fields[1];
  r.nPeers = static_cast<std::uint32_t>(std::stoul(fields[2]));
  r.k = std::stoi(fields[3]);
  r.ttl = std::stoi(fields[4]);
  r.mFw = std::stoull(fields[5]);
  r.mBw = std::stoull(fields[6]);
  r.mRt = std::stoull(fields[7]);
  r.bBw = std::stoull(fields[8]);
  r.totalBytes = std::stoull(fields[9]);
  r.responseTimeMs = std::stod(fields[10]);
  r.acQ = std::stod(fields[11]);
  r.lostLists = std::stoull(fields[12]);
  r.urgentListsSent = std::stoull(fields[13]);
  return r;
}

ScoreList oracle_top_k(const TopologyGraph& graph, std::span<const PeerDatabase> databases,
                       PeerId origin, int ttl, int k) {
  if (databases.size() != graph.node_count())
    throw std::invalid_argument("one database per peer required");
  ScoreList out;
  // Only each peer's local top-k can reach the global top-k.
  for (PeerId p : reachable_set(graph, origin, ttl)) {
    for (const LocalTopEntry& e : local_top_k(databases[p], k))
      out.entries.push_back({e.score, p});
  }
  std::stable_sort(out.entries.begin(), out.entries.end(), entry_before);
  if (out.entries.size() > static_cast<std::size_t>(k))
    out.entries.resize(static_cast<std::size_t>(k));
  return out;
}

double accuracy(const ScoreList& tQ, const ScoreList& tR) {
  if (tR.entries.empty()) return 0.0;
  std::vector<ScoreEntry> a = tQ.entries, b = tR.entries;
  std::sort(a.begin(), a.end(), entry_before);
  std::sort(b.begin(), b.end(), entry_before);
  std::size_t common = 0, i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++common;
      ++i;
      ++j;
    } else if (entry_before(a[i], b[j])) {
      ++i;
    } else {
      ++j;
    }
  }
  return static_cast<double>(common) / static_cast<double>(tR.entries.size());
}

double predict_mfw_basic(double dG, std::uint64_t nPQ) {
  return (dG - 1.0) * static_cast<double>(nPQ) + 1.0;
}

std::uint64_t predict_mfw_strategy1(std::uint64_t edgesInPQ) { return edgesInPQ; }

std::uint64_t predict_bbw(int k, int entryBytes, std::uint64_t nPQ) {
  if (nPQ == 0) return 0;
  return static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(entryBytes) * (nPQ - 1);
}

}  // namespace fdtopk
