// SPDX-License-Identifier: Apache-2.0
#include "protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fdtopk {

bool ScoreList::sorted() const {
  return std::is_sorted(entries.begin(), entries.end(),
                        [](const ScoreEntry& a, const ScoreEntry& b) {
                          return entry_before(a, b);
                        });
}

ScoreList merge_score_lists(std::span<const ScoreList> lists, int k) {
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  ScoreList merged;
  std::size_t total = 0;
  for (const ScoreList& list : lists) total += list.entries.size();
  merged.entries.reserve(total);
  for (const ScoreList& list : lists)
    merged.entries.insert(merged.entries.end(), list.entries.begin(), list.entries.end());
  std::stable_sort(merged.entries.begin(), merged.entries.end(), entry_before);
  if (merged.entries.size() > static_cast<std::size_t>(k))
    merged.entries.resize(static_cast<std::size_t>(k));
  return merged;
}

std::map<PeerId, int> build_retrieval_plan(const ScoreList& finalList) {
  std::map<PeerId, int> plan;
  for (const ScoreEntry& e : finalList.entries) ++plan[e.owner];
  return plan;
}

int inflate_k(int k, double p) {
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  if (p < 0.0 || p >= 1.0) throw std::invalid_argument("P must be in [0, 1)");
  return static_cast<int>(std::ceil(static_cast<double>(k) / (1.0 - p)));
}

double compute_wait_time(int ttl, const WaitTimeParams& params) {
  if (ttl < 1) throw std::invalid_argument("wait time needs ttl >= 1");
  return ttl * params.tQsndMs + params.tExecMs + ttl * params.tSLsndMs +
         (ttl - 1) * params.tMergeMs;
}

const NeighborStats* StatisticsStore::find(const StatsKey& key) const {
  auto it = records_.find(key);
  return it == records_.end() ? nullptr : &it->second;
}

void StatisticsStore::record(const StatsKey& key, const ScoreList& merged,
                             const ScoreList* returned) {
  NeighborStats& rec = records_[key];
  ++rec.executions;
  rec.mergedListLength = static_cast<int>(merged.entries.size());
  rec.hitsInMergedList = 0;
  rec.bestPosition = 0;
  rec.returnedCount = returned ? static_cast<int>(returned->entries.size()) : 0;
  if (!returned) return;
  // Entries are identified by (owner, score); the merged list is small so a
  // linear scan per entry is fine.
  for (const ScoreEntry& theirs : returned->entries) {
    for (std::size_t pos = 0; pos < merged.entries.size(); ++pos) {
      if (merged.entries[pos] == theirs) {
        ++rec.hitsInMergedList;
        int rank = static_cast<int>(pos) + 1;
        if (rec.bestPosition == 0 || rank < rec.bestPosition) rec.bestPosition = rank;
        break;
      }
    }
  }
  // A neighbor can have at most as many hits as it returned entries; repeated
  // identical couples count once per returned entry via the break above.
  rec.hitsInMergedList = std::min(rec.hitsInMergedList, rec.returnedCount);
}

std::vector<PeerId> select_neighbors_heuristic(std::span<const PeerId> candidates,
                                               const StatisticsStore& stats, int k,
                                               ScoringSpec spec,
                                               const HeuristicConfig& cfg) {
  std::vector<PeerId> kept;
  kept.reserve(candidates.size());
  for (PeerId q : candidates) {
    const NeighborStats* rec = stats.find({q, k, spec});
    if (rec == nullptr || rec->executions == 0) {
      kept.push_back(q);  // first execution must reach everyone
      continue;
    }
    bool keep = false;
    switch (cfg.mode) {
      case HeuristicConfig::Mode::ExcludeZeroHit:
        keep = rec->hitsInMergedList > 0;
        break;
      case HeuristicConfig::Mode::MinHitFraction:
        keep = rec->returnedCount > 0 &&
               static_cast<double>(rec->hitsInMergedList) >=
                   cfg.x * static_cast<double>(rec->returnedCount);
        break;
      case HeuristicConfig::Mode::PositionThreshold:
        keep = rec->bestPosition > 0 &&
               static_cast<double>(rec->bestPosition) <=
                   cfg.z * static_cast<double>(rec->mergedListLength);
        break;
    }
    if (keep) kept.push_back(q);
  }
  return kept;
}

}  // namespace fdtopk
