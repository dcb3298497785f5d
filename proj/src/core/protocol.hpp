// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "types.hpp"

namespace fdtopk {

enum class Strategy : std::uint8_t { Basic, Strategy1, Strategy1And2 };

enum class ScoringSpec : std::uint8_t { ScoreAttributeDescending };

// One score-list entry: the owner's address and the item's score.
struct ScoreEntry {
  double score = 0.0;
  PeerId owner = kNoPeer;

  friend bool operator==(const ScoreEntry&, const ScoreEntry&) = default;
};

// Global tie-break order: higher score first, then smaller owner id.
inline bool entry_before(const ScoreEntry& a, const ScoreEntry& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.owner < b.owner;
}

// Ordered list of at most k (address, score) couples; the unit bubbled
// backward. Each serialized entry is L = 10 bytes (4 score + 6 address).
struct ScoreList {
  static constexpr std::uint64_t kEntryBytes = 10;

  std::vector<ScoreEntry> entries;

  std::uint64_t serialized_bytes() const { return kEntryBytes * entries.size(); }
  bool sorted() const;
};

// k largest entries of the multiset union, in tie-break order. Duplicate
// (owner, score) pairs stay distinct entries.
ScoreList merge_score_lists(std::span<const ScoreList> lists, int k);

// Multiplicity of each address in the final list; the originator asks each
// owner for that many of its top items.
std::map<PeerId, int> build_retrieval_plan(const ScoreList& finalList);

// ceil(k / (1 - P)); offsets an inaccessibility probability P.
// Throws std::invalid_argument unless 0 <= P < 1.
int inflate_k(int k, double p);

// Cost parameters for the wait-time deadline (all in simulated ms).
struct WaitTimeParams {
  double tQsndMs = 0;   // max time to send Q to a neighbor
  double tExecMs = 0;   // max local execution time (the user budget T)
  double tSLsndMs = 0;  // max time to send a k-entry score-list
  double tMergeMs = 0;  // max merge time
};

// Wait(ttl) = ttl*tQsnd + tExec + ttl*tSLsnd + (ttl-1)*tMerge.
// Throws std::invalid_argument for ttl < 1.
double compute_wait_time(int ttl, const WaitTimeParams& params);

// --- statistics-based neighbor selection ---

struct HeuristicConfig {
  enum class Mode : std::uint8_t { ExcludeZeroHit, MinHitFraction, PositionThreshold };
  Mode mode = Mode::PositionThreshold;
  double x = 0.10;  // minimum surviving-score fraction
  double z = 0.80;  // position factor against the merged-list length
};

// Per (neighbor, query-template) record of how the neighbor's returned
// scores fared in this peer's merged list.
struct NeighborStats {
  int executions = 0;
  int hitsInMergedList = 0;
  int bestPosition = 0;   // 1-based; 0 means no surviving score
  int mergedListLength = 0;
  int returnedCount = 0;  // entries the neighbor sent us
};

struct StatsKey {
  PeerId neighbor = kNoPeer;
  int k = 0;
  ScoringSpec spec = ScoringSpec::ScoreAttributeDescending;

  friend auto operator<=>(const StatsKey&, const StatsKey&) = default;
};

// One store per peer; persists across executions of the same query template.
class StatisticsStore {
 public:
  const NeighborStats* find(const StatsKey& key) const;

  // Record one execution's outcome for a neighbor we forwarded Q to.
  // `returned` is null when the neighbor sent nothing back.
  void record(const StatsKey& key, const ScoreList& merged, const ScoreList* returned);

 private:
  std::map<StatsKey, NeighborStats> records_;
};

// Filters forward candidates by the configured heuristic. Candidates with
// no recorded statistics always pass.
std::vector<PeerId> select_neighbors_heuristic(std::span<const PeerId> candidates,
                                               const StatisticsStore& stats, int k,
                                               ScoringSpec spec, const HeuristicConfig& cfg);

// A top-k query as carried by forward messages.
struct QueryDescriptor {
  Qid qid;
  int k = 20;
  int ttl = 0;
  PeerId originator = kNoPeer;
  ScoringSpec scoringSpec = ScoringSpec::ScoreAttributeDescending;
  Strategy strategy = Strategy::Basic;
  bool urgentRouting = false;  // FD-Dynamic extensions of late/orphan lists
  std::optional<HeuristicConfig> heuristic;
};

}  // namespace fdtopk
