// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "types.hpp"

namespace fdtopk {

// Synthetic R(score, data) workload. Scores are uniform in [0,1]; payload
// sizes are normal, truncated below at 1 byte. The variance default reads
// Table-1's "variance 64" as 64 KB-scaled byte^2 units (stddev 256 bytes) so
// the configured mean survives truncation; it is a knob, not a fact.
struct DataGenConfig {
  std::uint32_t tupleCountMin = 1001;
  std::uint32_t tupleCountMax = 19999;
  double payloadMeanBytes = 1024.0;
  double payloadVarianceBytes = 65536.0;
  std::uint64_t seed = 0;
};

class PeerDatabase {
 public:
  std::size_t row_count() const { return scores_.size(); }
  double score(std::uint32_t row) const { return scores_[row]; }
  std::uint32_t payload_bytes(std::uint32_t row) const { return payloadBytes_[row]; }
  const std::vector<double>& scores() const { return scores_; }

  friend PeerDatabase generate_database(PeerId peerId, const DataGenConfig& config);

 private:
  std::vector<double> scores_;
  std::vector<std::uint32_t> payloadBytes_;
};

// Deterministic per (seed, peerId).
PeerDatabase generate_database(PeerId peerId, const DataGenConfig& config);

struct LocalTopEntry {
  std::uint32_t row = 0;
  double score = 0.0;
};

// Top min(k, rows) rows, score descending, ties by lower row index.
std::vector<LocalTopEntry> local_top_k(const PeerDatabase& db, int k);

}  // namespace fdtopk
