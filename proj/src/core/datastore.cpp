// SPDX-License-Identifier: Apache-2.0
#include "datastore.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fdtopk {

PeerDatabase generate_database(PeerId peerId, const DataGenConfig& config) {
  if (config.tupleCountMin < 1 || config.tupleCountMin > config.tupleCountMax)
    throw std::invalid_argument("tuple count bounds invalid");
  if (config.payloadMeanBytes <= 0 || config.payloadVarianceBytes < 0)
    throw std::invalid_argument("payload model invalid");

  std::mt19937_64 rng(mix_seed(config.seed, peerId, 0x64617461ull));
  std::uniform_int_distribution<std::uint32_t> countDist(config.tupleCountMin,
                                                         config.tupleCountMax);
  std::uniform_real_distribution<double> scoreDist(0.0, 1.0);
  std::normal_distribution<double> payloadDist(config.payloadMeanBytes,
                                               std::sqrt(config.payloadVarianceBytes));

  const std::uint32_t rows = countDist(rng);
  PeerDatabase db;
  db.scores_.reserve(rows);
  db.payloadBytes_.reserve(rows);
  for (std::uint32_t i = 0; i < rows; ++i) {
    db.scores_.push_back(scoreDist(rng));
    double payload = payloadDist(rng);
    db.payloadBytes_.push_back(payload < 1.0 ? 1u
                                             : static_cast<std::uint32_t>(std::lround(payload)));
  }
  return db;
}

std::vector<LocalTopEntry> local_top_k(const PeerDatabase& db, int k) {
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), db.row_count());
  std::vector<LocalTopEntry> all;
  all.reserve(db.row_count());
  for (std::uint32_t i = 0; i < db.row_count(); ++i)
    all.push_back({i, db.score(i)});
  auto better = [](const LocalTopEntry& a, const LocalTopEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.row < b.row;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(),
                    better);
  all.resize(take);
  return all;
}

}  // namespace fdtopk
