// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "core/datastore.hpp"

using namespace fdtopk;

TEST_CASE("generation is deterministic per (seed, peer) and varies across peers") {
  DataGenConfig cfg;
  cfg.seed = 11;
  PeerDatabase a = generate_database(3, cfg);
  PeerDatabase b = generate_database(3, cfg);
  CHECK(a.row_count() == b.row_count());
  for (std::uint32_t r = 0; r < a.row_count(); ++r) {
    CHECK(a.score(r) == b.score(r));
    CHECK(a.payload_bytes(r) == b.payload_bytes(r));
  }
  PeerDatabase c = generate_database(4, cfg);
  CHECK((c.row_count() != a.row_count() || c.scores() != a.scores()));
}

TEST_CASE("row counts stay inside the configured bounds") {
  DataGenConfig cfg;
  cfg.seed = 5;
  for (PeerId p = 0; p < 200; ++p) {
    PeerDatabase db = generate_database(p, cfg);
    CHECK(db.row_count() >= 1001);
    CHECK(db.row_count() <= 19999);
  }
}

TEST_CASE("scores are uniform on [0,1) and payload mean tracks the configured mean") {
  DataGenConfig cfg;
  cfg.seed = 17;
  cfg.tupleCountMin = 100000;
  cfg.tupleCountMax = 100000;
  PeerDatabase db = generate_database(0, cfg);
  double scoreSum = 0, paySum = 0;
  for (std::uint32_t r = 0; r < db.row_count(); ++r) {
    CHECK(db.score(r) >= 0.0);
    CHECK(db.score(r) < 1.0);
    CHECK(db.payload_bytes(r) >= 1);
    scoreSum += db.score(r);
    paySum += db.payload_bytes(r);
  }
  const double n = static_cast<double>(db.row_count());
  CHECK(scoreSum / n == doctest::Approx(0.5).epsilon(0.02));
  CHECK(paySum / n == doctest::Approx(1024.0).epsilon(0.05));
}

TEST_CASE("local_top_k against a full sort oracle") {
  DataGenConfig cfg;
  cfg.seed = 23;
  PeerDatabase db = generate_database(9, cfg);
  auto top = local_top_k(db, 20);
  REQUIRE(top.size() == 20);

  std::vector<std::pair<double, std::uint32_t>> oracle;
  for (std::uint32_t r = 0; r < db.row_count(); ++r) oracle.emplace_back(db.score(r), r);
  std::sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(top[i].score == oracle[i].first);
    CHECK(top[i].row == oracle[i].second);
  }
}

TEST_CASE("local_top_k truncates to the row count") {
  DataGenConfig cfg;
  cfg.seed = 2;
  cfg.tupleCountMin = 5;
  cfg.tupleCountMax = 5;
  PeerDatabase db = generate_database(0, cfg);
  CHECK(local_top_k(db, 20).size() == 5);
  CHECK(local_top_k(db, 3).size() == 3);
}
