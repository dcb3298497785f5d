// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance gate. Each numbered check prints one PASS/FAIL line;
// the process exits nonzero if any check fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "core/experiment.hpp"
#include "core/metrics.hpp"
#include "core/simkernel.hpp"

using namespace fdtopk;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::string detail;
};

Check g_checks[12];

struct MRtTracker {
  bool ok = true;
  std::uint64_t worst = 0;
  int worstK = 0;
  void observe(const MetricsReport& m, int k) {
    if (m.mRt > 2 * static_cast<std::uint64_t>(k)) ok = false;
    if (m.mRt > worst) {
      worst = m.mRt;
      worstK = k;
    }
  }
};

MRtTracker g_mrt;

std::vector<PeerDatabase> make_databases(std::uint32_t n, std::uint64_t seed,
                                         std::uint32_t rowsMin, std::uint32_t rowsMax) {
  DataGenConfig cfg;
  cfg.seed = seed;
  cfg.tupleCountMin = rowsMin;
  cfg.tupleCountMax = rowsMax;
  std::vector<PeerDatabase> dbs;
  dbs.reserve(n);
  for (PeerId p = 0; p < n; ++p) dbs.push_back(generate_database(p, cfg));
  return dbs;
}

SimResult run(const TopologyGraph& g, const std::vector<PeerDatabase>& dbs,
              Algorithm algo, int k, int ttl, std::uint64_t seed,
              double meanLifetimeMs = 0.0) {
  SimConfig cfg;
  cfg.algorithm = algo;
  cfg.k = k;
  cfg.ttl = ttl;
  cfg.seed = seed;
  cfg.churn.meanLifetimeMs = meanLifetimeMs;
  SimResult r = run_simulation(g, dbs, cfg);
  g_mrt.observe(r.metrics, k);
  return r;
}

// ---- criteria 1-4: exactness and the closed-form counters -----------------

void criteria_1_to_4() {
  const Algorithm algos[] = {Algorithm::FdBasic, Algorithm::FdStrategy1,
                             Algorithm::FdStrategy1And2, Algorithm::Cn,
                             Algorithm::CnStar};
  bool exactAll = true, mfwFormula = true, strategyCounts = true, bytes = true;
  std::string firstBad;
  std::mt19937_64 sizes(20260826ull);
  const auto started = std::chrono::steady_clock::now();

  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const std::uint32_t n = 100 + static_cast<std::uint32_t>(sizes() % 1901);
    TopologyGraph graph = generate_topology({n, 2, seed});
    auto dbs = make_databases(n, seed, 1001, 2000);
    const int ttl = coverage_ttl(graph, 0);
    std::vector<PeerId> all;
    for (PeerId p = 0; p < n; ++p) all.push_back(p);
    const double dG = average_degree(graph, all);

    for (int k : {1, 5, 20}) {
      ScoreList oracle = oracle_top_k(graph, dbs, 0, ttl, k);
      for (Algorithm algo : algos) {
        SimResult r = run(graph, dbs, algo, k, ttl, seed);
        if (r.finalList.entries != oracle.entries) {
          exactAll = false;
          if (firstBad.empty())
            firstBad = algorithm_name(algo) + " seed " + std::to_string(seed) +
                       " n " + std::to_string(n) + " k " + std::to_string(k);
        }
        if (algo == Algorithm::FdBasic) {
          // sum form: d(origin) + sum over the rest of (d(p)-1)
          std::uint64_t predicted = 2 * graph.edge_count() - (n - 1);
          if (r.metrics.mFw != predicted) mfwFormula = false;
          if (std::abs(static_cast<double>(r.metrics.mFw) -
                       predict_mfw_basic(dG, n)) > 1e-6)
            mfwFormula = false;
          if (r.metrics.bBw !=
              static_cast<std::uint64_t>(k) * ScoreList::kEntryBytes * (n - 1))
            bytes = false;
        }
        if (algo == Algorithm::FdStrategy1 &&
            r.metrics.mFw != predict_mfw_strategy1(graph.edge_count()))
          strategyCounts = false;
        if (algo == Algorithm::FdStrategy1And2 && r.metrics.mFw > graph.edge_count())
          strategyCounts = false;
      }
    }
  }

  // The strategy-1 lower bound is met with equality on trees (attachment 1).
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const std::uint32_t n = 200 + static_cast<std::uint32_t>(seed) * 50;
    TopologyGraph tree = generate_topology({n, 1, seed});
    auto dbs = make_databases(n, seed, 1001, 1500);
    const int ttl = coverage_ttl(tree, 0);
    SimResult s1 = run(tree, dbs, Algorithm::FdStrategy1, 20, ttl, seed);
    SimResult s12 = run(tree, dbs, Algorithm::FdStrategy1And2, 20, ttl, seed);
    if (s1.metrics.mFw != n - 1 || s12.metrics.mFw != n - 1) strategyCounts = false;
  }

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  if (elapsed > 300.0) exactAll = false;
  char timing[48];
  std::snprintf(timing, sizeof timing, " (%.0f s, budget 300)", elapsed);
  g_checks[1] = {exactAll,
                 "oracle equivalence over 50 seeds, 100-2000 peers, k in "
                 "{1,5,20}, ttl = coverage" +
                     std::string(timing) +
                     (exactAll ? std::string()
                               : " (first mismatch: " + firstBad + ")")};
  g_checks[2] = {mfwFormula, "FD-Basic mFw equals (d(G)-1)|P_Q|+1 on every run"};
  g_checks[3] = {strategyCounts,
                 "FD-Str1 mFw = |E(P_Q)|, FD-Str1+2 mFw <= |E(P_Q)|, trees meet "
                 "|P_Q|-1"};
  g_checks[4] = {bytes, ""};  // completed by criterion_7's 10,000-peer run
}

// ---- criterion 6: k-inflation Monte Carlo ----------------------------------

void criterion_6() {
  bool ok = true;
  std::ostringstream detail;
  std::mt19937_64 rng(97531ull);
  for (double p : {0.1, 0.3, 0.5}) {
    const int kPrime = inflate_k(20, p);
    std::uint64_t accessible = 0;
    const int trials = 5000;
    std::bernoulli_distribution up(1.0 - p);
    for (int t = 0; t < trials; ++t)
      for (int i = 0; i < kPrime; ++i)
        if (up(rng)) ++accessible;
    const double mean = static_cast<double>(accessible) / trials;
    if (std::abs(mean - 20.0) > 0.05 * 20.0) ok = false;
    detail << " P=" << p << ":" << mean;
  }
  g_checks[6] = {ok, "Bernoulli thinning of inflate_k(20,P) keeps ~20 "
                     "accessible entries:" +
                         detail.str()};
}

// ---- criterion 7: combined-strategy byte trend (also finishes criterion 4) ----------

void criterion_7() {
  bool ok = true;
  std::ostringstream detail;
  std::uint64_t bBw10k = 0;
  for (std::uint32_t n : {2000u, 6000u, 10000u}) {
    double reductionSum = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      TopologyGraph graph = generate_topology({n, 2, seed});
      auto dbs = make_databases(n, seed, 1001, 3000);
      const int ttl = coverage_ttl(graph, 0);
      SimResult basic = run(graph, dbs, Algorithm::FdBasic, 20, ttl, seed);
      SimResult s12 = run(graph, dbs, Algorithm::FdStrategy1And2, 20, ttl, seed);
      reductionSum += 1.0 - static_cast<double>(s12.metrics.totalBytes) /
                                static_cast<double>(basic.metrics.totalBytes);
      if (n == 10000 && seed == 1) bBw10k = basic.metrics.bBw;
    }
    const double reduction = reductionSum / 3.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, " n=%u:%.1f%%", n, 100.0 * reduction);
    detail << buf;
    if (reduction < 0.20 || reduction > 0.40) ok = false;
  }
  g_checks[7] = {ok, "FD-Str1+2 totalBytes 20-40% below FD-Basic (measured:" +
                         detail.str() + ")"};

  if (bBw10k != 1999800) g_checks[4].ok = false;
  g_checks[4].detail =
      "bBw = k * 10 * (|P_Q|-1) on static full-coverage runs; 1,999,800 bytes "
      "at 10,000 peers (measured " +
      std::to_string(bBw10k) + ")";
}

// ---- criterion 8: statistics-heuristic trend ---------------------------------

void criterion_8() {
  double acSum = 0, reductionSum = 0;
  const int seeds = 3;
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    const std::uint32_t n = 2000;
    TopologyGraph graph = generate_topology({n, 2, seed});
    auto dbs = make_databases(n, seed, 1001, 3000);
    const int ttl = coverage_ttl(graph, 0);

    SimConfig plain;
    plain.algorithm = Algorithm::FdStrategy1And2;
    plain.k = 20;
    plain.ttl = ttl;
    plain.seed = seed;
    SimResult base = run_simulation(graph, dbs, plain);
    g_mrt.observe(base.metrics, 20);

    SimConfig pruned = plain;
    HeuristicConfig h;
    h.mode = HeuristicConfig::Mode::PositionThreshold;
    h.z = 0.80;
    pruned.heuristic = h;
    Session session(graph, dbs, pruned);
    for (int w = 0; w < 3; ++w) session.run_query();
    SimResult measured = session.run_query();
    g_mrt.observe(measured.metrics, 20);

    acSum += measured.metrics.acQ;
    reductionSum += 1.0 - static_cast<double>(measured.metrics.totalBytes) /
                              static_cast<double>(base.metrics.totalBytes);
  }
  const double ac = acSum / seeds;
  const double reduction = reductionSum / seeds;
  char buf[112];
  std::snprintf(buf, sizeof buf,
                "z=0.80 after 3 warm-ups: mean acQ %.3f (need >=0.85), bytes "
                "saved %.1f%% (need >=25%%)",
                ac, 100.0 * reduction);
  g_checks[8] = {ac >= 0.85 && reduction >= 0.25, buf};
}

// ---- criterion 9: churn accuracy trend -------------------------------------

void criterion_9() {
  bool dominance = true;
  bool band = true;
  std::ostringstream detail;
  const double minuteMs = 60000.0;
  for (double minutes : {1.0, 2.0, 4.0, 8.0, 16.0, 60.0}) {
    double dynSum = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const std::uint32_t n = 500;
      TopologyGraph graph = generate_topology({n, 2, seed});
      auto dbs = make_databases(n, seed, 1001, 2000);
      const int ttl = coverage_ttl(graph, 0);
      SimResult basic =
          run(graph, dbs, Algorithm::FdBasic, 20, ttl, seed, minutes * minuteMs);
      SimResult dyn =
          run(graph, dbs, Algorithm::FdDynamic, 20, ttl, seed, minutes * minuteMs);
      if (dyn.metrics.acQ + 1e-12 < basic.metrics.acQ) dominance = false;
      dynSum += dyn.metrics.acQ;
    }
    const double dynMean = dynSum / 10.0;
    char buf[48];
    std::snprintf(buf, sizeof buf, " %gmin:%.3f", minutes, dynMean);
    detail << buf;
    if (minutes >= 4.0 && dynMean < 0.95) band = false;
  }
  g_checks[9] = {dominance && band,
                 "churn sweep: acQ(dynamic) >= acQ(basic) per seed, >=0.95 "
                 "beyond 4 min (dynamic means:" +
                     detail.str() + ")"};
}

// ---- criterion 10: response-time trends ------------------------------------

void criterion_10() {
  bool ordering = true;
  bool monotone = true;
  for (std::uint32_t n : {1000u, 2000u}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      TopologyGraph graph = generate_topology({n, 2, seed});
      auto dbs = make_databases(n, seed, 1001, 19999);
      const int ttl = coverage_ttl(graph, 0);
      SimResult fd = run(graph, dbs, Algorithm::FdBasic, 20, ttl, seed);
      SimResult cn = run(graph, dbs, Algorithm::Cn, 20, ttl, seed);
      SimResult cnStar = run(graph, dbs, Algorithm::CnStar, 20, ttl, seed);
      if (!(fd.metrics.responseTimeMs < cn.metrics.responseTimeMs &&
            fd.metrics.responseTimeMs < cnStar.metrics.responseTimeMs))
        ordering = false;
    }
  }

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const std::uint32_t n = 1000;
    TopologyGraph graph = generate_topology({n, 2, seed});
    auto dbs = make_databases(n, seed, 1001, 19999);
    const int ttl = coverage_ttl(graph, 0);
    for (Algorithm algo : {Algorithm::FdBasic, Algorithm::Cn, Algorithm::CnStar}) {
      double previous = -1;
      for (double bw : {28.0, 56.0, 112.0}) {
        SimConfig cfg;
        cfg.algorithm = algo;
        cfg.k = 20;
        cfg.ttl = ttl;
        cfg.seed = seed;
        cfg.link.bandwidthMeanKbps = bw;
        SimResult r = run_simulation(graph, dbs, cfg);
        g_mrt.observe(r.metrics, 20);
        if (previous >= 0 && r.metrics.responseTimeMs > previous + 1e-9)
          monotone = false;
        previous = r.metrics.responseTimeMs;
      }
    }
  }
  g_checks[10] = {ordering && monotone,
                  "responseTime(FD) < CN and CN* at >=1000 peers; higher "
                  "bandwidth never slows any of them"};
}

// ---- criterion 11: determinism ---------------------------------------------

void criterion_11() {
  const std::string config =
      "sweep.variable = nPeers\n"
      "sweep.values = 200, 400\n"
      "algo.list = fd-basic, fd-strategy12, cn-star\n"
      "seed.list = 11, 12\n"
      "k = 20\n"
      "ttl = coverage\n"
      "data.tupleCountMin = 1001\n"
      "data.tupleCountMax = 2000\n";
  std::istringstream in1(config);
  std::vector<std::string> errors;
  auto cfg = parse_experiment_config(in1, errors);
  bool ok = cfg.has_value();
  std::string results1, results2;
  if (ok) {
    fs::path base = fs::temp_directory_path() / "fdtopk_acceptance";
    std::error_code ec;
    fs::remove_all(base, ec);
    run_experiment(*cfg, (base / "a").string(), 2, false);
    run_experiment(*cfg, (base / "b").string(), 1, false);
    for (const char* sub : {"a", "b"}) {
      std::ifstream f(base / sub / "results.csv");
      std::ostringstream buf;
      buf << f.rdbuf();
      (sub[0] == 'a' ? results1 : results2) = buf.str();
    }
    fs::remove_all(base, ec);
    ok = !results1.empty() && results1 == results2;
  }
  g_checks[11] = {ok, "repeated sweeps yield byte-identical CSV rows"};
}

}  // namespace

int main() {
  criteria_1_to_4();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  g_checks[5] = {g_mrt.ok, "mRt <= 2k on every run in the suite (max seen " +
                               std::to_string(g_mrt.worst) + " with k " +
                               std::to_string(g_mrt.worstK) + ")"};
  criterion_11();

  int failures = 0;
  for (int i = 1; i <= 11; ++i) {
    std::printf("%s criterion %2d: %s\n", g_checks[i].ok ? "PASS" : "FAIL", i,
                g_checks[i].detail.c_str());
    if (!g_checks[i].ok) ++failures;
  }
  if (failures == 0) {
    std::printf("acceptance: all checks passed\n");
    return 0;
  }
  std::printf("acceptance: %d check(s) failed\n", failures);
  return 1;
}
