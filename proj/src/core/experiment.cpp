// SPDX-License-Identifier: Apache-2.0
#include "experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "metrics.hpp"
#include "topology.hpp"

namespace fdtopk {

namespace {

const char* kSweepVariables[] = {"nPeers", "bandwidthMean", "latencyMean", "zFactor",
                                 "meanLifetime"};

bool valid_sweep_variable(const std::string& v) {
  for (const char* s : kSweepVariables)
    if (v == s) return true;
  return false;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t a = item.find_first_not_of(" \t");
    std::size_t b = item.find_last_not_of(" \t");
    if (a == std::string::npos) continue;
    out.push_back(item.substr(a, b - a + 1));
  }
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

struct Cell {
  std::size_t index = 0;
  double sweepValue = 0;
  Algorithm algorithm = Algorithm::FdBasic;
  std::uint64_t seed = 0;
};

MetricsReport run_cell(const ExperimentConfig& cfg, const Cell& cell,
                       const std::string& tracePath) {
  std::uint32_t nPeers = cfg.nPeers;
  LinkModelConfig link = cfg.link;
  std::optional<HeuristicConfig> heuristic = cfg.heuristic;
  double meanLifetime = cfg.churnMeanLifetimeMs;
  if (cfg.sweepVariable == "nPeers")
    nPeers = static_cast<std::uint32_t>(cell.sweepValue);
  else if (cfg.sweepVariable == "bandwidthMean")
    link.bandwidthMeanKbps = cell.sweepValue;
  else if (cfg.sweepVariable == "latencyMean")
    link.latencyMeanMs = cell.sweepValue;
  else if (cfg.sweepVariable == "zFactor") {
    if (!heuristic) heuristic.emplace();
    heuristic->mode = HeuristicConfig::Mode::PositionThreshold;
    heuristic->z = cell.sweepValue;
  } else if (cfg.sweepVariable == "meanLifetime") {
    meanLifetime = cell.sweepValue;
  }

  TopologyGraph graph =
      generate_topology({nPeers, std::min(cfg.attachmentEdges, nPeers - 1), cell.seed});
  DataGenConfig dataCfg = cfg.data;
  dataCfg.seed = cell.seed;
  std::vector<PeerDatabase> databases;
  databases.reserve(nPeers);
  for (PeerId p = 0; p < nPeers; ++p) databases.push_back(generate_database(p, dataCfg));

  SimConfig sim;
  sim.algorithm = cell.algorithm;
  sim.k = cfg.inflationP > 0 ? inflate_k(cfg.k, cfg.inflationP) : cfg.k;
  sim.origin = cfg.origin % nPeers;
  if (cfg.ttlSpec == "coverage")
    sim.ttl = coverage_ttl(graph, sim.origin);
  else if (cfg.ttlSpec == "flood")
    sim.ttl = static_cast<int>(nPeers);
  else
    sim.ttl = std::stoi(cfg.ttlSpec);
  sim.heuristic = heuristic;
  sim.link = link;
  sim.churn.meanLifetimeMs = meanLifetime;
  sim.lambdaMaxMs = cfg.lambdaMaxMs;
  sim.execMsPerRow = cfg.execMsPerRow;
  sim.mergeMs = cfg.mergeMs;
  sim.seed = cell.seed;

  Session session(graph, databases, sim);
  if (heuristic)
    for (int w = 0; w < cfg.warmupRuns; ++w) session.run_query();

  std::ofstream traceOut;
  if (!tracePath.empty()) {
    traceOut.open(tracePath);
    session.set_trace(&traceOut);
  }
  SimResult result = session.run_query();

  MetricsReport report = result.metrics;
  if (sim.k != cfg.k) {
    // Inflated runs are judged on the user's k best entries.
    ScoreList kept = result.finalList;
    if (kept.entries.size() > static_cast<std::size_t>(cfg.k))
      kept.entries.resize(static_cast<std::size_t>(cfg.k));
    report.k = cfg.k;
    report.acQ =
        accuracy(kept, oracle_top_k(graph, databases, sim.origin, sim.ttl, cfg.k));
  }
  return report;
}

std::string format_value(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::optional<ExperimentConfig> parse_experiment_config(std::istream& in,
                                                        std::vector<std::string>& errors) {
  ExperimentConfig cfg;
  bool haveHeuristic = false;
  HeuristicConfig heuristic;
  std::string line;
  int lineNo = 0;

  auto fail = [&](const std::string& msg) {
    errors.push_back("line " + std::to_string(lineNo) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineNo;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      fail("expected key=value");
      continue;
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));

    try {
      if (key == "sweep.variable") {
        cfg.sweepVariable = value;
        if (!valid_sweep_variable(value))
          fail("unknown sweep variable '" + value +
               "' (expected nPeers, bandwidthMean, latencyMean, zFactor or meanLifetime)");
      } else if (key == "sweep.values") {
        cfg.sweepValues.clear();
        for (const std::string& v : split_list(value)) cfg.sweepValues.push_back(std::stod(v));
      } else if (key == "algo.list") {
        cfg.algorithms.clear();
        for (const std::string& v : split_list(value)) {
          auto algo = parse_algorithm(v);
          if (!algo)
            fail("unknown algorithm '" + v + "'");
          else
            cfg.algorithms.push_back(*algo);
        }
      } else if (key == "seed.list") {
        cfg.seeds.clear();
        for (const std::string& v : split_list(value)) cfg.seeds.push_back(std::stoull(v));
      } else if (key == "nPeers") {
        cfg.nPeers = static_cast<std::uint32_t>(std::stoul(value));
      } else if (key == "topology.attachmentEdges") {
        cfg.attachmentEdges = static_cast<std::uint32_t>(std::stoul(value));
      } else if (key == "k") {
        cfg.k = std::stoi(value);
      } else if (key == "ttl") {
        cfg.ttlSpec = value;
        if (value != "coverage" && value != "flood") (void)std::stoi(value);
      } else if (key == "origin") {
        cfg.origin = static_cast<PeerId>(std::stoul(value));
      } else if (key == "data.tupleCountMin") {
        cfg.data.tupleCountMin = static_cast<std::uint32_t>(std::stoul(value));
      } else if (key == "data.tupleCountMax") {
        cfg.data.tupleCountMax = static_cast<std::uint32_t>(std::stoul(value));
      } else if (key == "data.payloadMeanBytes") {
        cfg.data.payloadMeanBytes = std::stod(value);
      } else if (key == "data.payloadVarianceBytes") {
        cfg.data.payloadVarianceBytes = std::stod(value);
      } else if (key == "link.latencyMeanMs") {
        cfg.link.latencyMeanMs = std::stod(value);
      } else if (key == "link.latencyVariance") {
        cfg.link.latencyVariance = std::stod(value);
      } else if (key == "link.bandwidthMeanKbps") {
        cfg.link.bandwidthMeanKbps = std::stod(value);
      } else if (key == "link.bandwidthVariance") {
        cfg.link.bandwidthVariance = std::stod(value);
      } else if (key == "lambdaMaxMs") {
        cfg.lambdaMaxMs = std::stod(value);
      } else if (key == "execMsPerRow") {
        cfg.execMsPerRow = std::stod(value);
      } else if (key == "mergeMs") {
        cfg.mergeMs = std::stod(value);
      } else if (key == "heuristic.mode") {
        if (value == "none") {
          haveHeuristic = false;
        } else {
          haveHeuristic = true;
          if (value == "excludeZeroHit")
            heuristic.mode = HeuristicConfig::Mode::ExcludeZeroHit;
          else if (value == "minHitFraction")
            heuristic.mode = HeuristicConfig::Mode::MinHitFraction;
          else if (value == "positionThreshold")
            heuristic.mode = HeuristicConfig::Mode::PositionThreshold;
          else
            fail("unknown heuristic mode '" + value + "'");
        }
      } else if (key == "heuristic.x") {
        heuristic.x = std::stod(value);
      } else if (key == "heuristic.z") {
        heuristic.z = std::stod(value);
      } else if (key == "warmup.runs") {
        cfg.warmupRuns = std::stoi(value);
      } else if (key == "churn.meanLifetimeMs") {
        cfg.churnMeanLifetimeMs = std::stod(value);
      } else if (key == "inflation.p") {
        cfg.inflationP = std::stod(value);
      } else {
        fail("unknown key '" + key + "'");
      }
    } catch (const std::exception&) {
      fail("cannot parse value '" + value + "' for key '" + key + "'");
    }
  }

  lineNo = 0;  // file-level checks
  auto failFile = [&](const std::string& msg) { errors.push_back("config: " + msg); };
  if (cfg.sweepValues.empty()) failFile("sweep.values must list at least one value");
  if (cfg.algorithms.empty()) failFile("algo.list must name at least one algorithm");
  if (cfg.seeds.empty()) failFile("seed.list must list at least one seed");
  if (cfg.k < 1) failFile("k must be >= 1");
  if (cfg.nPeers < 2) failFile("nPeers must be >= 2 for the overlay generator");
  if (cfg.warmupRuns < 0) failFile("warmup.runs must be >= 0");
  if (cfg.inflationP < 0 || cfg.inflationP >= 1)
    failFile("inflation.p must lie in [0, 1): k/(1-P) is undefined at P = 1");
  if (cfg.data.tupleCountMin > cfg.data.tupleCountMax)
    failFile("data.tupleCountMin must not exceed data.tupleCountMax");
  if (cfg.sweepVariable == "nPeers")
    for (double v : cfg.sweepValues)
      if (v < 2 || v != std::floor(v)) failFile("nPeers sweep values must be integers >= 2");
  if (cfg.sweepVariable == "zFactor")
    for (double v : cfg.sweepValues)
      if (v <= 0 || v > 1) failFile("zFactor sweep values must lie in (0, 1]");
  if (haveHeuristic) cfg.heuristic = heuristic;

  if (!errors.empty()) return std::nullopt;
  return cfg;
}

void run_experiment(const ExperimentConfig& config, const std::string& outDir, int jobs,
                    bool trace) {
  namespace fs = std::filesystem;
  fs::create_directories(outDir);

  std::vector<Cell> cells;
  for (double value : config.sweepValues)
    for (Algorithm algo : config.algorithms)
      for (std::uint64_t seed : config.seeds) {
        Cell c;
        c.index = cells.size();
        c.sweepValue = value;
        c.algorithm = algo;
        c.seed = seed;
        cells.push_back(c);
      }

  std::vector<MetricsReport> reports(cells.size());
  std::exception_ptr firstError;
  std::mutex errorMutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      {
        std::lock_guard<std::mutex> lock(errorMutex);
        if (firstError) return;
      }
      try {
        std::string tracePath;
        if (trace)
          tracePath = (fs::path(outDir) /
                       ("trace_" + algorithm_name(cells[i].algorithm) + "_" +
                        format_value(cells[i].sweepValue) + "_" +
                        std::to_string(cells[i].seed) + ".txt"))
                          .string();
        reports[i] = run_cell(config, cells[i], tracePath);
      } catch (...) {
        std::lock_guard<std::mutex> lock(errorMutex);
        if (!firstError) firstError = std::current_exception();
        return;
      }
    }
  };

  if (jobs <= 1 || cells.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(jobs), cells.size());
    for (std::size_t i = 0; i < count; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (firstError) std::rethrow_exception(firstError);

  const fs::path resultsTmp = fs::path(outDir) / "results.csv.tmp";
  const fs::path summaryTmp = fs::path(outDir) / "summary.csv.tmp";
  try {
    {
      std::ofstream out(resultsTmp);
      if (!out) throw std::runtime_error("cannot write " + resultsTmp.string());
      out << "sweepVariable,sweepValue," << MetricsReport::csv_header() << '\n';
      for (std::size_t i = 0; i < cells.size(); ++i)
        out << config.sweepVariable << ',' << format_value(cells[i].sweepValue) << ','
            << reports[i].to_csv_row() << '\n';
    }
    {
      // Seed-averaged view; totalBytes covers every delivered message,
      // headers included, while bBw counts backward score-list entries only.
      std::ofstream out(summaryTmp);
      if (!out) throw std::runtime_error("cannot write " + summaryTmp.string());
      out << "sweepVariable,sweepValue,algorithm,runs,meanMFw,meanMBw,meanMRt,meanBBw,"
             "meanTotalBytes,meanResponseTimeMs,meanAcQ,meanLostLists\n";
      std::map<std::pair<double, std::string>, std::vector<const MetricsReport*>> groups;
      for (std::size_t i = 0; i < cells.size(); ++i)
        groups[{cells[i].sweepValue, algorithm_name(cells[i].algorithm)}].push_back(
            &reports[i]);
      for (const auto& [key, rows] : groups) {
        double mFw = 0, mBw = 0, mRt = 0, bBw = 0, bytes = 0, rt = 0, acQ = 0, lost = 0;
        for (const MetricsReport* r : rows) {
          mFw += static_cast<double>(r->mFw);
          mBw += static_cast<double>(r->mBw);
          mRt += static_cast<double>(r->mRt);
          bBw += static_cast<double>(r->bBw);
          bytes += static_cast<double>(r->totalBytes);
          rt += r->responseTimeMs;
          acQ += r->acQ;
          lost += static_cast<double>(r->lostLists);
        }
        const double n = static_cast<double>(rows.size());
        char buf[256];
        std::snprintf(buf, sizeof buf, "%.3f,%.3f,%.3f,%.3f,%.3f,%.3f,%.6f,%.3f",
                      mFw / n, mBw / n, mRt / n, bBw / n, bytes / n, rt / n, acQ / n,
                      lost / n);
        out << config.sweepVariable << ',' << format_value(key.first) << ',' << key.second
            << ',' << rows.size() << ',' << buf << '\n';
      }
    }
    fs::rename(resultsTmp, fs::path(outDir) / "results.csv");
    fs::rename(summaryTmp, fs::path(outDir) / "summary.csv");
  } catch (...) {
    std::error_code ec;
    fs::remove(resultsTmp, ec);
    fs::remove(summaryTmp, ec);
    throw;
  }
}

}  // namespace fdtopk
