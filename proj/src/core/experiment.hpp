// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "datastore.hpp"
#include "simkernel.hpp"

namespace fdtopk {

// Flat key=value experiment description. One experiment sweeps a single
// variable over a value list, crossed with an algorithm list and a seed list.
struct ExperimentConfig {
  // one of: nPeers, bandwidthMean, latencyMean, zFactor, meanLifetime
  std::string sweepVariable = "nPeers";
  std::vector<double> sweepValues;

  std::vector<Algorithm> algorithms{Algorithm::FdBasic};
  std::vector<std::uint64_t> seeds{1};

  std::uint32_t nPeers = 1000;
  std::uint32_t attachmentEdges = 2;
  int k = 20;
  std::string ttlSpec = "coverage";  // coverage | flood | <integer>
  PeerId origin = 0;

  DataGenConfig data;
  LinkModelConfig link;
  double lambdaMaxMs = 20.0;
  double execMsPerRow = 0.005;
  double mergeMs = 5.0;

  std::optional<HeuristicConfig> heuristic;
  int warmupRuns = 3;  // unmeasured executions before a heuristic run

  double churnMeanLifetimeMs = 0.0;
  double inflationP = 0.0;  // k-inflation against inaccessible peers
};

// Parses a config stream. Returns nullopt and fills `errors` (one
// "line N: ..." entry per problem) when the config is invalid.
std::optional<ExperimentConfig> parse_experiment_config(std::istream& in,
                                                        std::vector<std::string>& errors);

// Runs the full sweep and writes results.csv (one row per cell) and
// summary.csv (per sweep value and algorithm, averaged over seeds) into
// outDir. jobs > 1 fans cells out over threads; output order is
// deterministic either way. traceDir, when set, receives one event trace
// per measured cell.
void run_experiment(const ExperimentConfig& config, const std::string& outDir,
                    int jobs, bool trace);

}  // namespace fdtopk
