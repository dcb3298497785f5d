// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "datastore.hpp"
#include "metrics.hpp"
#include "peer.hpp"
#include "protocol.hpp"
#include "topology.hpp"
#include "types.hpp"

namespace fdtopk {

enum class Algorithm : std::uint8_t {
  FdBasic,
  FdStrategy1,
  FdStrategy1And2,
  FdDynamic,  // FD-Basic plus urgent score-lists and parent-loss rerouting
  Cn,
  CnStar,
};

std::string algorithm_name(Algorithm a);
std::optional<Algorithm> parse_algorithm(const std::string& name);

// Stable per-edge link characteristics, drawn once at setup.
struct LinkModelConfig {
  double latencyMeanMs = 200.0;
  double latencyVariance = 100.0;
  double bandwidthMeanKbps = 56.0;
  double bandwidthVariance = 32.0;
};

struct Link {
  double latencyMs = 0;
  double bandwidthKbps = 0;
};

// latency + serialization; bandwidth in kbps equals bits per ms.
double transfer_time_ms(std::uint64_t msgBytes, const Link& link);

// Departure-only churn within one query. meanLifetimeMs == 0 disables it.
struct ChurnConfig {
  double meanLifetimeMs = 0.0;
  bool fixedLifetime = false;  // every peer departs at exactly the mean
};

struct SimConfig {
  Algorithm algorithm = Algorithm::FdBasic;
  int k = 20;
  int ttl = 0;
  std::optional<HeuristicConfig> heuristic;
  LinkModelConfig link;
  ChurnConfig churn;
  double lambdaMaxMs = 20.0;
  double execMsPerRow = 0.005;  // 20,000-row peer ~ 100 ms
  double mergeMs = 5.0;
  std::uint64_t seed = 0;
  PeerId origin = 0;
};

struct SimResult {
  ScoreList finalList;  // what the user gets (T_r)
  MetricsReport metrics;
};

// One network instance: topology, databases, link draws and per-peer
// statistics stores. Repeated run_query calls model repeated executions of
// the same query template (statistics persist between them).
class Session : private PeerHost {
 public:
  Session(const TopologyGraph& graph, const std::vector<PeerDatabase>& databases,
          SimConfig config);
  ~Session() override;

  SimResult run_query();

  void set_trace(std::ostream* sink) { trace_ = sink; }
  const WaitTimeParams& wait_params_for_tests() const { return waitParams_; }

 private:
  struct Event {
    SimTime t = 0;
    std::uint64_t seq = 0;
    bool isTimer = false;
    PeerId target = kNoPeer;
    TimerKind timer = TimerKind::ExecDone;
    Message msg;
  };
  struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
      if (a.t != b.t) return a.t > b.t;
      return a.seq > b.seq;
    }
  };

  // PeerHost
  SimTime now() const override { return now_; }
  bool send_to_neighbor(PeerId from, PeerId to, Message msg) override;
  bool send_direct(PeerId from, PeerId to, Message msg) override;
  void schedule_timer(PeerId peer, TimerKind kind, double delayMs) override;
  bool forward_crossed_edge(PeerId a, PeerId b) const override;
  bool is_child_of(PeerId parent, PeerId q) const override;
  double lambda_delay(PeerId p) const override;
  const WaitTimeParams& wait_params() const override { return waitParams_; }
  void originator_complete(const ScoreList& finalList) override;
  void note_lost_list() override { ++metrics_.lostLists; }

  bool alive(PeerId p, SimTime t) const;
  bool dispatch_send(PeerId from, PeerId to, Message msg, bool direct);
  void account_send(const Message& msg);
  void deliver(const Event& ev);
  void handle_session_message(const Message& msg, PeerId target);
  void start_retrieval();
  void finish_retrieval_piece();
  void finalize_cn();
  void compute_wait_params();
  Link link_between(PeerId a, PeerId b) const;

  const TopologyGraph& graph_;
  const std::vector<PeerDatabase>& databases_;
  SimConfig config_;
  bool cnMode_ = false;

  std::vector<ScoreList> localTops_;
  std::vector<std::vector<std::uint64_t>> topPayloadPrefix_;  // per peer, 0..k
  std::vector<double> execDelayMs_;
  std::vector<StatisticsStore> stats_;
  std::unordered_map<std::uint64_t, Link> edgeLinks_;
  std::vector<double> accessBandwidthKbps_;
  WaitTimeParams waitParams_;
  std::optional<ScoreList> oracleCache_;  // ttl and k are fixed per session

  // per-query state
  std::uint32_t queryCounter_ = 0;
  std::vector<Peer> peers_;
  std::vector<double> departureMs_;
  std::vector<double> inboundBusyUntil_;
  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  std::uint64_t seq_ = 0;
  SimTime now_ = 0;
  std::unordered_set<std::uint64_t> forwardEdges_;
  MetricsReport metrics_;
  ScoreList finalList_;
  bool originatorDone_ = false;
  int retrievalOutstanding_ = 0;
  bool retrievalStarted_ = false;
  double responseTimeMs_ = 0;
  std::vector<ScoreList> cnResponses_;
  std::ostream* trace_ = nullptr;
};

// Convenience wrapper: one query on a fresh session.
SimResult run_simulation(const TopologyGraph& graph,
                         const std::vector<PeerDatabase>& databases,
                         const SimConfig& config);

}  // namespace fdtopk
