// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "protocol.hpp"
#include "types.hpp"

namespace fdtopk {

enum class TimerKind : std::uint8_t { ExecDone, ForwardFlush, WaitDeadline, MergeDone };

struct Message {
  enum class Kind : std::uint8_t {
    Forward,
    ScoreListMsg,
    UrgentScoreList,
    RetrieveRequest,
    RetrieveResponse,
    DirectItems,  // CN: top items straight to the originator
  };

  Kind kind = Kind::Forward;
  PeerId sender = kNoPeer;
  int ttl = 0;                          // Forward
  std::vector<PeerId> attached;         // Forward, Strategy 2
  ScoreList list;                       // score-list kinds and CN items
  std::vector<PeerId> relayPath;        // urgent relay loop guard
  int requestCount = 0;                 // RetrieveRequest
  std::uint64_t bodyBytes = 0;          // RetrieveResponse / DirectItems payload

  // Accounted serialized size; headers are 16 bytes, entries L = 10,
  // addresses 6, attached list 6 per peer id.
  std::uint64_t wire_bytes() const;
};

// Kernel services a peer handler may use. Sends return false when the
// destination has departed (synchronous delivery failure).
class PeerHost {
 public:
  virtual ~PeerHost() = default;
  virtual SimTime now() const = 0;
  virtual bool send_to_neighbor(PeerId from, PeerId to, Message msg) = 0;
  virtual bool send_direct(PeerId from, PeerId to, Message msg) = 0;
  virtual void schedule_timer(PeerId peer, TimerKind kind, double delayMs) = 0;
  // True when a forward message already crossed (or is crossing) this edge.
  virtual bool forward_crossed_edge(PeerId a, PeerId b) const = 0;
  virtual bool is_child_of(PeerId parent, PeerId q) const = 0;
  virtual double lambda_delay(PeerId p) const = 0;
  virtual const WaitTimeParams& wait_params() const = 0;
  virtual void originator_complete(const ScoreList& finalList) = 0;
  virtual void note_lost_list() = 0;
};

// Per-peer protocol state machine. All handlers are invoked sequentially by
// the event kernel; waiting is expressed as scheduled timers.
class Peer {
 public:
  enum class Phase : std::uint8_t { Idle, Collecting, Done };
  enum class Mode : std::uint8_t { Fd, CnItems, CnScores };

  Peer(PeerId id, const std::vector<PeerId>* neighbors);

  // Installs the query context; every peer gets this before the run starts.
  void prepare(const QueryDescriptor& query, Mode mode, ScoreList localTop,
               std::uint64_t localItemBytes, double execDelayMs, StatisticsStore* stats);

  // The originator bootstraps itself instead of receiving a forward message.
  void begin_as_originator(PeerHost& host);

  void on_forward(const Message& msg, PeerHost& host);
  void on_score_list(const Message& msg, PeerHost& host);
  void on_timer(TimerKind kind, PeerHost& host);

  PeerId id() const { return id_; }
  Phase phase() const { return phase_; }
  bool seen_query() const { return seen_; }
  PeerId parent() const { return parent_; }
  bool merged_sent() const { return mergedSent_; }
  const std::set<PeerId>& pending_neighbors() const { return pending_; }
  const std::vector<PeerId>& forwarded_to() const { return forwardedTo_; }

 private:
  void start_participation(int outgoingTtl, PeerHost& host);
  void send_forwards(std::span<const PeerId> targets, PeerHost& host);
  void flush_forwards(PeerHost& host);
  void maybe_complete_early(PeerHost& host);
  void complete(PeerHost& host);
  void send_backward(PeerHost& host);
  void relay_urgent(ScoreList list, std::vector<PeerId> path, PeerHost& host);
  void route_on_parent_loss(ScoreList list, std::vector<PeerId> path, PeerHost& host);
  Message make_forward(int ttl) const;

  PeerId id_ = kNoPeer;
  const std::vector<PeerId>* neighbors_ = nullptr;

  QueryDescriptor query_;
  Mode mode_ = Mode::Fd;
  ScoreList localTop_;
  std::uint64_t localItemBytes_ = 0;
  double execDelayMs_ = 0;
  StatisticsStore* stats_ = nullptr;

  Phase phase_ = Phase::Idle;
  bool seen_ = false;
  bool execDone_ = false;
  bool flushScheduled_ = false;
  bool mergedSent_ = false;
  bool isOriginator_ = false;
  PeerId parent_ = kNoPeer;
  int outgoingTtl_ = 0;
  std::vector<PeerId> attachedExcluded_;
  std::vector<PeerId> flushTargets_;
  std::vector<PeerId> forwardedTo_;
  std::set<PeerId> pending_;
  std::vector<std::pair<PeerId, ScoreList>> receivedLists_;
  std::vector<ScoreList> urgentInputs_;
  ScoreList merged_;
};

}  // namespace fdtopk
