// SPDX-License-Identifier: Apache-2.0
#include "peer.hpp"

#include <algorithm>

namespace fdtopk {

namespace {
constexpr std::uint64_t kHeaderBytes = 16;
constexpr std::uint64_t kAddressBytes = 6;
}  // namespace

std::uint64_t Message::wire_bytes() const {
  switch (kind) {
    case Kind::Forward:
      // header + qid(10) + ttl(1) + originator(6) + strategy byte + attached ids
      return kHeaderBytes + 10 + 1 + kAddressBytes + 1 + kAddressBytes * attached.size();
    case Kind::ScoreListMsg:
    case Kind::UrgentScoreList:
      return kHeaderBytes + list.serialized_bytes();
    case Kind::RetrieveRequest:
      return kHeaderBytes + 4;
    case Kind::RetrieveResponse:
    case Kind::DirectItems:
      return kHeaderBytes + bodyBytes;
  }
  return kHeaderBytes;
}

Peer::Peer(PeerId id, const std::vector<PeerId>* neighbors)
    : id_(id), neighbors_(neighbors) {}

void Peer::prepare(const QueryDescriptor& query, Mode mode, ScoreList localTop,
                   std::uint64_t localItemBytes, double execDelayMs,
                   StatisticsStore* stats) {
  query_ = query;
  mode_ = mode;
  localTop_ = std::move(localTop);
  localItemBytes_ = localItemBytes;
  execDelayMs_ = execDelayMs;
  stats_ = stats;
}

Message Peer::make_forward(int ttl) const {
  Message msg;
  msg.kind = Message::Kind::Forward;
  msg.sender = id_;
  msg.ttl = ttl;
  if (query_.strategy == Strategy::Strategy1And2) {
    msg.attached.reserve(neighbors_->size() + 1);
    msg.attached.push_back(id_);
    msg.attached.insert(msg.attached.end(), neighbors_->begin(), neighbors_->end());
  }
  return msg;
}

void Peer::begin_as_originator(PeerHost& host) {
  seen_ = true;
  isOriginator_ = true;
  parent_ = kNoPeer;
  start_participation(query_.ttl, host);
}

void Peer::on_forward(const Message& msg, PeerHost& host) {
  if (seen_) {
    // Already received: discard; under Strategy 1 the sender drops out of
    // the not-yet-flushed forward targets.
    if (flushScheduled_)
      std::erase(flushTargets_, msg.sender);
    return;
  }
  // A forward whose ttl expired carries no reach: it exists only as
  // duplicate-suppression traffic and recruits nobody.
  if (msg.ttl < 1) return;
  seen_ = true;
  parent_ = msg.sender;
  // Strategy 2: peers named in the attached list already have Q.
  attachedExcluded_.assign(msg.attached.begin(), msg.attached.end());
  std::sort(attachedExcluded_.begin(), attachedExcluded_.end());
  start_participation(msg.ttl - 1, host);
}

void Peer::start_participation(int outgoingTtl, PeerHost& host) {
  phase_ = Phase::Collecting;
  outgoingTtl_ = outgoingTtl;
  host.schedule_timer(id_, TimerKind::ExecDone, execDelayMs_);

  // Centralized baselines never relay: the center contacts peers directly.
  if (mode_ != Mode::Fd) return;
  if (outgoingTtl_ < 0) return;

  // Every participant forwards, frontier peers included; their dead
  // (ttl = 0) forwards are counted traffic that recruits nobody.
  std::vector<PeerId> candidates;
  for (PeerId q : *neighbors_) {
    if (q == parent_) continue;
    if (query_.strategy == Strategy::Strategy1And2 &&
        std::binary_search(attachedExcluded_.begin(), attachedExcluded_.end(), q))
      continue;
    candidates.push_back(q);
  }
  if (query_.heuristic && stats_ != nullptr)
    candidates = select_neighbors_heuristic(candidates, *stats_, query_.k,
                                            query_.scoringSpec, *query_.heuristic);
  if (candidates.empty()) return;

  // Dead forwards bring no answers back: no deadline to wait for.
  if (outgoingTtl_ >= 1)
    host.schedule_timer(id_, TimerKind::WaitDeadline,
                        compute_wait_time(outgoingTtl_, host.wait_params()));

  if (query_.strategy == Strategy::Basic) {
    send_forwards(candidates, host);
  } else {
    flushTargets_ = std::move(candidates);
    flushScheduled_ = true;
    host.schedule_timer(id_, TimerKind::ForwardFlush, host.lambda_delay(id_));
  }
}

void Peer::send_forwards(std::span<const PeerId> targets, PeerHost& host) {
  for (PeerId q : targets) {
    if (host.send_to_neighbor(id_, q, make_forward(outgoingTtl_))) {
      forwardedTo_.push_back(q);
      if (outgoingTtl_ >= 1) pending_.insert(q);
    }
  }
}

void Peer::flush_forwards(PeerHost& host) {
  flushScheduled_ = false;
  std::vector<PeerId> targets;
  for (PeerId q : flushTargets_)
    if (!host.forward_crossed_edge(id_, q)) targets.push_back(q);
  flushTargets_.clear();
  send_forwards(targets, host);
  maybe_complete_early(host);
}

void Peer::maybe_complete_early(PeerHost& host) {
  // A peer whose pending set empties before the deadline proceeds at once.
  if (phase_ == Phase::Collecting && execDone_ && !flushScheduled_ && pending_.empty())
    complete(host);
}

void Peer::on_score_list(const Message& msg, PeerHost& host) {
  if (msg.kind == Message::Kind::UrgentScoreList) {
    if (phase_ == Phase::Done) {
      if (isOriginator_) {
        host.note_lost_list();  // already in the data-retrieval phase
        return;
      }
      std::vector<PeerId> path = msg.relayPath;
      path.push_back(id_);
      relay_urgent(msg.list, std::move(path), host);
      return;
    }
    // Still collecting: extra input. It deliberately does not touch the
    // pending set, so recovery never changes when regular lists are awaited.
    urgentInputs_.push_back(msg.list);
    return;
  }

  if (phase_ == Phase::Done) {
    // Late score-list: relayed upward when urgent routing is on, else dropped.
    if (query_.urgentRouting && !isOriginator_)
      relay_urgent(msg.list, {id_}, host);
    else
      host.note_lost_list();
    return;
  }
  receivedLists_.emplace_back(msg.sender, msg.list);
  pending_.erase(msg.sender);
  maybe_complete_early(host);
}

void Peer::on_timer(TimerKind kind, PeerHost& host) {
  switch (kind) {
    case TimerKind::ExecDone:
      execDone_ = true;
      if (mode_ != Mode::Fd) {
        // CN baselines: the local result goes straight to the originator;
        // the kernel merges the originator's own list at finalize time.
        if (isOriginator_) return;
        Message msg;
        msg.sender = id_;
        msg.list = localTop_;
        if (mode_ == Mode::CnItems) {
          msg.kind = Message::Kind::DirectItems;
          msg.bodyBytes = localItemBytes_;
        } else {
          msg.kind = Message::Kind::ScoreListMsg;
        }
        if (!host.send_direct(id_, query_.originator, std::move(msg)))
          host.note_lost_list();
        phase_ = Phase::Done;
        return;
      }
      maybe_complete_early(host);
      return;
    case TimerKind::ForwardFlush:
      flush_forwards(host);
      return;
    case TimerKind::WaitDeadline:
      if (phase_ == Phase::Collecting) complete(host);
      return;
    case TimerKind::MergeDone:
      send_backward(host);
      return;
  }
}

void Peer::complete(PeerHost& host) {
  phase_ = Phase::Done;
  std::vector<ScoreList> inputs;
  inputs.reserve(receivedLists_.size() + urgentInputs_.size() + 1);
  inputs.push_back(localTop_);
  for (const auto& [from, list] : receivedLists_) inputs.push_back(list);
  for (const ScoreList& list : urgentInputs_) inputs.push_back(list);
  merged_ = merge_score_lists(inputs, query_.k);

  if (stats_ != nullptr) {
    for (PeerId q : forwardedTo_) {
      const ScoreList* returned = nullptr;
      for (const auto& [from, list] : receivedLists_)
        if (from == q) {
          returned = &list;
          break;
        }
      stats_->record({q, query_.k, query_.scoringSpec}, merged_, returned);
    }
  }

  if (isOriginator_) {
    mergedSent_ = true;
    host.originator_complete(merged_);
    return;
  }
  bool didMerge = !receivedLists_.empty() || !urgentInputs_.empty();
  if (didMerge)
    host.schedule_timer(id_, TimerKind::MergeDone, host.wait_params().tMergeMs);
  else
    send_backward(host);  // peers that got Q with TTL=1 skip the merge step
}

void Peer::send_backward(PeerHost& host) {
  mergedSent_ = true;
  Message msg;
  msg.kind = Message::Kind::ScoreListMsg;
  msg.sender = id_;
  msg.list = merged_;
  if (host.send_to_neighbor(id_, parent_, std::move(msg))) return;
  // Parent gone before the backward send.
  if (query_.urgentRouting)
    route_on_parent_loss(merged_, {id_}, host);
  else
    host.note_lost_list();
}

void Peer::relay_urgent(ScoreList list, std::vector<PeerId> path, PeerHost& host) {
  Message msg;
  msg.kind = Message::Kind::UrgentScoreList;
  msg.sender = id_;
  msg.list = list;
  msg.relayPath = path;
  if (parent_ != kNoPeer && host.send_to_neighbor(id_, parent_, std::move(msg))) return;
  route_on_parent_loss(std::move(list), std::move(path), host);
}

void Peer::route_on_parent_loss(ScoreList list, std::vector<PeerId> path, PeerHost& host) {
  // Smallest-id live neighbor that is not our child and has not relayed
  // this list already; otherwise straight to the query originator.
  for (PeerId q : *neighbors_) {
    if (q == parent_) continue;
    if (host.is_child_of(id_, q)) continue;
    if (std::find(path.begin(), path.end(), q) != path.end()) continue;
    Message msg;
    msg.kind = Message::Kind::UrgentScoreList;
    msg.sender = id_;
    msg.list = list;
    msg.relayPath = path;
    if (host.send_to_neighbor(id_, q, std::move(msg))) return;
  }
  Message msg;
  msg.kind = Message::Kind::UrgentScoreList;
  msg.sender = id_;
  msg.list = std::move(list);
  msg.relayPath = std::move(path);
  if (!host.send_direct(id_, query_.originator, std::move(msg)))
    host.note_lost_list();
}

}  // namespace fdtopk
