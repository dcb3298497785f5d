// SPDX-License-Identifier: Apache-2.0
#include "simkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

namespace fdtopk {

namespace {

constexpr std::uint64_t kLambdaTag = 0x6c616d626461ull;   // per-peer forward delay
constexpr std::uint64_t kAccessTag = 0x616363657373ull;   // per-peer access link
constexpr std::uint64_t kPairTag = 0x70616972ull;         // off-overlay pair latency
constexpr std::uint64_t kChurnTag = 0x636875726eull;

double unit_uniform(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// mean + sd * z with z independent of the mean, so sweeping the mean moves
// every draw in the same direction.
double normal_draw(double mean, double variance, std::uint64_t streamSeed,
                   double floor) {
  std::mt19937_64 rng(streamSeed);
  std::normal_distribution<double> z(0.0, 1.0);
  return std::max(floor, mean + std::sqrt(variance) * z(rng));
}

std::uint64_t edge_key(PeerId a, PeerId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::FdBasic: return "fd-basic";
    case Algorithm::FdStrategy1: return "fd-strategy1";
    case Algorithm::FdStrategy1And2: return "fd-strategy12";
    case Algorithm::FdDynamic: return "fd-dynamic";
    case Algorithm::Cn: return "cn";
    case Algorithm::CnStar: return "cn-star";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(const std::string& name) {
  if (name == "fd-basic") return Algorithm::FdBasic;
  if (name == "fd-strategy1") return Algorithm::FdStrategy1;
  if (name == "fd-strategy12") return Algorithm::FdStrategy1And2;
  if (name == "fd-dynamic") return Algorithm::FdDynamic;
  if (name == "cn") return Algorithm::Cn;
  if (name == "cn-star") return Algorithm::CnStar;
  return std::nullopt;
}

double transfer_time_ms(std::uint64_t msgBytes, const Link& link) {
  // kbps is numerically bits per millisecond.
  return link.latencyMs + 8.0 * static_cast<double>(msgBytes) / link.bandwidthKbps;
}

Session::Session(const TopologyGraph& graph, const std::vector<PeerDatabase>& databases,
                 SimConfig config)
    : graph_(graph), databases_(databases), config_(std::move(config)) {
  const std::uint32_t n = graph_.node_count();
  if (n == 0) throw std::invalid_argument("empty topology");
  if (databases_.size() != n)
    throw std::invalid_argument("database count does not match topology");
  if (config_.origin >= n) throw std::invalid_argument("origin out of range");
  if (config_.k < 1) throw std::invalid_argument("k must be >= 1");
  cnMode_ = config_.algorithm == Algorithm::Cn || config_.algorithm == Algorithm::CnStar;

  localTops_.resize(n);
  topPayloadPrefix_.resize(n);
  execDelayMs_.resize(n);
  stats_.resize(n);
  accessBandwidthKbps_.resize(n);
  for (PeerId p = 0; p < n; ++p) {
    std::vector<LocalTopEntry> top = local_top_k(databases_[p], config_.k);
    localTops_[p].entries.reserve(top.size());
    topPayloadPrefix_[p].assign(1, 0);
    for (const LocalTopEntry& e : top) {
      localTops_[p].entries.push_back({e.score, p});
      topPayloadPrefix_[p].push_back(topPayloadPrefix_[p].back() +
                                     databases_[p].payload_bytes(e.row));
    }
    execDelayMs_[p] = config_.execMsPerRow * static_cast<double>(databases_[p].row_count());
    accessBandwidthKbps_[p] =
        normal_draw(config_.link.bandwidthMeanKbps, config_.link.bandwidthVariance,
                    mix_seed(config_.seed, kAccessTag, p), 1.0);
  }
  for (PeerId u = 0; u < n; ++u)
    for (PeerId v : graph_.neighbors(u)) {
      if (v < u) continue;
      Link link;
      link.latencyMs =
          normal_draw(config_.link.latencyMeanMs, config_.link.latencyVariance,
                      mix_seed(config_.seed, u, v, 1), 0.1);
      link.bandwidthKbps =
          normal_draw(config_.link.bandwidthMeanKbps, config_.link.bandwidthVariance,
                      mix_seed(config_.seed, u, v, 2), 1.0);
      edgeLinks_.emplace(edge_key(u, v), link);
    }
  compute_wait_params();
}

Session::~Session() = default;

void Session::compute_wait_params() {
  double maxLatency = 0;
  double minBandwidth = accessBandwidthKbps_.empty() ? 1.0 : accessBandwidthKbps_[0];
  for (double bw : accessBandwidthKbps_) minBandwidth = std::min(minBandwidth, bw);
  for (const auto& [key, link] : edgeLinks_) {
    maxLatency = std::max(maxLatency, link.latencyMs);
    minBandwidth = std::min(minBandwidth, link.bandwidthKbps);
  }
  std::uint32_t maxDegree = 0;
  for (PeerId p = 0; p < graph_.node_count(); ++p)
    maxDegree = std::max(maxDegree, graph_.degree(p));
  std::size_t maxRows = 0;
  for (const PeerDatabase& db : databases_) maxRows = std::max(maxRows, db.row_count());

  std::uint64_t forwardBytes = 16 + 10 + 1 + 6 + 1;
  if (config_.algorithm == Algorithm::FdStrategy1And2)
    forwardBytes += 6ull * (1 + maxDegree);
  const std::uint64_t listBytes = 16 + 10ull * static_cast<std::uint64_t>(config_.k);
  const bool delayedForward = config_.algorithm == Algorithm::FdStrategy1 ||
                              config_.algorithm == Algorithm::FdStrategy1And2;

  // +1 ms margins keep every arrival strictly ahead of the matching deadline.
  waitParams_.tQsndMs = maxLatency +
                        8.0 * static_cast<double>(forwardBytes) / minBandwidth +
                        (delayedForward ? config_.lambdaMaxMs : 0.0) + 1.0;
  waitParams_.tExecMs = config_.execMsPerRow * static_cast<double>(maxRows) + 1.0;
  waitParams_.tSLsndMs =
      maxLatency + 8.0 * static_cast<double>(listBytes) / minBandwidth + 1.0;
  waitParams_.tMergeMs = config_.mergeMs;
}

Link Session::link_between(PeerId a, PeerId b) const {
  auto it = edgeLinks_.find(edge_key(a, b));
  if (it != edgeLinks_.end()) return it->second;
  Link link;
  link.latencyMs = normal_draw(config_.link.latencyMeanMs, config_.link.latencyVariance,
                               mix_seed(config_.seed, kPairTag, std::min(a, b),
                                        std::max(a, b)),
                               0.1);
  link.bandwidthKbps = std::min(accessBandwidthKbps_[a], accessBandwidthKbps_[b]);
  return link;
}

bool Session::alive(PeerId p, SimTime t) const {
  if (p == config_.origin) return true;
  return t < departureMs_[p];
}

void Session::account_send(const Message& msg) {
  metrics_.totalBytes += msg.wire_bytes();
  switch (msg.kind) {
    case Message::Kind::Forward:
      ++metrics_.mFw;
      break;
    case Message::Kind::ScoreListMsg:
      ++metrics_.mBw;
      metrics_.bBw += msg.list.serialized_bytes();
      break;
    case Message::Kind::UrgentScoreList:
      ++metrics_.urgentListsSent;
      break;
    case Message::Kind::DirectItems:
      // item shipments are answers, not retrieval traffic; bBw stays
      // score-list bytes only
      ++metrics_.mBw;
      break;
    case Message::Kind::RetrieveRequest:
    case Message::Kind::RetrieveResponse:
      ++metrics_.mRt;
      break;
  }
}

bool Session::dispatch_send(PeerId from, PeerId to, Message msg, bool direct) {
  if (!alive(to, now_)) return false;
  SimTime arrival;
  const std::uint64_t bytes = msg.wire_bytes();
  if (!direct) {
    auto it = edgeLinks_.find(edge_key(from, to));
    if (it == edgeLinks_.end()) throw std::logic_error("send on a non-edge");
    arrival = now_ + transfer_time_ms(bytes, it->second);
  } else {
    // Direct transfers share the destination's access link, one at a time.
    const Link link = link_between(from, to);
    SimTime start = std::max(inboundBusyUntil_[to], now_ + link.latencyMs);
    arrival = start + 8.0 * static_cast<double>(bytes) / accessBandwidthKbps_[to];
    inboundBusyUntil_[to] = arrival;
  }
  account_send(msg);
  if (msg.kind == Message::Kind::Forward && !direct)
    forwardEdges_.insert(edge_key(from, to));
  Event ev;
  ev.t = arrival;
  ev.seq = seq_++;
  ev.target = to;
  ev.msg = std::move(msg);
  queue_.push(std::move(ev));
  return true;
}

bool Session::send_to_neighbor(PeerId from, PeerId to, Message msg) {
  return dispatch_send(from, to, std::move(msg), false);
}

bool Session::send_direct(PeerId from, PeerId to, Message msg) {
  return dispatch_send(from, to, std::move(msg), true);
}

void Session::schedule_timer(PeerId peer, TimerKind kind, double delayMs) {
  Event ev;
  ev.t = now_ + delayMs;
  ev.seq = seq_++;
  ev.isTimer = true;
  ev.target = peer;
  ev.timer = kind;
  queue_.push(std::move(ev));
}

bool Session::forward_crossed_edge(PeerId a, PeerId b) const {
  return forwardEdges_.contains(edge_key(a, b));
}

bool Session::is_child_of(PeerId parent, PeerId q) const {
  return peers_[q].seen_query() && peers_[q].parent() == parent;
}

double Session::lambda_delay(PeerId p) const {
  // Stable per peer across executions so repeated queries rebuild the same
  // forward tree and recorded statistics stay predictive.
  double u = unit_uniform(mix_seed(config_.seed, kLambdaTag, p));
  return config_.lambdaMaxMs * (1.0 - u);
}

void Session::originator_complete(const ScoreList& finalList) {
  finalList_ = finalList;
  originatorDone_ = true;
  responseTimeMs_ = now_;
  start_retrieval();
}

void Session::start_retrieval() {
  retrievalStarted_ = true;
  retrievalOutstanding_ = 0;
  for (const auto& [owner, count] : build_retrieval_plan(finalList_)) {
    if (owner == config_.origin) continue;  // own rows need no messages
    Message req;
    req.kind = Message::Kind::RetrieveRequest;
    req.sender = config_.origin;
    req.requestCount = count;
    if (dispatch_send(config_.origin, owner, std::move(req), true))
      ++retrievalOutstanding_;
  }
}

void Session::finish_retrieval_piece() {
  --retrievalOutstanding_;
}

void Session::finalize_cn() {
  std::vector<ScoreList> inputs;
  inputs.reserve(cnResponses_.size() + 1);
  inputs.push_back(localTops_[config_.origin]);
  for (const ScoreList& list : cnResponses_) inputs.push_back(list);
  finalList_ = merge_score_lists(inputs, config_.k);
  originatorDone_ = true;
  responseTimeMs_ = now_;
  if (config_.algorithm == Algorithm::CnStar) start_retrieval();
}

void Session::handle_session_message(const Message& msg, PeerId target) {
  switch (msg.kind) {
    case Message::Kind::RetrieveRequest: {
      const auto& prefix = topPayloadPrefix_[target];
      const std::size_t m =
          std::min<std::size_t>(static_cast<std::size_t>(std::max(msg.requestCount, 0)),
                                prefix.size() - 1);
      Message resp;
      resp.kind = Message::Kind::RetrieveResponse;
      resp.sender = target;
      resp.bodyBytes = prefix[m];
      dispatch_send(target, config_.origin, std::move(resp), true);
      return;
    }
    case Message::Kind::RetrieveResponse:
      finish_retrieval_piece();
      return;
    case Message::Kind::DirectItems:
    case Message::Kind::ScoreListMsg:
      cnResponses_.push_back(msg.list);
      return;
    default:
      return;
  }
}

void Session::deliver(const Event& ev) {
  if (trace_ != nullptr)
    *trace_ << ev.t << ' ' << ev.seq << ' ' << ev.target << ' '
            << (ev.isTimer ? "timer" : "msg") << ' '
            << (ev.isTimer ? static_cast<int>(ev.timer) : static_cast<int>(ev.msg.kind))
            << ' ' << (ev.isTimer ? 0 : ev.msg.wire_bytes()) << '\n';

  if (!alive(ev.target, ev.t)) {
    if (ev.isTimer) return;
    switch (ev.msg.kind) {
      case Message::Kind::ScoreListMsg:
      case Message::Kind::UrgentScoreList:
        note_lost_list();
        return;
      case Message::Kind::RetrieveRequest:
        finish_retrieval_piece();  // the originator stops waiting for it
        return;
      default:
        return;
    }
  }

  if (ev.isTimer) {
    peers_[ev.target].on_timer(ev.timer, *this);
    return;
  }
  switch (ev.msg.kind) {
    case Message::Kind::Forward:
      peers_[ev.target].on_forward(ev.msg, *this);
      return;
    case Message::Kind::ScoreListMsg:
      if (cnMode_ && ev.target == config_.origin) {
        cnResponses_.push_back(ev.msg.list);
        return;
      }
      peers_[ev.target].on_score_list(ev.msg, *this);
      return;
    case Message::Kind::UrgentScoreList:
      peers_[ev.target].on_score_list(ev.msg, *this);
      return;
    default:
      handle_session_message(ev.msg, ev.target);
      return;
  }
}

SimResult Session::run_query() {
  const std::uint32_t n = graph_.node_count();
  const std::uint32_t counter = queryCounter_++;

  // Fresh per-query state; link draws and statistics persist.
  peers_.clear();
  peers_.reserve(n);
  departureMs_.assign(n, std::numeric_limits<double>::infinity());
  inboundBusyUntil_.assign(n, 0.0);
  queue_ = {};
  seq_ = 0;
  now_ = 0;
  forwardEdges_.clear();
  metrics_ = {};
  finalList_ = {};
  originatorDone_ = false;
  retrievalOutstanding_ = 0;
  retrievalStarted_ = false;
  responseTimeMs_ = 0;
  cnResponses_.clear();

  if (config_.churn.meanLifetimeMs > 0) {
    for (PeerId p = 0; p < n; ++p) {
      if (p == config_.origin) continue;
      if (config_.churn.fixedLifetime) {
        departureMs_[p] = config_.churn.meanLifetimeMs;
      } else {
        double u = unit_uniform(mix_seed(config_.seed, kChurnTag, p, counter));
        departureMs_[p] = -config_.churn.meanLifetimeMs * std::log1p(-u);
      }
    }
  }

  QueryDescriptor query;
  query.qid = {config_.origin, counter};
  query.k = config_.k;
  query.ttl = cnMode_ ? 0 : config_.ttl;
  query.originator = config_.origin;
  query.strategy = config_.algorithm == Algorithm::FdStrategy1 ? Strategy::Strategy1
                   : config_.algorithm == Algorithm::FdStrategy1And2
                       ? Strategy::Strategy1And2
                       : Strategy::Basic;
  query.urgentRouting = config_.algorithm == Algorithm::FdDynamic;
  query.heuristic = config_.heuristic;

  const Peer::Mode mode = config_.algorithm == Algorithm::Cn ? Peer::Mode::CnItems
                          : config_.algorithm == Algorithm::CnStar
                              ? Peer::Mode::CnScores
                              : Peer::Mode::Fd;
  const std::uint64_t k64 = static_cast<std::uint64_t>(config_.k);
  for (PeerId p = 0; p < n; ++p) {
    peers_.emplace_back(p, &graph_.neighbors(p));
    const auto& prefix = topPayloadPrefix_[p];
    const std::uint64_t itemBytes = prefix[std::min<std::uint64_t>(k64, prefix.size() - 1)];
    peers_[p].prepare(query, mode, localTops_[p], itemBytes, execDelayMs_[p],
                      &stats_[p]);
  }

  peers_[config_.origin].begin_as_originator(*this);
  if (cnMode_) {
    // The central service contacts every covered peer directly.
    for (PeerId p : reachable_set(graph_, config_.origin, config_.ttl)) {
      if (p == config_.origin) continue;
      Message fwd;
      fwd.kind = Message::Kind::Forward;
      fwd.sender = config_.origin;
      fwd.ttl = 1;
      dispatch_send(config_.origin, p, std::move(fwd), true);
    }
  }

  while (true) {
    if (queue_.empty()) {
      if (cnMode_ && !originatorDone_) {
        finalize_cn();
        continue;
      }
      break;
    }
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.t;
    deliver(ev);
  }

  metrics_.seed = config_.seed;
  metrics_.algorithm = algorithm_name(config_.algorithm);
  metrics_.nPeers = n;
  metrics_.k = config_.k;
  metrics_.ttl = config_.ttl;
  metrics_.responseTimeMs = responseTimeMs_;
  if (!oracleCache_)
    oracleCache_ =
        oracle_top_k(graph_, databases_, config_.origin, config_.ttl, config_.k);
  metrics_.acQ = accuracy(finalList_, *oracleCache_);

  SimResult result;
  result.finalList = finalList_;
  result.metrics = metrics_;
  return result;
}

SimResult run_simulation(const TopologyGraph& graph,
                         const std::vector<PeerDatabase>& databases,
                         const SimConfig& config) {
  Session session(graph, databases, config);
  return session.run_query();
}

}  // namespace fdtopk
