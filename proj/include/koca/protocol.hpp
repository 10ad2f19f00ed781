#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "koca/config.hpp"

// Per-node state machine of the clustering protocol. Every handler is a pure
// function: it takes the node state by value and returns the successor state
// together with the messages and timers the node asks for. Clocks, channels
// and delivery belong to the engine.

namespace koca {

enum class NodeStatus { NCH, CH, TerminatedCH, TerminatedMember };

inline bool is_head(NodeStatus s) { return s == NodeStatus::CH || s == NodeStatus::TerminatedCH; }
inline bool is_terminated(NodeStatus s) {
  return s == NodeStatus::TerminatedCH || s == NodeStatus::TerminatedMember;
}

/// One known cluster: its head, the hop count to it and the neighbour that
/// lies on a shortest path towards it.
struct CHTableEntry {
  NodeId chid = 0;
  int hc = 0;
  NodeId prev = 0;

  friend bool operator==(const CHTableEntry&, const CHTableEntry&) = default;
};

/// Adjacent cluster seen from a head; boundary nodes map to their hop cost
/// towards that adjacent head.
struct ACTableEntry {
  NodeId chid = 0;
  std::vector<std::pair<NodeId, int>> boundaryNodes;

  friend bool operator==(const ACTableEntry&, const ACTableEntry&) = default;
};

using Edge = std::pair<NodeId, NodeId>;

struct LocalClusterGraph {
  std::set<NodeId> vertices;
  std::set<Edge> edges;  // stored with first < second

  friend bool operator==(const LocalClusterGraph&, const LocalClusterGraph&) = default;
};

struct NodeCounters {
  std::uint64_t chadSent = 0;
  std::uint64_t jreqSent = 0;
  std::uint64_t protocolViolations = 0;
  std::uint64_t orphanJreqs = 0;  // relay had no route for the cluster
  std::uint64_t lateJreqs = 0;    // arrived after the head terminated

  friend bool operator==(const NodeCounters&, const NodeCounters&) = default;
};

struct NodeState {
  NodeId nid = 0;
  NodeStatus status = NodeStatus::NCH;
  bool lateHead = false;  // became head because no advertisement arrived
  std::vector<NodeId> neighbors;
  std::vector<CHTableEntry> chTable;
  std::vector<ACTableEntry> acTable;
  LocalClusterGraph lcg;
  NodeCounters counters;

  const CHTableEntry* find_cluster(NodeId chid) const {
    auto it = std::find_if(chTable.begin(), chTable.end(),
                           [chid](const CHTableEntry& e) { return e.chid == chid; });
    return it == chTable.end() ? nullptr : &*it;
  }
  CHTableEntry* find_cluster(NodeId chid) {
    return const_cast<CHTableEntry*>(std::as_const(*this).find_cluster(chid));
  }
  const ACTableEntry* find_adjacent(NodeId chid) const {
    auto it = std::find_if(acTable.begin(), acTable.end(),
                           [chid](const ACTableEntry& e) { return e.chid == chid; });
    return it == acTable.end() ? nullptr : &*it;
  }
  bool is_boundary() const { return chTable.size() >= 2; }
  /// Head plus every node that registered through a join request.
  std::size_t cluster_size() const { return lcg.vertices.size() + 1; }

  friend bool operator==(const NodeState&, const NodeState&) = default;
};

/// Cluster-head advertisement.
struct ChAd {
  NodeId sid = 0;
  NodeId chid = 0;
  int hc = 1;

  friend bool operator==(const ChAd&, const ChAd&) = default;
};

struct HeardCluster {
  NodeId chid = 0;
  int hopCost = 0;

  friend bool operator==(const HeardCluster&, const HeardCluster&) = default;
};

/// Join request travelling hop by hop along prev pointers. `rid` is the
/// next-hop addressee and is rewritten by every relay.
struct Jreq {
  NodeId rid = 0;
  NodeId sid = 0;
  NodeId chid = 0;
  std::vector<Edge> neighborEdges;
  std::vector<HeardCluster> heardClusters;

  friend bool operator==(const Jreq&, const Jreq&) = default;
};

using Message = std::variant<ChAd, Jreq>;

enum class TimerKind { ChAdWait, JreqWait };

struct TimerRequest {
  TimerKind kind = TimerKind::ChAdWait;
  SimTime duration = 0.0;

  friend bool operator==(const TimerRequest&, const TimerRequest&) = default;
};

struct Transition {
  NodeState state;
  std::vector<Message> outbound;
  std::vector<TimerRequest> timers;
};

namespace detail {

inline void broadcast_advertisement(Transition& t, NodeId chid, int hc) {
  t.outbound.emplace_back(ChAd{t.state.nid, chid, hc});
  ++t.state.counters.chadSent;
}

inline void send_jreq(Transition& t, Jreq msg) {
  t.outbound.emplace_back(std::move(msg));
  ++t.state.counters.jreqSent;
}

inline void add_boundary(NodeState& s, NodeId chid, NodeId node, int cost) {
  auto it = std::find_if(s.acTable.begin(), s.acTable.end(),
                         [chid](const ACTableEntry& e) { return e.chid == chid; });
  if (it == s.acTable.end()) {
    s.acTable.push_back(ACTableEntry{chid, {{node, cost}}});
    return;
  }
  auto bn = std::find_if(it->boundaryNodes.begin(), it->boundaryNodes.end(),
                         [node](const auto& b) { return b.first == node; });
  if (bn == it->boundaryNodes.end()) {
    it->boundaryNodes.emplace_back(node, cost);
  } else {
    bn->second = std::min(bn->second, cost);
  }
}

}  // namespace detail

/// Coin flip election at start-up.
inline Transition init_node(NodeId nid, double coin, const SimConfig& cfg,
                            std::span<const NodeId> neighbors = {}) {
  Transition t{NodeState{}, {}, {}};
  t.state.nid = nid;
  t.state.neighbors.assign(neighbors.begin(), neighbors.end());
  if (coin < cfg.p) {
    t.state.status = NodeStatus::CH;
    detail::broadcast_advertisement(t, nid, 1);
    t.timers.push_back({TimerKind::JreqWait, cfg.jreq_wait()});
  } else {
    t.state.status = NodeStatus::NCH;
    t.timers.push_back({TimerKind::ChAdWait, cfg.ch_ad_wait()});
  }
  return t;
}

inline Transition handle_ch_ad(NodeState state, const ChAd& msg, const SimConfig& cfg) {
  Transition t{std::move(state), {}, {}};
  NodeState& s = t.state;
  if (msg.hc < 1 || msg.hc > cfg.k) {
    ++s.counters.protocolViolations;
    return t;
  }
  if (is_terminated(s.status)) return t;
  const bool head = s.status == NodeStatus::CH;
  if (head && msg.chid == s.nid) return t;  // echo of our own advertisement
  if (CHTableEntry* known = s.find_cluster(msg.chid)) {
    // Equal hop counts are not shorter; first arrival wins.
    if (msg.hc < known->hc) {
      known->hc = msg.hc;
      known->prev = msg.sid;
      if (head) detail::add_boundary(s, msg.chid, s.nid, msg.hc);
    }
    return t;
  }
  s.chTable.push_back({msg.chid, msg.hc, msg.sid});
  if (head) detail::add_boundary(s, msg.chid, s.nid, msg.hc);
  if (msg.hc < cfg.k) detail::broadcast_advertisement(t, msg.chid, msg.hc + 1);
  return t;
}

/// CH_AD_WAIT expiry: join every cluster heard so far or turn into a head.
inline Transition on_ch_ad_wait_expired(NodeState state, const SimConfig& cfg) {
  if (state.status != NodeStatus::NCH)
    throw std::logic_error("on_ch_ad_wait_expired: node is not an NCH");
  Transition t{std::move(state), {}, {}};
  NodeState& s = t.state;
  if (s.chTable.empty()) {
    s.status = NodeStatus::CH;
    s.lateHead = true;
    detail::broadcast_advertisement(t, s.nid, 1);
    t.timers.push_back({TimerKind::JreqWait, cfg.late_jreq_wait()});
    return t;
  }
  std::vector<Edge> edges;
  edges.reserve(s.neighbors.size());
  for (NodeId nb : s.neighbors) edges.emplace_back(s.nid, nb);
  std::vector<HeardCluster> heard;
  heard.reserve(s.chTable.size());
  for (const auto& e : s.chTable) heard.push_back({e.chid, e.hc});
  for (const auto& e : s.chTable) {
    detail::send_jreq(t, Jreq{e.prev, s.nid, e.chid, edges, heard});
  }
  s.status = NodeStatus::TerminatedMember;
  return t;
}

inline Transition handle_jreq(NodeState state, const Jreq& msg, const SimConfig& /*cfg*/) {
  Transition t{std::move(state), {}, {}};
  NodeState& s = t.state;
  if (msg.rid != s.nid) return t;
  if (is_head(s.status) && msg.chid == s.nid) {
    if (s.status == NodeStatus::TerminatedCH) {
      ++s.counters.lateJreqs;
      return t;
    }
    s.lcg.vertices.insert(msg.sid);
    for (auto [a, b] : msg.neighborEdges) s.lcg.edges.insert(std::minmax(a, b));
    for (const auto& hc : msg.heardClusters) {
      if (hc.chid != s.nid) detail::add_boundary(s, hc.chid, msg.sid, hc.hopCost);
    }
    return t;
  }
  const CHTableEntry* route = s.find_cluster(msg.chid);
  if (route == nullptr) {
    ++s.counters.orphanJreqs;
    return t;
  }
  Jreq fwd = msg;
  fwd.rid = route->prev;
  detail::send_jreq(t, std::move(fwd));
  return t;
}

/// JREQ_WAIT expiry ends the formation phase for a head.
inline NodeState on_jreq_wait_expired(NodeState state) {
  if (state.status == NodeStatus::TerminatedCH) return state;
  if (state.status != NodeStatus::CH)
    throw std::logic_error("on_jreq_wait_expired: node is not a cluster head");
  state.status = NodeStatus::TerminatedCH;
  return state;
}

}  // namespace koca
