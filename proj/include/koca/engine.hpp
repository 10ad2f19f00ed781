#pragma once

#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "koca/config.hpp"
#include "koca/protocol.hpp"
#include "koca/rng.hpp"
#include "koca/topology.hpp"

namespace koca {

struct MessageTotals {
  std::uint64_t chad = 0;
  std::uint64_t jreq = 0;

  friend bool operator==(const MessageTotals&, const MessageTotals&) = default;
};

struct SimResult {
  std::vector<NodeState> finalStates;
  MessageTotals msgCounts;
  std::vector<MessageTotals> perNode;
  SimTime terminationTime = 0.0;              // time of the last processed event
  std::vector<SimTime> nodeTerminationTime;   // when each node reached a terminal status
  double coverageAtFirstWave = 0.0;
  std::vector<bool> coveredAtFirstWave;
  std::uint64_t dropCount = 0;
  std::uint64_t deliveryCount = 0;
  std::uint64_t eventCount = 0;

  std::size_t node_count() const { return finalStates.size(); }

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

/// Queue entries are ordered by (time, class, seq). At equal timestamps
/// deliveries run before timer expiries, so a message arriving exactly when
/// a wait ends is still seen by the waiting node.
struct Event {
  struct Deliver {
    NodeId to;
    Message msg;
  };
  struct TimerFire {
    NodeId node;
    TimerKind kind;
  };

  SimTime time = 0.0;
  std::uint64_t seq = 0;
  std::variant<Deliver, TimerFire> kind;

  int order_class() const { return kind.index() == 0 ? 0 : 1; }

  friend bool operator>(const Event& a, const Event& b) {
    if (a.time != b.time) return a.time > b.time;
    if (a.order_class() != b.order_class()) return a.order_class() > b.order_class();
    return a.seq > b.seq;
  }
};

class EventQueueOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kMaxEvents = 1'000'000'000ULL;

namespace detail {

class Simulator {
 public:
  Simulator(const SimConfig& cfg, const Topology& topo, RandomStream channelRng,
            std::uint64_t maxEvents)
      : cfg_(cfg),
        topo_(topo),
        channelRng_(std::move(channelRng)),
        per_(packet_error_rate(cfg.channel)),
        jitterMax_(jitter_max(cfg.channel)),
        maxEvents_(maxEvents) {
    const std::size_t n = topo.size();
    result_.finalStates.resize(n);
    result_.perNode.resize(n);
    result_.nodeTerminationTime.assign(n, 0.0);
    result_.coveredAtFirstWave.assign(n, false);
  }

  SimResult run(std::span<const double> coins) {
    const std::size_t n = topo_.size();
    if (coins.size() != n) throw std::invalid_argument("run_simulation: one coin per node required");
    for (std::size_t i = 0; i < n; ++i) {
      const auto id = static_cast<NodeId>(i);
      Transition t = init_node(id, coins[i], cfg_, topo_.neighbors(id));
      if (t.state.status == NodeStatus::CH) result_.coveredAtFirstWave[i] = true;
      apply(id, std::move(t));
    }
    while (!queue_.empty()) {
      // Ordering only reads time, class and seq, which survive the move.
      Event ev = std::move(const_cast<Event&>(queue_.top()));
      queue_.pop();
      now_ = ev.time;
      if (++result_.eventCount > maxEvents_)
        throw EventQueueOverflow("event limit exceeded at t=" + std::to_string(now_) +
                                 "; forwarding loop suspected");
      if (auto* d = std::get_if<Event::Deliver>(&ev.kind)) {
        deliver(*d);
      } else {
        fire(std::get<Event::TimerFire>(ev.kind));
      }
    }
    result_.terminationTime = now_;
    std::size_t covered = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!is_terminated(result_.finalStates[i].status))
        throw std::logic_error("run_simulation: node " + std::to_string(i) +
                               " did not terminate");
      if (result_.coveredAtFirstWave[i]) ++covered;
    }
    result_.coverageAtFirstWave = n == 0 ? 0.0 : static_cast<double>(covered) / n;
    return std::move(result_);
  }

 private:
  void deliver(Event::Deliver& d) {
    ++result_.deliveryCount;
    NodeState& s = result_.finalStates[d.to];
    if (const auto* ad = std::get_if<ChAd>(&d.msg)) {
      apply(d.to, handle_ch_ad(std::move(s), *ad, cfg_));
    } else {
      apply(d.to, handle_jreq(std::move(s), std::get<Jreq>(d.msg), cfg_));
    }
  }

  void fire(const Event::TimerFire& f) {
    NodeState& s = result_.finalStates[f.node];
    if (f.kind == TimerKind::ChAdWait) {
      result_.coveredAtFirstWave[f.node] = !s.chTable.empty();
      apply(f.node, on_ch_ad_wait_expired(std::move(s), cfg_));
    } else {
      Transition t{on_jreq_wait_expired(std::move(s)), {}, {}};
      apply(f.node, std::move(t));
    }
  }

  void apply(NodeId id, Transition t) {
    NodeState& slot = result_.finalStates[id];
    const NodeStatus before = slot.status;
    slot = std::move(t.state);
    if (is_terminated(slot.status) && !is_terminated(before))
      result_.nodeTerminationTime[id] = now_;
    for (auto& msg : t.outbound) transmit(id, std::move(msg));
    for (const auto& timer : t.timers) push(now_ + timer.duration, Event::TimerFire{id, timer.kind});
  }

  // One radio transmission per outbound message; copies are dropped
  // independently per receiver.
  void transmit(NodeId from, Message msg) {
    SimTime at = now_ + cfg_.tHop;
    if (jitterMax_ > 0.0) at += channelRng_.uniform(0.0, jitterMax_);
    if (std::holds_alternative<ChAd>(msg)) {
      ++result_.msgCounts.chad;
      ++result_.perNode[from].chad;
      const auto nbrs = topo_.neighbors(from);
      for (NodeId to : nbrs) {
        if (dropped()) continue;
        push(at, Event::Deliver{to, msg});
      }
    } else {
      ++result_.msgCounts.jreq;
      ++result_.perNode[from].jreq;
      const NodeId to = std::get<Jreq>(msg).rid;
      if (!topo_.adjacent(from, to))
        throw std::logic_error("run_simulation: join request addressed to a non-neighbour");
      if (!dropped()) push(at, Event::Deliver{to, std::move(msg)});
    }
  }

  bool dropped() {
    if (per_ <= 0.0) return false;
    if (channelRng_.uniform() < per_) {
      ++result_.dropCount;
      return true;
    }
    return false;
  }

  template <typename Kind>
  void push(SimTime at, Kind kind) {
    queue_.push(Event{at, seq_++, std::move(kind)});
  }

  const SimConfig& cfg_;
  const Topology& topo_;
  RandomStream channelRng_;
  double per_;
  double jitterMax_;
  std::uint64_t maxEvents_;
  SimTime now_ = 0.0;
  std::uint64_t seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  SimResult result_;
};

}  // namespace detail

/// Runs one replication with explicit election coins (one per node).
inline SimResult run_simulation(const SimConfig& cfg, const Topology& topo,
                                std::span<const double> coins, RandomStream channelRng,
                                std::uint64_t maxEvents = kMaxEvents) {
  return detail::Simulator(cfg, topo, std::move(channelRng), maxEvents).run(coins);
}

/// Runs one replication; coins and channel noise come from separate
/// substreams of `rng` so loss never perturbs the election.
inline SimResult run_simulation(const SimConfig& cfg, const Topology& topo, RandomStream& rng) {
  RandomStream coinRng = rng.substream(Substream::Coins);
  std::vector<double> coins(topo.size());
  for (double& c : coins) c = coinRng.uniform();
  return run_simulation(cfg, topo, coins, rng.substream(Substream::Channel));
}

struct MessageSummary {
  std::uint64_t chadTotal = 0;
  std::uint64_t jreqTotal = 0;
  double perNodeMean = 0.0;
};

inline MessageSummary count_messages(const SimResult& result) {
  MessageSummary m{result.msgCounts.chad, result.msgCounts.jreq, 0.0};
  if (result.node_count() > 0)
    m.perNodeMean = static_cast<double>(m.chadTotal + m.jreqTotal) /
                    static_cast<double>(result.node_count());
  return m;
}

}  // namespace koca
