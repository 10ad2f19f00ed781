#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "koca/config.hpp"
#include "koca/rng.hpp"

namespace koca {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Inverse of the average-degree relation d = n*pi*Tr^2 / l^2.
inline double tx_range_for_degree(double n, double l, double dTarget) {
  if (!(n > 0.0) || !(l > 0.0) || !(dTarget > 0.0))
    throw std::domain_error("tx_range_for_degree: inputs must be positive");
  return std::sqrt(dTarget * l * l / (n * std::numbers::pi));
}

inline double resolved_tx_range(const SimConfig& cfg) {
  if (cfg.txRange) return *cfg.txRange;
  if (cfg.dTarget) return tx_range_for_degree(static_cast<double>(cfg.n), cfg.l, *cfg.dTarget);
  throw ConfigError("tx-range", "neither tx-range nor d given");
}

/// Immutable unit-disk graph over nodes 0..n-1. Two distinct nodes are
/// neighbours iff their distance is <= the transmission range.
class Topology {
 public:
  Topology(std::vector<Point> positions, double txRange, double side, bool wrapArea = false)
      : positions_(std::move(positions)),
        txRange_(txRange),
        side_(side),
        wrap_(wrapArea),
        adjacency_(positions_.size()) {
    const double r2 = txRange_ * txRange_;
    const std::size_t n = positions_.size();
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        if (squared_distance(positions_[u], positions_[v]) <= r2) {
          adjacency_[u].push_back(static_cast<NodeId>(v));
          adjacency_[v].push_back(static_cast<NodeId>(u));
        }
      }
    }
    // u ascends in the outer loop, so every list is already sorted.
  }

  std::size_t size() const noexcept { return positions_.size(); }
  double tx_range() const noexcept { return txRange_; }
  double side() const noexcept { return side_; }
  bool wraps() const noexcept { return wrap_; }

  std::span<const Point> positions() const noexcept { return positions_; }
  const Point& position(NodeId u) const { return positions_.at(u); }

  std::span<const NodeId> neighbors(NodeId u) const { return adjacency_.at(u); }

  bool adjacent(NodeId u, NodeId v) const {
    const auto& adj = adjacency_.at(u);
    return std::binary_search(adj.begin(), adj.end(), v);
  }

  double avg_degree() const {
    if (positions_.empty()) return 0.0;
    std::size_t total = 0;
    for (const auto& adj : adjacency_) total += adj.size();
    return static_cast<double>(total) / static_cast<double>(positions_.size());
  }

  bool is_connected() const {
    if (positions_.empty()) return true;
    std::vector<bool> seen(positions_.size(), false);
    std::vector<NodeId> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : adjacency_[u]) {
        if (!seen[v]) {
          seen[v] = true;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == positions_.size();
  }

  double squared_distance(const Point& a, const Point& b) const {
    double dx = std::abs(a.x - b.x);
    double dy = std::abs(a.y - b.y);
    if (wrap_) {
      dx = std::min(dx, side_ - dx);
      dy = std::min(dy, side_ - dy);
    }
    return dx * dx + dy * dy;
  }

 private:
  std::vector<Point> positions_;
  double txRange_;
  double side_;
  bool wrap_;
  std::vector<std::vector<NodeId>> adjacency_;
};

/// Places cfg.n nodes i.i.d. uniformly on [0, l]^2.
inline Topology generate_topology(const SimConfig& cfg, RandomStream& rng) {
  std::vector<Point> positions(cfg.n);
  for (auto& pt : positions) {
    pt.x = rng.uniform(0.0, cfg.l);
    pt.y = rng.uniform(0.0, cfg.l);
  }
  return Topology(std::move(positions), resolved_tx_range(cfg), cfg.l, cfg.wrapArea);
}

/// Hop distances from `source` to every node at most `maxHops` away.
inline std::map<NodeId, int> bfs_hops(const Topology& topo, NodeId source, int maxHops) {
  if (source >= topo.size()) throw std::out_of_range("bfs_hops: source out of range");
  std::map<NodeId, int> dist{{source, 0}};
  std::deque<NodeId> frontier{source};
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    const int du = dist[u];
    if (du >= maxHops) continue;
    for (NodeId v : topo.neighbors(u)) {
      if (dist.emplace(v, du + 1).second) frontier.push_back(v);
    }
  }
  return dist;
}

}  // namespace koca
