#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "koca/metrics.hpp"
#include "koca/rng.hpp"
#include "koca/topology.hpp"

// Brute-force checkers. They read only the graph and final membership and
// keep their own traversal code, so they stay independent of the protocol
// and metric implementations they cross-check.

namespace koca::oracle {

namespace detail {

// Multi-source BFS; -1 marks nodes farther than maxHops from every source.
inline std::vector<int> hop_distance_from_set(const Topology& topo,
                                              const std::vector<NodeId>& sources, int maxHops) {
  std::vector<int> dist(topo.size(), -1);
  std::queue<NodeId> q;
  for (NodeId s : sources) {
    if (s >= topo.size()) throw std::out_of_range("oracle: node id out of range");
    if (dist[s] != 0) {
      dist[s] = 0;
      q.push(s);
    }
  }
  while (!q.empty()) {
    const NodeId u = q.front();
    q.pop();
    if (dist[u] == maxHops) continue;
    for (NodeId v : topo.neighbors(u)) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    }
  }
  return dist;
}

inline std::size_t sorted_intersection_size(const std::vector<NodeId>& a,
                                            const std::vector<NodeId>& b) {
  std::size_t i = 0, j = 0, count = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

inline std::vector<NodeId> sorted_members(const Cluster& c) {
  std::vector<NodeId> m = c.members;
  std::sort(m.begin(), m.end());
  return m;
}

}  // namespace detail

struct CoverageCheck {
  bool covered = false;
  std::optional<NodeId> witness;  // first node with no head within k hops
};

inline CoverageCheck verify_coverage(const Topology& topo, const std::vector<NodeId>& heads,
                                     int k) {
  const auto dist = detail::hop_distance_from_set(topo, heads, k);
  for (std::size_t u = 0; u < dist.size(); ++u) {
    if (dist[u] < 0) return {false, static_cast<NodeId>(u)};
  }
  return {true, std::nullopt};
}

/// Every head has another head sharing at least `o` members. Holds
/// vacuously for a single cluster.
inline bool verify_overlap_condition(const ClusterView& view, int o) {
  if (view.clusters.size() <= 1) return true;
  std::vector<std::vector<NodeId>> members;
  for (const auto& c : view.clusters) members.push_back(detail::sorted_members(c));
  for (std::size_t a = 0; a < members.size(); ++a) {
    bool found = false;
    for (std::size_t b = 0; b < members.size() && !found; ++b) {
      if (a != b && detail::sorted_intersection_size(members[a], members[b]) >=
                        static_cast<std::size_t>(o))
        found = true;
    }
    if (!found) return false;
  }
  return true;
}

/// The overlap graph on heads forms a single component.
inline bool verify_connectivity(const ClusterView& view) {
  const std::size_t n = view.clusters.size();
  if (n == 0) return false;
  std::vector<std::vector<NodeId>> members;
  for (const auto& c : view.clusters) members.push_back(detail::sorted_members(c));
  std::vector<bool> reached(n, false);
  std::vector<std::size_t> stack{0};
  reached[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t a = stack.back();
    stack.pop_back();
    for (std::size_t b = 0; b < n; ++b) {
      if (!reached[b] && detail::sorted_intersection_size(members[a], members[b]) > 0) {
        reached[b] = true;
        ++count;
        stack.push_back(b);
      }
    }
  }
  return count == n;
}

class SizeLimit : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline constexpr std::size_t kMaxExhaustiveNodes = 15;

/// Size of a minimum k-dominating set by enumeration in increasing
/// cardinality (lexicographic within a cardinality).
inline std::size_t exhaustive_mkds(const Topology& topo, int k) {
  const std::size_t n = topo.size();
  if (n > kMaxExhaustiveNodes) throw SizeLimit("exhaustive_mkds: at most 15 nodes");
  if (n == 0) return 0;
  // ball[u] = bitmask of nodes within k hops of u
  std::vector<std::uint32_t> ball(n, 0);
  for (std::size_t u = 0; u < n; ++u) {
    const auto dist = detail::hop_distance_from_set(topo, {static_cast<NodeId>(u)}, k);
    for (std::size_t v = 0; v < n; ++v)
      if (dist[v] >= 0) ball[u] |= 1u << v;
  }
  const std::uint32_t all = n == 32 ? ~0u : ((1u << n) - 1u);
  for (std::size_t size = 1; size <= n; ++size) {
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) idx[i] = i;
    while (true) {
      std::uint32_t cover = 0;
      for (std::size_t i : idx) cover |= ball[i];
      if (cover == all) return size;
      // next combination
      std::size_t i = size;
      while (i > 0 && idx[i - 1] == n - size + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return n;
}

struct AreaEstimate {
  double area = 0.0;
  double standardError = 0.0;
};

/// Rejection-sampling estimate of the lens area of two radius-R disks with
/// centres (0,0) and (w,0), sampled over the lens bounding box.
inline AreaEstimate monte_carlo_intersection(double R, double w, std::size_t samples,
                                             RandomStream& rng) {
  if (!(R > 0.0) || w < 0.0 || samples == 0)
    throw std::domain_error("monte_carlo_intersection: invalid input");
  if (w >= 2.0 * R) return {0.0, 0.0};
  const double x0 = w - R, x1 = R, y0 = -R, y1 = R;
  const double box = (x1 - x0) * (y1 - y0);
  const double r2 = R * R;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = rng.uniform(x0, x1);
    const double y = rng.uniform(y0, y1);
    const bool inA = x * x + y * y <= r2;
    const bool inB = (x - w) * (x - w) + y * y <= r2;
    if (inA && inB) ++hits;
  }
  const double frac = static_cast<double>(hits) / static_cast<double>(samples);
  return {frac * box, box * std::sqrt(frac * (1.0 - frac) / static_cast<double>(samples))};
}

}  // namespace koca::oracle
