#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "koca/engine.hpp"
#include "koca/protocol.hpp"

namespace koca {

/// A cluster as its head knows it after formation.
struct Cluster {
  NodeId head = 0;
  std::vector<NodeId> members;  // sorted, includes the head
  std::map<NodeId, std::vector<NodeId>> boundary;  // adjacent head -> boundary nodes
};

struct ClusterView {
  std::size_t nodeCount = 0;
  std::vector<Cluster> clusters;  // ordered by head id
};

/// Membership comes from registrations recorded at heads, never from what
/// ordinary nodes merely heard. A cluster of head A holds A, every node
/// whose join request reached A, and every other head H that lists itself
/// as a boundary node towards A in H's own adjacent-cluster table (heads
/// do not send join requests; hearing A's advertisement registers them
/// there instead).
inline ClusterView build_cluster_view(const SimResult& result) {
  ClusterView view;
  view.nodeCount = result.node_count();
  std::map<NodeId, std::size_t> slot;
  for (const NodeState& s : result.finalStates) {
    if (!is_head(s.status)) continue;
    Cluster c;
    c.head = s.nid;
    c.members.assign(s.lcg.vertices.begin(), s.lcg.vertices.end());
    c.members.push_back(s.nid);
    for (const auto& ac : s.acTable) {
      auto& nodes = c.boundary[ac.chid];
      for (const auto& [node, cost] : ac.boundaryNodes) nodes.push_back(node);
      std::sort(nodes.begin(), nodes.end());
    }
    slot[s.nid] = view.clusters.size();
    view.clusters.push_back(std::move(c));
  }
  for (const NodeState& s : result.finalStates) {
    if (!is_head(s.status)) continue;
    for (const auto& ac : s.acTable) {
      const bool self = std::any_of(ac.boundaryNodes.begin(), ac.boundaryNodes.end(),
                                    [&](const auto& b) { return b.first == s.nid; });
      auto it = slot.find(ac.chid);
      if (self && it != slot.end()) view.clusters[it->second].members.push_back(s.nid);
    }
  }
  for (Cluster& c : view.clusters) {
    std::sort(c.members.begin(), c.members.end());
    c.members.erase(std::unique(c.members.begin(), c.members.end()), c.members.end());
  }
  return view;
}

inline double coverage(const SimResult& result) { return result.coverageAtFirstWave; }

struct OverlapPair {
  NodeId a = 0;  // a < b
  NodeId b = 0;
  std::size_t degree = 0;

  friend bool operator==(const OverlapPair&, const OverlapPair&) = default;
};

/// Shared-member counts for every pair of clusters that overlap at all.
inline std::vector<OverlapPair> overlap_degrees(const ClusterView& view) {
  std::map<NodeId, std::vector<NodeId>> headsOf;
  for (const Cluster& c : view.clusters)
    for (NodeId m : c.members) headsOf[m].push_back(c.head);
  std::map<std::pair<NodeId, NodeId>, std::size_t> counts;
  for (auto& [node, heads] : headsOf) {
    std::sort(heads.begin(), heads.end());
    for (std::size_t i = 0; i < heads.size(); ++i)
      for (std::size_t j = i + 1; j < heads.size(); ++j) ++counts[{heads[i], heads[j]}];
  }
  std::vector<OverlapPair> out;
  out.reserve(counts.size());
  for (const auto& [pair, degree] : counts) out.push_back({pair.first, pair.second, degree});
  return out;
}

/// Mean and coefficient of variation (population stdev / mean).
struct DispersionStats {
  double mean = 0.0;
  double normStdev = 0.0;
};

template <typename T>
DispersionStats dispersion(std::span<const T> values) {
  if (values.empty()) throw std::invalid_argument("dispersion: empty sample");
  double sum = 0.0;
  for (const T& v : values) sum += static_cast<double>(v);
  const double mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (const T& v : values) {
    const double d = static_cast<double>(v) - mean;
    sq += d * d;
  }
  const double sd = std::sqrt(sq / static_cast<double>(values.size()));
  return {mean, mean > 0.0 ? sd / mean : 0.0};
}

/// Average overlapping degree; nullopt when no two clusters overlap.
inline std::optional<DispersionStats> aod(const ClusterView& view) {
  const auto pairs = overlap_degrees(view);
  if (pairs.empty()) return std::nullopt;
  std::vector<std::size_t> degrees;
  degrees.reserve(pairs.size());
  for (const auto& p : pairs) degrees.push_back(p.degree);
  return dispersion<std::size_t>(degrees);
}

/// Graph on cluster heads, edge iff the clusters share a member.
struct OverlapGraph {
  std::vector<NodeId> heads;                     // sorted
  std::vector<std::vector<std::size_t>> adjacency;  // indices into heads

  std::size_t index_of(NodeId head) const {
    auto it = std::lower_bound(heads.begin(), heads.end(), head);
    if (it == heads.end() || *it != head) throw std::out_of_range("OverlapGraph: unknown head");
    return static_cast<std::size_t>(it - heads.begin());
  }
  std::size_t edge_count() const {
    std::size_t total = 0;
    for (const auto& a : adjacency) total += a.size();
    return total / 2;
  }
};

inline OverlapGraph induced_overlap_graph(const ClusterView& view) {
  OverlapGraph g;
  for (const Cluster& c : view.clusters) g.heads.push_back(c.head);
  std::sort(g.heads.begin(), g.heads.end());
  g.adjacency.resize(g.heads.size());
  for (const auto& p : overlap_degrees(view)) {
    const std::size_t a = g.index_of(p.a);
    const std::size_t b = g.index_of(p.b);
    g.adjacency[a].push_back(b);
    g.adjacency[b].push_back(a);
  }
  return g;
}

/// Largest connected component of the overlap graph over the head count.
inline double connectivity_ratio(const OverlapGraph& g) {
  const std::size_t n = g.heads.size();
  if (n == 0) throw std::invalid_argument("connectivity_ratio: no cluster heads");
  std::vector<bool> seen(n, false);
  std::size_t best = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::size_t size = 0;
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      ++size;
      for (std::size_t v : g.adjacency[u]) {
        if (!seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    best = std::max(best, size);
  }
  return static_cast<double>(best) / static_cast<double>(n);
}

inline DispersionStats cluster_size_stats(const ClusterView& view) {
  if (view.clusters.empty()) throw std::invalid_argument("cluster_size_stats: no clusters");
  std::vector<std::size_t> sizes;
  sizes.reserve(view.clusters.size());
  for (const Cluster& c : view.clusters) sizes.push_back(c.members.size());
  return dispersion<std::size_t>(sizes);
}

struct MetricsReport {
  double cn = 0.0;
  double aodMean = std::numeric_limits<double>::quiet_NaN();  // NaN: no overlapping pair
  double aodNormStdev = std::numeric_limits<double>::quiet_NaN();
  double cr = 0.0;
  double clusterSizeMean = 0.0;
  double clusterSizeNormStdev = 0.0;
  double numClusters = 0.0;
  double msgChad = 0.0;
  double msgJreq = 0.0;
  double msgTotal = 0.0;
  double msgPerNode = 0.0;
  double terminationTime = 0.0;
};

inline MetricsReport compute_metrics(const SimResult& result) {
  const ClusterView view = build_cluster_view(result);
  MetricsReport r;
  r.cn = coverage(result);
  if (auto a = aod(view)) {
    r.aodMean = a->mean;
    r.aodNormStdev = a->normStdev;
  }
  r.cr = connectivity_ratio(induced_overlap_graph(view));
  const auto sizes = cluster_size_stats(view);
  r.clusterSizeMean = sizes.mean;
  r.clusterSizeNormStdev = sizes.normStdev;
  r.numClusters = static_cast<double>(view.clusters.size());
  const auto msgs = count_messages(result);
  r.msgChad = static_cast<double>(msgs.chadTotal);
  r.msgJreq = static_cast<double>(msgs.jreqTotal);
  r.msgTotal = r.msgChad + r.msgJreq;
  r.msgPerNode = msgs.perNodeMean;
  r.terminationTime = result.terminationTime;
  return r;
}

/// Replication aggregate. `mean` averages every per-run metric (the
/// per-run dispersion columns included); the across-run fields give the
/// coefficient of variation of the per-run means.
struct AggregateReport {
  MetricsReport mean;
  std::size_t reps = 0;
  std::size_t repsWithOverlap = 0;
  double aodAcrossRunNormStdev = std::numeric_limits<double>::quiet_NaN();
  double clusterSizeAcrossRunNormStdev = 0.0;
};

inline AggregateReport aggregate(std::span<const MetricsReport> runs) {
  if (runs.empty()) throw std::invalid_argument("aggregate: no runs");
  AggregateReport agg;
  agg.reps = runs.size();
  auto avg = [&](auto field) {
    std::vector<double> v;
    for (const auto& r : runs)
      if (!std::isnan(r.*field)) v.push_back(r.*field);
    return v;
  };
  auto meanOf = [](const std::vector<double>& v) {
    return v.empty() ? std::numeric_limits<double>::quiet_NaN()
                     : dispersion<double>(v).mean;
  };
  MetricsReport& m = agg.mean;
  m.cn = meanOf(avg(&MetricsReport::cn));
  const auto aods = avg(&MetricsReport::aodMean);
  agg.repsWithOverlap = aods.size();
  m.aodMean = meanOf(aods);
  m.aodNormStdev = meanOf(avg(&MetricsReport::aodNormStdev));
  if (!aods.empty()) agg.aodAcrossRunNormStdev = dispersion<double>(aods).normStdev;
  m.cr = meanOf(avg(&MetricsReport::cr));
  const auto sizes = avg(&MetricsReport::clusterSizeMean);
  m.clusterSizeMean = meanOf(sizes);
  agg.clusterSizeAcrossRunNormStdev = dispersion<double>(sizes).normStdev;
  m.clusterSizeNormStdev = meanOf(avg(&MetricsReport::clusterSizeNormStdev));
  m.numClusters = meanOf(avg(&MetricsReport::numClusters));
  m.msgChad = meanOf(avg(&MetricsReport::msgChad));
  m.msgJreq = meanOf(avg(&MetricsReport::msgJreq));
  m.msgTotal = meanOf(avg(&MetricsReport::msgTotal));
  m.msgPerNode = meanOf(avg(&MetricsReport::msgPerNode));
  m.terminationTime = meanOf(avg(&MetricsReport::terminationTime));
  return agg;
}

}  // namespace koca
