#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

// Closed-form predictors for cluster size, overlap and message overhead
// under the circular-cluster approximation R = k * Tr. They are upper bounds
// for hop-limited clusters in a bounded area.

namespace koca::analysis {

inline double avg_node_degree(double n, double l, double txRange) {
  if (!(n > 0.0) || !(l > 0.0) || txRange < 0.0)
    throw std::domain_error("avg_node_degree: invalid input");
  return n * std::numbers::pi * txRange * txRange / (l * l);
}

struct Probability {
  double value = 0.0;
  bool clamped = false;  // the raw value exceeded 1
};

/// Probability that a node falls inside a given cluster, d*k^2/n.
inline Probability cluster_inclusion_prob(double d, int k, double n) {
  if (k < 1) throw std::domain_error("cluster_inclusion_prob: k must be >= 1");
  if (!(d > 0.0) || !(n > 0.0)) throw std::domain_error("cluster_inclusion_prob: invalid input");
  const double raw = d * k * k / n;
  return raw > 1.0 ? Probability{1.0, true} : Probability{raw, false};
}

inline double expected_cluster_size(double d, int k) {
  if (k < 1 || !(d > 0.0)) throw std::domain_error("expected_cluster_size: invalid input");
  return d * k * k;
}

/// Expected number of nodes exactly k hops from the head.
inline double ring_population(double d, int k) {
  if (k < 1) throw std::domain_error("ring_population: k must be >= 1");
  return d * (2.0 * k - 1.0);
}

/// Non-leaf nodes of the breadth-first advertisement tree, 1 + d(k-1)^2.
inline double expected_chad_msgs(double d, int k) {
  if (k < 1) throw std::domain_error("expected_chad_msgs: k must be >= 1");
  return 1.0 + d * (k - 1.0) * (k - 1.0);
}

/// Join-request hop transmissions per cluster without aggregation.
inline double expected_jreq_msgs(double d, int k) {
  if (k < 1) throw std::domain_error("expected_jreq_msgs: k must be >= 1");
  return d * k * (4.0 * k - 1.0) * (k + 1.0) / 6.0;
}

/// The same quantity as an explicit ring sum, sum_i i * n_i.
inline double expected_jreq_msgs_by_rings(double d, int k) {
  if (k < 1) throw std::domain_error("expected_jreq_msgs_by_rings: k must be >= 1");
  double total = 0.0;
  for (int i = 1; i <= k; ++i) total += i * ring_population(d, i);
  return total;
}

struct Overhead {
  double perCluster = 0.0;
  double network = 0.0;
  double perNode = 0.0;
};

inline Overhead overhead(double d, double p, int k, double n) {
  if (!(n > 0.0)) throw std::domain_error("overhead: n must be positive");
  Overhead o;
  if (p == 0.0) return o;  // no clusters, no traffic
  o.perCluster = expected_chad_msgs(d, k) + expected_jreq_msgs(d, k);
  o.network = o.perCluster * n * p;
  o.perNode = o.network / n;
  return o;
}

/// Lens area of two radius-R disks whose centres are w apart.
inline double intersection_area(double R, double w) {
  if (w < 0.0 || !(R > 0.0)) throw std::domain_error("intersection_area: invalid input");
  if (w >= 2.0 * R) return 0.0;
  const double theta = std::acos(w / (2.0 * R));
  return (2.0 * theta - std::sin(2.0 * theta)) * R * R;
}

/// Lens area averaged over centre distance w with density w / (2R^2) on [0, 2R].
inline double expected_intersection_area(double R) {
  if (!(R > 0.0)) throw std::domain_error("expected_intersection_area: R must be positive");
  auto integrand = [R](double w) { return intersection_area(R, w) * w / (2.0 * R * R); };
  double error = 0.0;
  constexpr double tol = 1e-12;  // relative; the lens area is smooth except at w = 2R
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, 0.0, 2.0 * R, 20, tol, &error);
  return value;
}

/// Inputs shared by the predictors; density and cluster radius are derived.
struct AnalyticalInputs {
  double n = 0.0;
  double l = 0.0;
  double txRange = 0.0;
  int k = 1;
  double p = 0.0;

  double density() const { return n / (l * l); }
  double degree() const { return avg_node_degree(n, l, txRange); }
  double cluster_radius() const { return k * txRange; }
};

inline double aod_predicted(const AnalyticalInputs& in) {
  return expected_intersection_area(in.cluster_radius()) * in.density();
}

struct AdjacentClusters {
  double exact = 0.0;       // P_2R * (np - 1), P_2R clamped to 1
  double simplified = 0.0;  // 4 p d k^2
  bool clamped = false;
};

inline AdjacentClusters expected_adjacent_clusters(double n, double p, double d, int k, double l,
                                                   double txRange) {
  if (k < 1 || !(n > 0.0) || !(l > 0.0)) throw std::domain_error("expected_adjacent_clusters");
  const double R = k * txRange;
  double p2r = 4.0 * std::numbers::pi * R * R / (l * l);
  AdjacentClusters out;
  if (p2r > 1.0) {
    p2r = 1.0;
    out.clamped = true;
  }
  out.exact = std::max(0.0, p2r * (n * p - 1.0));
  out.simplified = 4.0 * p * d * k * k;
  return out;
}

struct AnalyticalReport {
  double expectedClusterSize = 0.0;
  double pC = 0.0;
  bool pCClamped = false;
  double ringPop = 0.0;
  double mChad = 0.0;
  double mJreq = 0.0;
  double mCluster = 0.0;
  double mNetwork = 0.0;
  double mNode = 0.0;
  double aodPredicted = 0.0;
  double expectedIntersectionArea = 0.0;
  double expectedAdjacentClusters = 0.0;
  double expectedAdjacentClustersSimplified = 0.0;
};

inline AnalyticalReport predict(const AnalyticalInputs& in) {
  AnalyticalReport r;
  const double d = in.degree();
  r.expectedClusterSize = expected_cluster_size(d, in.k);
  const auto pc = cluster_inclusion_prob(d, in.k, in.n);
  r.pC = pc.value;
  r.pCClamped = pc.clamped;
  r.ringPop = ring_population(d, in.k);
  r.mChad = expected_chad_msgs(d, in.k);
  r.mJreq = expected_jreq_msgs(d, in.k);
  const auto o = overhead(d, in.p, in.k, in.n);
  r.mCluster = r.mChad + r.mJreq;
  r.mNetwork = o.network;
  r.mNode = o.perNode;
  r.expectedIntersectionArea = expected_intersection_area(in.cluster_radius());
  r.aodPredicted = r.expectedIntersectionArea * in.density();
  const auto adj = expected_adjacent_clusters(in.n, in.p, d, in.k, in.l, in.txRange);
  r.expectedAdjacentClusters = adj.exact;
  r.expectedAdjacentClustersSimplified = adj.simplified;
  return r;
}

}  // namespace koca::analysis
