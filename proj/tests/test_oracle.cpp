#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "koca/analysis.hpp"
#include "koca/engine.hpp"
#include "koca/metrics.hpp"
#include "koca/oracle.hpp"

using namespace koca;
using namespace koca::oracle;

namespace {

Topology line(std::size_t n) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({5.0 + static_cast<double>(i), 5.0});
  return Topology(std::move(pts), 1.2, 100.0);
}

ClusterView clusters(std::vector<std::pair<NodeId, std::vector<NodeId>>> lists) {
  ClusterView v;
  for (auto& [head, members] : lists) {
    std::sort(members.begin(), members.end());
    v.clusters.push_back({head, members, {}});
  }
  return v;
}

std::vector<NodeId> heads_of(const SimResult& r) {
  std::vector<NodeId> out;
  for (const auto& s : r.finalStates)
    if (is_head(s.status)) out.push_back(s.nid);
  return out;
}

}  // namespace

TEST(Coverage, EveryNodeAHead) {
  const Topology t = line(6);
  EXPECT_TRUE(verify_coverage(t, {0, 1, 2, 3, 4, 5}, 1).covered);
}

TEST(Coverage, PathWitness) {
  const auto c = verify_coverage(line(4), {0}, 2);
  EXPECT_FALSE(c.covered);
  ASSERT_TRUE(c.witness.has_value());
  EXPECT_EQ(*c.witness, 3u);
}

TEST(Coverage, AgreesWithEngineWhenLateHeadsIncluded) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    SimConfig cfg;
    cfg.n = 150;
    cfg.dTarget = 8;
    cfg.k = 2;
    RandomStream rng(seed);
    RandomStream topoRng = rng.substream(Substream::Topology);
    const Topology t = generate_topology(cfg, topoRng);
    const SimResult r = run_simulation(cfg, t, rng);
    EXPECT_TRUE(verify_coverage(t, heads_of(r), cfg.k).covered) << "seed " << seed;
  }
}

TEST(OverlapCondition, SingleClusterIsVacuous) {
  EXPECT_TRUE(verify_overlap_condition(clusters({{0, {0, 1, 2}}}), 5));
}

TEST(OverlapCondition, Threshold) {
  const ClusterView v = clusters({{0, {0, 1, 2, 3}}, {9, {9, 1, 2, 3}}});
  EXPECT_TRUE(verify_overlap_condition(v, 3));
  EXPECT_FALSE(verify_overlap_condition(v, 4));
}

TEST(OverlapCondition, MatchesOverlapDegrees) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SimConfig cfg;
    cfg.n = 200;
    cfg.dTarget = 7;
    cfg.k = 1;
    RandomStream rng(seed);
    RandomStream topoRng = rng.substream(Substream::Topology);
    const Topology t = generate_topology(cfg, topoRng);
    const ClusterView v = build_cluster_view(run_simulation(cfg, t, rng));
    for (int o : {1, 2, 3}) {
      std::map<NodeId, std::size_t> best;
      for (const auto& p : overlap_degrees(v)) {
        best[p.a] = std::max(best[p.a], p.degree);
        best[p.b] = std::max(best[p.b], p.degree);
      }
      bool expected = v.clusters.size() <= 1;
      if (!expected) {
        expected = true;
        for (const auto& c : v.clusters)
          if (best[c.head] < static_cast<std::size_t>(o)) expected = false;
      }
      EXPECT_EQ(verify_overlap_condition(v, o), expected);
    }
  }
}

TEST(Connectivity, EdgelessPairIsDisconnected) {
  EXPECT_FALSE(verify_connectivity(clusters({{0, {0}}, {1, {1}}})));
}

TEST(Connectivity, Triangle) {
  EXPECT_TRUE(verify_connectivity(clusters({{0, {0, 5}}, {1, {1, 5, 6}}, {2, {2, 6}}})));
}

TEST(Connectivity, EqualsFullConnectivityRatio) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SimConfig cfg;
    cfg.n = 200;
    cfg.dTarget = 10;
    cfg.k = 2;
    RandomStream rng(seed);
    RandomStream topoRng = rng.substream(Substream::Topology);
    const Topology t = generate_topology(cfg, topoRng);
    const ClusterView v = build_cluster_view(run_simulation(cfg, t, rng));
    const double cr = connectivity_ratio(induced_overlap_graph(v));
    EXPECT_EQ(verify_connectivity(v), cr == 1.0) << "seed " << seed;
  }
}

TEST(Mkds, CompleteGraph) {
  std::vector<Point> pts;
  for (int i = 0; i < 7; ++i) pts.push_back({10.0 + 0.1 * i, 10.0});
  EXPECT_EQ(exhaustive_mkds(Topology(pts, 5, 100), 1), 1u);
}

TEST(Mkds, PathOfFive) {
  const Topology t = line(5);
  EXPECT_EQ(exhaustive_mkds(t, 1), 2u);
  EXPECT_TRUE(verify_coverage(t, {1, 3}, 1).covered);
  EXPECT_EQ(exhaustive_mkds(t, 2), 1u);
}

TEST(Mkds, IsolatedNodesNeedThemselves) {
  EXPECT_EQ(exhaustive_mkds(Topology({{1, 1}, {50, 50}, {90, 90}}, 2, 100), 3), 3u);
}

TEST(Mkds, SizeGuard) {
  EXPECT_THROW(exhaustive_mkds(line(16), 1), SizeLimit);
}

TEST(Mkds, ProtocolHeadsNeverBeatTheMinimum) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SimConfig cfg;
    cfg.n = 12;
    cfg.txRange = 35;
    cfg.k = 1 + static_cast<int>(seed % 2);
    RandomStream rng(seed);
    RandomStream topoRng = rng.substream(Substream::Topology);
    const Topology t = generate_topology(cfg, topoRng);
    const SimResult r = run_simulation(cfg, t, rng);
    EXPECT_GE(heads_of(r).size(), exhaustive_mkds(t, cfg.k));
  }
}

TEST(MonteCarlo, FullOverlap) {
  RandomStream rng(1);
  const auto e = monte_carlo_intersection(1.0, 0.0, 1'000'000, rng);
  EXPECT_NEAR(e.area, std::numbers::pi, 3 * e.standardError);
}

TEST(MonteCarlo, Disjoint) {
  RandomStream rng(1);
  const auto e = monte_carlo_intersection(1.0, 2.0, 1000, rng);
  EXPECT_EQ(e.area, 0.0);
}

TEST(MonteCarlo, UnitDistanceLens) {
  RandomStream rng(2);
  const auto e = monte_carlo_intersection(1.0, 1.0, 1'000'000, rng);
  const double exact = analysis::intersection_area(1.0, 1.0);
  EXPECT_NEAR(e.area, exact, 3 * e.standardError);
  EXPECT_NEAR(e.area / exact, 1.0, 1e-2);
}

TEST(MonteCarlo, RejectsBadInput) {
  RandomStream rng(2);
  EXPECT_THROW(monte_carlo_intersection(0.0, 1.0, 10, rng), std::domain_error);
  EXPECT_THROW(monte_carlo_intersection(1.0, -1.0, 10, rng), std::domain_error);
}
