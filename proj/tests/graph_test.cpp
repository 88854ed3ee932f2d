#include <random>

#include <gtest/gtest.h>

#include "support/instances.hpp"
#include "vibnet/errors.hpp"
#include "vibnet/graph.hpp"

using namespace vibnet;
namespace vt = vibnet::testing;

namespace {

// 1-based edge set for fixtures.
DirectedGraph graph1(int n, std::initializer_list<std::pair<int, int>> edges) {
  EdgeSet set;
  for (auto [a, b] : edges) set.insert({a - 1, b - 1});
  return DirectedGraph(n, set);
}

EdgeSet edges1(std::initializer_list<std::pair<int, int>> edges) {
  EdgeSet set;
  for (auto [a, b] : edges) set.insert({a - 1, b - 1});
  return set;
}

}  // namespace

TEST(Bidirected, FindsReciprocalPairs) {
  const auto g = graph1(3, {{1, 2}, {2, 1}, {2, 3}});
  EXPECT_EQ(bidirected_edges(g), edges1({{1, 2}, {2, 1}}));
  EXPECT_TRUE(bidirected_edges(graph1(3, {{1, 2}, {2, 3}})).empty());
  const auto triangle =
      graph1(3, {{1, 2}, {2, 1}, {2, 3}, {3, 2}, {1, 3}, {3, 1}});
  EXPECT_EQ(bidirected_edges(triangle).size(), 6u);
}

TEST(Residual, RemovesBidirectedEdges) {
  EXPECT_EQ(unidirected_residual(graph1(3, {{1, 2}, {2, 1}, {2, 3}})).edges(),
            edges1({{2, 3}}));
  const auto triangle =
      graph1(3, {{1, 2}, {2, 1}, {2, 3}, {3, 2}, {1, 3}, {3, 1}});
  EXPECT_TRUE(unidirected_residual(triangle).edges().empty());
  const auto dag = graph1(4, {{1, 2}, {1, 3}, {2, 3}, {3, 4}});
  EXPECT_EQ(unidirected_residual(dag), dag);
}

TEST(IsDag, ChainGivesOrder) {
  const auto check = is_dag(graph1(3, {{1, 2}, {2, 3}}));
  EXPECT_TRUE(check.acyclic);
  EXPECT_EQ(check.witness, (std::vector<int>{0, 1, 2}));
}

TEST(IsDag, TwoCycleGivesWitness) {
  const auto check = is_dag(graph1(2, {{1, 2}, {2, 1}}));
  EXPECT_FALSE(check.acyclic);
  EXPECT_EQ(check.witness, (std::vector<int>{0, 1}));
}

TEST(IsDag, DiamondOrderIsTopological) {
  const auto g = graph1(4, {{1, 2}, {1, 3}, {2, 3}, {3, 4}});
  const auto check = is_dag(g);
  EXPECT_TRUE(check.acyclic);
  EXPECT_TRUE(vt::is_topological(g, check.witness));
}

TEST(IsDag, WitnessIsShortestCycle) {
  // 1->2->3->4->1 and the shortcut 3->1 give a 3-cycle.
  const auto g = graph1(5, {{1, 2}, {2, 3}, {3, 4}, {4, 1}, {3, 1}, {4, 5}});
  const auto check = is_dag(g);
  ASSERT_FALSE(check.acyclic);
  EXPECT_EQ(check.witness.size(), 3u);
  EXPECT_TRUE(vt::is_cycle_in(g, check.witness));
}

TEST(IsDag, AgreesWithBruteForceOnSmallGraphs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = vt::uniform_int(rng, 1, 6);
    EdgeSet edges;
    const double p = vt::uniform(rng, 0.05, 0.5);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && vt::uniform(rng, 0, 1) < p) edges.insert({i, j});
      }
    }
    const DirectedGraph g(n, edges);
    const auto check = is_dag(g);
    ASSERT_EQ(check.acyclic, vt::acyclic_by_permutations(g));
    if (check.acyclic) {
      EXPECT_TRUE(vt::is_topological(g, check.witness));
    } else {
      EXPECT_TRUE(vt::is_cycle_in(g, check.witness));
      // No enumerated cycle is shorter than the witness.
      for (const auto& c : vt::simple_cycles(g)) {
        EXPECT_GE(c.size(), check.witness.size());
      }
    }
  }
}

TEST(Stabilizability, ChainResidual) {
  // Residual 1->2->3 with pair {1,3}.
  const auto g = graph1(3, {{1, 2}, {2, 3}, {1, 3}, {3, 1}});
  const auto verdict = is_structurally_stabilizable(g);
  EXPECT_TRUE(verdict.stabilizable);
  EXPECT_EQ(verdict.residual.edges(), edges1({{1, 2}, {2, 3}}));
}

TEST(Stabilizability, ResidualCycleThroughOneThreeFour) {
  const auto g = graph1(5, {{1, 3}, {3, 4}, {4, 1}, {4, 2}, {1, 5}, {5, 1}});
  const auto verdict = is_structurally_stabilizable(g);
  EXPECT_FALSE(verdict.stabilizable);
  // Enumeration: the residual has exactly one simple cycle, {1,3,4}.
  const auto cycles = vt::simple_cycles(verdict.residual);
  ASSERT_EQ(cycles.size(), 1u);
  EXPECT_EQ(cycles[0], (std::vector<int>{0, 2, 3}));
  EXPECT_EQ(verdict.witness, cycles[0]);
}

TEST(Stabilizability, EveryCycleThroughAPairIsStabilizable) {
  // 6 nodes: the only cycles use bidirected pairs {1,2} and {4,5}.
  const auto g = graph1(6, {{1, 2}, {2, 1}, {2, 3}, {3, 4}, {4, 5}, {5, 4},
                            {5, 6}, {1, 6}, {6, 2}});
  const auto pairs = bidirected_edges(g);
  bool every_cycle_uses_pair = true;
  for (const auto& c : vt::simple_cycles(g)) {
    bool uses = false;
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (pairs.count({c[k], c[(k + 1) % c.size()]})) uses = true;
    }
    every_cycle_uses_pair = every_cycle_uses_pair && uses;
  }
  ASSERT_TRUE(every_cycle_uses_pair);
  EXPECT_TRUE(is_structurally_stabilizable(g).stabilizable);
}

TEST(Placement, ForcedOrientations) {
  // Residual {3->2, 2->4, 5->2, 2->1}, pairs {3,4} and {1,5}.
  const auto g = graph1(5, {{3, 2}, {2, 4}, {5, 2}, {2, 1}, {3, 4}, {4, 3},
                            {1, 5}, {5, 1}});
  const auto result = place_controls(g);
  EXPECT_EQ(result.control_set, edges1({{4, 3}, {1, 5}}));
  EXPECT_EQ(result.kept_set, edges1({{3, 4}, {5, 1}}));

  // Exhaustive check over the four orientation choices: only one keeps a DAG.
  const auto residual = unidirected_residual(g);
  int valid = 0;
  for (const Edge a : {Edge{2, 3}, Edge{3, 2}}) {
    for (const Edge b : {Edge{0, 4}, Edge{4, 0}}) {
      if (is_dag(residual.with(a).with(b)).acyclic) ++valid;
    }
  }
  EXPECT_EQ(valid, 1);
}

TEST(Placement, NoPairsKeepsResidual) {
  const auto g = graph1(3, {{1, 2}, {2, 3}});
  const auto result = place_controls(g);
  EXPECT_TRUE(result.control_set.empty());
  EXPECT_TRUE(result.kept_set.empty());
  EXPECT_EQ(result.final_graph, g);
}

TEST(Placement, TieBreakPicksLowToHighFirst) {
  // Residual 3->2->4 forces {3,4}; pair {1,5} is free either way.
  const auto g = graph1(5, {{3, 2}, {2, 4}, {3, 4}, {4, 3}, {1, 5}, {5, 1}});
  const auto residual = unidirected_residual(g);
  std::vector<EdgeSet> valid_kept;
  for (const Edge a : {Edge{2, 3}, Edge{3, 2}}) {
    for (const Edge b : {Edge{0, 4}, Edge{4, 0}}) {
      if (is_dag(residual.with(a).with(b)).acyclic) valid_kept.push_back({a, b});
    }
  }
  ASSERT_EQ(valid_kept.size(), 2u);

  const auto result = place_controls(g);
  EXPECT_NE(std::find(valid_kept.begin(), valid_kept.end(), result.kept_set),
            valid_kept.end());
  EXPECT_EQ(result.kept_set, edges1({{3, 4}, {1, 5}}));
  EXPECT_EQ(result.control_set, edges1({{4, 3}, {5, 1}}));
}

TEST(Placement, CyclicResidualThrowsWithCycle) {
  const auto g = graph1(5, {{1, 3}, {3, 4}, {4, 1}, {1, 5}, {5, 1}});
  try {
    place_controls(g);
    FAIL() << "expected NotStabilizableError";
  } catch (const NotStabilizableError& e) {
    EXPECT_EQ(e.cycle(), (std::vector<int>{0, 2, 3}));
  }
}

TEST(Placement, PropertiesOnRandomInstances) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const auto g = DirectedGraph::of(vt::random_stabilizable_instance(rng));
    const auto result = place_controls(g);
    EXPECT_TRUE(is_dag(result.final_graph).acyclic);
    EXPECT_TRUE(is_dag(DirectedGraph(g.size(), result.control_set)).acyclic);
    EXPECT_TRUE(vt::is_topological(result.final_graph, result.final_order));

    const auto bidirected = bidirected_edges(g);
    EXPECT_EQ(result.control_set.size() + result.kept_set.size(), bidirected.size());
    EXPECT_EQ(result.control_set.size(), result.kept_set.size());
    for (const auto& e : result.control_set) {
      EXPECT_TRUE(result.kept_set.count(e.reversed()));
      EXPECT_FALSE(result.kept_set.count(e));
    }
  }
}

TEST(ResidualPartition, HoldsOnRandomGraphs) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = vt::uniform_int(rng, 2, 8);
    EdgeSet edges;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && vt::uniform(rng, 0, 1) < 0.3) edges.insert({i, j});
      }
    }
    const DirectedGraph g(n, edges);
    const auto pairs = bidirected_edges(g);
    const auto residual = unidirected_residual(g).edges();
    EdgeSet joined = pairs;
    joined.insert(residual.begin(), residual.end());
    EXPECT_EQ(joined, edges);
    for (const auto& e : residual) EXPECT_FALSE(pairs.count(e));
    for (const auto& e : residual) EXPECT_FALSE(residual.count(e.reversed()));
  }
}

TEST(OrientationProperty, OneOrientationAlwaysKeepsADag) {
  std::mt19937_64 rng(13);
  int cases = 0;
  while (cases < 1000) {
    const int n = vt::uniform_int(rng, 2, 8);
    const DirectedGraph g(n, vt::random_dag_edges(rng, n, vt::uniform(rng, 0.1, 0.7)));
    const int i = vt::uniform_int(rng, 0, n - 1);
    const int j = vt::uniform_int(rng, 0, n - 1);
    if (i == j || g.contains({i, j}) || g.contains({j, i})) continue;
    ++cases;
    const bool forward = vt::acyclic_by_permutations(g.with({i, j}));
    const bool backward = vt::acyclic_by_permutations(g.with({j, i}));
    EXPECT_TRUE(forward || backward);
  }
}

TEST(TopologicalPermutation, ChainIsLowerTriangular) {
  const auto g = graph1(3, {{1, 2}, {2, 3}});
  const auto order = topological_permutation(g);
  EXPECT_EQ(order, (std::vector<int>{0, 1, 2}));
}

TEST(TopologicalPermutation, ReversedChainIsPermuted) {
  const auto g = graph1(3, {{3, 2}, {2, 1}});
  const auto order = topological_permutation(g);
  EXPECT_EQ(order, (std::vector<int>{2, 1, 0}));
}

TEST(TopologicalPermutation, RandomDagBecomesLowerTriangular) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto sys = vt::random_dag_network(rng, 8);
    const MatrixXd m = build_matrix(sys);
    const auto p = permutation_matrix(topological_permutation(DirectedGraph::of(sys)));
    const MatrixXd permuted = p * m * p.transpose();
    for (int i = 0; i < 8; ++i) {
      for (int j = i + 1; j < 8; ++j) EXPECT_EQ(permuted(i, j), 0.0);
    }
    std::vector<double> a(m.diagonal().begin(), m.diagonal().end());
    std::vector<double> b(permuted.diagonal().begin(), permuted.diagonal().end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
  }
}

TEST(TopologicalPermutation, CyclicInputThrows) {
  try {
    topological_permutation(graph1(3, {{1, 2}, {2, 3}, {3, 1}}));
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.cycle().size(), 3u);
  }
}

TEST(ChainedEdges, DetectsPaths) {
  EXPECT_FALSE(has_chained_edges(4, edges1({{1, 2}, {3, 2}, {1, 4}})));
  EXPECT_TRUE(has_chained_edges(3, edges1({{1, 2}, {2, 3}})));
}
