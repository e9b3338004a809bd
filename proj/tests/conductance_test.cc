// Copyright 2026 The graphsub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "graphsub/conductance.h"

#include <gtest/gtest.h>

#include <cmath>
#include <queue>
#include <random>

#include "graphsub/error.h"
#include "test_util.h"

namespace graphsub {
namespace {

struct ToyGraph {
  BipartiteGraph graph = build_graph(testing::toy_dataset());
  BipartiteGraph pos = positive_subgraph(graph);
  NodeId node_user(const char* t) const { return graph.user_node(*graph.find_user(t)); }
  NodeId node_item(const char* t) const { return graph.item_node(*graph.find_item(t)); }
  EdgeId edge(const char* u, const char* v) const {
    return *graph.find_edge(*graph.find_user(u), *graph.find_item(v));
  }
};

TEST(ExactResistanceTest, ToyGraphSeriesPath) {
  ToyGraph f;
  EXPECT_NEAR(exact_resistance(f.pos, f.node_user("u2"), f.node_item("v1")), 3.0, 1e-12);
  EXPECT_TRUE(std::isinf(exact_resistance(f.pos, f.node_user("u2"), f.node_item("v3"))));
}

TEST(ExactResistanceTest, SymmetricAndZeroOnDiagonal) {
  ToyGraph f;
  const ResistanceSolver solver(f.pos);
  EXPECT_EQ(solver.resistance(f.node_user("u2"), f.node_item("v1")),
            solver.resistance(f.node_item("v1"), f.node_user("u2")));
  EXPECT_EQ(solver.resistance(f.node_user("u1"), f.node_user("u1")), 0.0);
}

TEST(ExactResistanceTest, SingleEdge) {
  const BipartiteGraph g = build_graph(Dataset({{"u", "v", 1, {}}}));
  EXPECT_NEAR(exact_resistance(g, 0, 1), 1.0, 1e-12);
}

TEST(ExactResistanceTest, TwoParallelTwoHopPaths) {
  // u - a - v and u - b - v with u, v users and a, b items.
  const BipartiteGraph g = build_graph(Dataset(
      {{"u", "a", 1, {}}, {"v", "a", 1, {}}, {"u", "b", 1, {}}, {"v", "b", 1, {}}}));
  const NodeId u = g.user_node(*g.find_user("u"));
  const NodeId v = g.user_node(*g.find_user("v"));
  const double oracle = testing::resistance_oracle(
      g.num_nodes(), testing::unified_edges(g, true), static_cast<int>(u),
      static_cast<int>(v));
  EXPECT_NEAR(oracle, 1.0, 1e-12);
  EXPECT_NEAR(exact_resistance(g, u, v), oracle, 1e-12);
}

TEST(ExactResistanceTest, OutOfRangeNodeIsAnError) {
  ToyGraph f;
  EXPECT_THROW(exact_resistance(f.pos, 0, 99), ContractError);
}

TEST(ExactResistanceTest, MatchesGroundedOracleOnRandomGraphs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Dataset d = testing::random_dataset(rng, 3 + trial % 7, 3 + trial % 5,
                                              20, 0.6, trial % 2 == 0);
    const BipartiteGraph g = build_graph(d);
    const BipartiteGraph pos = positive_subgraph(g);
    const ResistanceSolver solver(pos);
    const auto edges = testing::unified_edges(g, true);
    for (NodeId a = 0; a < g.num_nodes(); ++a) {
      for (NodeId b = a + 1; b < g.num_nodes(); ++b) {
        const double expected = testing::resistance_oracle(
            g.num_nodes(), edges, static_cast<int>(a), static_cast<int>(b));
        const double got = solver.resistance(a, b);
        if (std::isinf(expected)) {
          EXPECT_TRUE(std::isinf(got));
        } else {
          EXPECT_NEAR(got, expected, 1e-9 * std::max(1.0, expected));
        }
      }
    }
  }
}

// Components above the eigendecomposition limit go through the Cholesky
// route. On a tree the resistance is the path length.
TEST(ExactResistanceTest, LargeTreeUsesPathLength) {
  std::mt19937_64 rng(5);
  const int n_users = 1100;
  const int n_items = 1000;
  const Dataset d = testing::random_dataset(rng, n_users, n_items, 0, 1.0, true);
  const BipartiteGraph g = build_graph(d);
  ASSERT_GT(g.num_nodes(), ResistanceSolver::kEigenLimit);
  ASSERT_EQ(g.num_edges(), g.num_nodes() - 1);
  const ResistanceSolver solver(g);
  // BFS distances from node 0.
  std::vector<int> dist(g.num_nodes(), -1);
  std::queue<NodeId> q;
  dist[0] = 0;
  q.push(0);
  while (!q.empty()) {
    const NodeId x = q.front();
    q.pop();
    for (EdgeId e : g.node_edges(x)) {
      const NodeId y = g.other_end(e, x);
      if (dist[y] < 0) {
        dist[y] = dist[x] + 1;
        q.push(y);
      }
    }
  }
  for (NodeId b = 1; b < g.num_nodes(); b += 97) {
    EXPECT_NEAR(solver.resistance(0, b), dist[b], 1e-6 * dist[b]);
  }
}

TEST(CommuteTimeTest, SingleEdgeIsExactlyTwo) {
  const BipartiteGraph g = build_graph(Dataset({{"u", "v", 1, {}}}));
  const CommuteEstimate est = commute_time_mc(g, 0, 1, CommuteConfig{});
  EXPECT_EQ(est.value, 2.0);
  EXPECT_EQ(est.std_error, 0.0);
}

TEST(CommuteTimeTest, ToyGraphWithinThreeStandardErrors) {
  ToyGraph f;
  CommuteConfig config;
  config.seed = 3;
  const CommuteEstimate est =
      commute_time_mc(f.pos, f.node_user("u2"), f.node_item("v1"), config);
  // 2 |E_pos| R_eff = 2 * 3 * 3.
  EXPECT_NEAR(est.value, 18.0, 3.0 * est.std_error);
  EXPECT_GT(est.n_walks, config.min_walks);
}

TEST(CommuteTimeTest, PathOfTwoEdges) {
  const BipartiteGraph g =
      build_graph(Dataset({{"u", "w", 1, {}}, {"v", "w", 1, {}}}));
  CommuteConfig config;
  config.seed = 9;
  const CommuteEstimate est = commute_time_mc(
      g, g.user_node(*g.find_user("u")), g.user_node(*g.find_user("v")), config);
  EXPECT_NEAR(est.value, 8.0, 3.0 * est.std_error);
}

TEST(CommuteTimeTest, DisconnectedEndpointsAreAnError) {
  ToyGraph f;
  EXPECT_THROW(
      commute_time_mc(f.pos, f.node_user("u2"), f.node_item("v3"), CommuteConfig{}),
      ContractError);
}

TEST(CommuteTimeTest, MaxWalksCapsTheRun) {
  ToyGraph f;
  CommuteConfig config;
  config.max_walks = 5;
  config.tolerance = 0.0;
  const CommuteEstimate est =
      commute_time_mc(f.pos, f.node_user("u2"), f.node_item("v1"), config);
  EXPECT_EQ(est.n_walks, 5u);
}

TEST(CommuteTimeTest, IdentityWithResistanceOnRandomGraphs) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const Dataset d = testing::random_dataset(rng, 5, 4, 6, 1.0, true);
    const BipartiteGraph g = build_graph(d);
    const ResistanceSolver solver(g);
    const CommuteTimeEstimator estimator(g);
    CommuteConfig config;
    config.seed = 100 + trial;
    config.tolerance = 0.0;
    config.max_walks = 20000;
    for (EdgeId e = 0; e < g.num_edges(); e += 3) {
      const NodeId a = g.user_node(g.edge(e).user);
      const NodeId b = g.item_node(g.edge(e).item);
      const double expected = 2.0 * g.num_edges() * solver.resistance(a, b);
      const CommuteEstimate est = estimator.estimate(a, b, config, e);
      EXPECT_NEAR(est.value, expected, 4.0 * est.std_error);
    }
  }
}

TEST(EffectiveConductanceTest, ToyGraphExactValues) {
  ToyGraph f;
  const ScoreVector g = effective_conductance(f.graph, ConductanceOptions{});
  EXPECT_EQ(g.semantics, Semantics::kEffectiveConductance);
  EXPECT_NEAR(g[f.edge("u2", "v1")], 1.0 / 3.0, 1e-12);
  EXPECT_EQ(g[f.edge("u2", "v3")], 0.0);
  EXPECT_NEAR(g[f.edge("u1", "v2")], 1.0, 1e-12);
}

TEST(EffectiveConductanceTest, IsolatedPositiveEdgeIsOne) {
  const BipartiteGraph g =
      build_graph(Dataset({{"a", "x", 1, {}}, {"b", "y", 1, {}}, {"b", "x", 0, {}}}));
  const ScoreVector exact = effective_conductance(g, ConductanceOptions{});
  ConductanceOptions mc;
  mc.mode = ConductanceMode::kMonteCarlo;
  const ScoreVector walk = effective_conductance(g, mc);
  const EdgeId ax = *g.find_edge(*g.find_user("a"), *g.find_item("x"));
  EXPECT_NEAR(exact[ax], 1.0, 1e-12);
  // One positive edge in each component, so 2|E_pos| = 4 and comm = 2.
  EXPECT_EQ(walk[ax], 2.0);
}

TEST(EffectiveConductanceTest, MonteCarloAgreesWithExactOnToyGraph) {
  ToyGraph f;
  ConductanceOptions mc;
  mc.mode = ConductanceMode::kMonteCarlo;
  mc.commute.seed = 17;
  std::vector<CommuteEstimate> est;
  const ScoreVector walk = effective_conductance(f.graph, mc, &est);
  const ScoreVector exact = effective_conductance(f.graph, ConductanceOptions{});
  ASSERT_EQ(est.size(), f.graph.num_edges());
  const EdgeId e = f.edge("u2", "v1");
  EXPECT_NEAR(est[e].value, 18.0, 3.0 * est[e].std_error);
  EXPECT_EQ(walk[f.edge("u2", "v3")], 0.0);
  EXPECT_EQ(est[f.edge("u2", "v3")].n_walks, 0u);
  EXPECT_NEAR(walk[e], exact[e], 0.1 * exact[e]);
}

TEST(EffectiveConductanceTest, WorkerCountDoesNotChangeResults) {
  std::mt19937_64 rng(4);
  const BipartiteGraph g =
      build_graph(testing::random_dataset(rng, 8, 8, 30, 0.5, true));
  ConductanceOptions mc;
  mc.mode = ConductanceMode::kMonteCarlo;
  mc.commute.seed = 8;
  mc.workers = 1;
  const ScoreVector one = effective_conductance(g, mc);
  mc.workers = 3;
  const ScoreVector three = effective_conductance(g, mc);
  EXPECT_EQ(one.values, three.values);
}

TEST(HardnessEcTest, ToyGraphValues) {
  ToyGraph f;
  const ScoreVector h = hardness_ec(f.graph, ConductanceOptions{});
  EXPECT_NEAR(h[f.edge("u2", "v1")], 1.0 / 3.0, 1e-12);
  EXPECT_EQ(h[f.edge("u2", "v3")], 0.0);
  EXPECT_NEAR(h[f.edge("u1", "v2")], 0.0, 1e-12);
  for (double x : h.values) EXPECT_GE(x, 0.0);
}

TEST(HardnessEcTest, IsolatedPositiveEdgeHasZeroHardness) {
  const BipartiteGraph g = build_graph(Dataset({{"a", "x", 1, {}}}));
  EXPECT_NEAR(hardness_ec(g, ConductanceOptions{})[0], 0.0, 1e-12);
}

TEST(HardnessErTest, SingleEdgeFourCycleAndLeaf) {
  EXPECT_NEAR(hardness_er(build_graph(Dataset({{"u", "v", 0, {}}})))[0], 1.0, 1e-12);

  const BipartiteGraph cycle = build_graph(Dataset(
      {{"u", "a", 1, {}}, {"w", "a", 0, {}}, {"w", "b", 1, {}}, {"u", "b", 0, {}}}));
  const ScoreVector r = hardness_er(cycle);
  for (EdgeId e = 0; e < cycle.num_edges(); ++e) {
    const double oracle = testing::resistance_oracle(
        cycle.num_nodes(), testing::unified_edges(cycle, false),
        static_cast<int>(cycle.user_node(cycle.edge(e).user)),
        static_cast<int>(cycle.item_node(cycle.edge(e).item)));
    EXPECT_NEAR(oracle, 0.75, 1e-12);
    EXPECT_NEAR(r[e], oracle, 1e-12);
  }

  ToyGraph f;
  EXPECT_NEAR(hardness_er(f.graph)[f.edge("u2", "v3")], 1.0, 1e-12);
}

// Adding a positive edge never lowers any effective conductance.
TEST(ConductanceProperty, RayleighMonotonicity) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 40; ++trial) {
    Dataset d = testing::random_dataset(rng, 6, 6, 18, 0.5, false);
    const BipartiteGraph before = build_graph(d);
    const ScoreVector g0 = effective_conductance(before, ConductanceOptions{});
    // Flip one negative edge to positive by appending a positive duplicate.
    std::vector<EdgeId> negatives;
    for (EdgeId e = 0; e < before.num_edges(); ++e) {
      if (before.edge(e).label == 0) negatives.push_back(e);
    }
    if (negatives.empty()) continue;
    const Edge& flip = before.edge(negatives[rng() % negatives.size()]);
    d.add({before.user_tokens()[flip.user], before.item_tokens()[flip.item], 1, {}});
    const BipartiteGraph after = build_graph(d);
    const ScoreVector g1 = effective_conductance(after, ConductanceOptions{});
    ASSERT_EQ(after.num_edges(), before.num_edges());
    for (EdgeId e = 0; e < before.num_edges(); ++e) {
      EXPECT_GE(g1[e], g0[e] - 1e-9);
    }
  }
}

TEST(ConductanceProperty, HardnessIsNonNegativeInBothModes) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const BipartiteGraph g =
        build_graph(testing::random_dataset(rng, 5, 5, 15, 0.5, false));
    ConductanceOptions mc;
    mc.mode = ConductanceMode::kMonteCarlo;
    mc.commute.seed = trial;
    for (double x : hardness_ec(g, mc).values) EXPECT_GE(x, 0.0);
    for (double x : hardness_ec(g, ConductanceOptions{}).values) EXPECT_GE(x, 0.0);
  }
}

}  // namespace
}  // namespace graphsub
