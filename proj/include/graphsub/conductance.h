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

#ifndef GRAPHSUB_CONDUCTANCE_H_
#define GRAPHSUB_CONDUCTANCE_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "graphsub/graph.h"
#include "graphsub/score_vector.h"

namespace graphsub {

inline constexpr double kInfiniteResistance =
    std::numeric_limits<double>::infinity();

// Effective resistance between any two nodes of a graph whose edges are all
// unit resistors, from the Laplacian pseudoinverse of each connected
// component. Components up to `kEigenLimit` nodes are inverted through a
// symmetric eigendecomposition; larger ones through a Cholesky factor of
// L + 11'/n.
class ResistanceSolver {
 public:
  static constexpr std::size_t kEigenLimit = 2000;

  explicit ResistanceSolver(const BipartiteGraph& graph);

  // Unified node ids. Returns kInfiniteResistance across components.
  double resistance(NodeId a, NodeId b) const;

  const Components& components() const { return components_; }

 private:
  std::size_t num_nodes_ = 0;
  Components components_;
  std::vector<std::uint32_t> local_index_;
  std::vector<Eigen::MatrixXd> pinv_;
};

// Throws ContractError for node ids out of range.
double exact_resistance(const BipartiteGraph& pos_graph, NodeId u, NodeId v);

struct CommuteConfig {
  // Stop once the running mean moves by less than this many steps.
  double tolerance = 0.1;
  std::size_t max_walks = 100000;
  // Walks always run before the tolerance test is consulted.
  std::size_t min_walks = 16;
  std::uint64_t seed = 0;
};

struct CommuteEstimate {
  double value = 0.0;   // mean round-trip length in steps
  double std_error = 0.0;  // standard error of the mean
  std::size_t n_walks = 0;
};

// Monte-Carlo commute times over simple random walks on one graph.
class CommuteTimeEstimator {
 public:
  explicit CommuteTimeEstimator(const BipartiteGraph& graph);

  // `stream` selects an independent RNG stream under config.seed. Throws
  // ContractError when u and v are in different components.
  CommuteEstimate estimate(NodeId u, NodeId v, const CommuteConfig& config,
                           std::uint64_t stream = 0) const;

  const Components& components() const { return components_; }

 private:
  const BipartiteGraph& graph_;
  Components components_;
};

CommuteEstimate commute_time_mc(const BipartiteGraph& pos_graph, NodeId u,
                                NodeId v, const CommuteConfig& config);

enum class ConductanceMode { kExact, kMonteCarlo };

struct ConductanceOptions {
  ConductanceMode mode = ConductanceMode::kExact;
  CommuteConfig commute;
  unsigned workers = 1;
};

// G_eff per edge of `graph`, measured on its positive subgraph with unit
// conductances. Pairs disconnected there score 0. In Monte-Carlo mode
// G_eff = 2|E_pos| / comm and, when `estimates` is given, the per-edge
// commute estimates are returned through it (zeros for disconnected pairs).
ScoreVector effective_conductance(const BipartiteGraph& graph,
                                  const ConductanceOptions& options,
                                  std::vector<CommuteEstimate>* estimates =
                                      nullptr);

// h = G_eff - G, clamped at 0 against estimator noise.
ScoreVector hardness_ec(const BipartiteGraph& graph,
                        const ScoreVector& g_eff);
ScoreVector hardness_ec(const BipartiteGraph& graph,
                        const ConductanceOptions& options);

// Effective resistance per edge on the full graph with every edge (positive
// or negative) a unit resistor.
ScoreVector hardness_er(const BipartiteGraph& graph);

}  // namespace graphsub

#endif  // GRAPHSUB_CONDUCTANCE_H_
