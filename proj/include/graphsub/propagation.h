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

#ifndef GRAPHSUB_PROPAGATION_H_
#define GRAPHSUB_PROPAGATION_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "graphsub/error.h"
#include "graphsub/graph.h"
#include "graphsub/score_vector.h"

namespace graphsub {

// Line graph of a bipartite graph: one node per source edge, two nodes
// adjacent when their source edges share an endpoint.
class LineGraph {
 public:
  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return adjacency_.size() / 2; }
  std::span<const EdgeId> neighbors(EdgeId n) const {
    return std::span<const EdgeId>(adjacency_).subspan(
        offsets_[n], offsets_[n + 1] - offsets_[n]);
  }
  std::size_t degree(EdgeId n) const { return offsets_[n + 1] - offsets_[n]; }

 private:
  friend LineGraph build_line_graph(const BipartiteGraph& graph);
  std::vector<std::size_t> offsets_;
  std::vector<EdgeId> adjacency_;
};

LineGraph build_line_graph(const BipartiteGraph& graph);

// (sum of squared user degrees + sum of squared item degrees) / 2 - |E|.
std::uint64_t line_graph_edge_count(const BipartiteGraph& graph);

enum class Normalization {
  kSymmetric,  // D^{-1/2} A D^{-1/2}
  kRow,        // D^{-1} A
};

// Which quantity the edge kernel subtracts twice from the endpoint sums.
enum class SelfExclusion {
  kIterate,       // the current iterate B_n^t; equals line-graph propagation
  kInitialScore,  // the normalized score Z_n
};

struct PropagationConfig {
  double gamma = 0.2;  // 1 / (1 + mu), in [0, 1)
  double tolerance = 1e-8;
  std::size_t max_iters = 1000;
  // Line-graph path only; the edge kernel is always row-normalized.
  Normalization normalization = Normalization::kSymmetric;
};

struct PropagationResult {
  ScoreVector values;
  std::size_t iterations = 0;
  // Max-norm and 2-norm of each iterate update.
  std::vector<double> residuals;
  std::vector<double> residuals_l2;
};

class ConvergenceError : public ContractError {
 public:
  ConvergenceError(const std::string& what, double residual)
      : ContractError(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct NormalizedScores {
  ScoreVector z;  // min-max normalized, all zero when the input is constant
  ScoreVector b;  // |Y - Z|
};

NormalizedScores normalize_and_uncertainty(const ScoreVector& scores,
                                           const ScoreVector& labels);

// Fixpoint of B <- (1 - gamma) B0 + gamma S B over the line graph. Rows of S
// for isolated line nodes are zero.
PropagationResult propagate_uncertainty_linegraph(const ScoreVector& b,
                                                  const LineGraph& line_graph,
                                                  const PropagationConfig& config);

// Same fixpoint with row normalization, computed on the source graph from
// per-node sums without building the line graph. Edges without line-graph
// neighbors keep their input value. `z` is required for
// SelfExclusion::kInitialScore.
PropagationResult propagate_uncertainty_edges(
    const BipartiteGraph& graph, const ScoreVector& b,
    const PropagationConfig& config,
    SelfExclusion self_exclusion = SelfExclusion::kIterate,
    const ScoreVector* z = nullptr);

// Z-hat = Y + (-1)^Y B-hat.
ScoreVector correct_scores(const ScoreVector& labels, const ScoreVector& b_hat);

PropagationResult propagate_scores_linegraph(const ScoreVector& z_hat,
                                             const LineGraph& line_graph,
                                             const PropagationConfig& config);
PropagationResult propagate_scores_edges(const BipartiteGraph& graph,
                                         const ScoreVector& z_hat,
                                         const PropagationConfig& config);

enum class Kernel { kLineGraph, kEdge };

struct SmoothingOptions {
  Kernel kernel = Kernel::kEdge;
  PropagationConfig config;
  SelfExclusion self_exclusion = SelfExclusion::kIterate;
  // Also propagate the corrected scores after uncertainty propagation.
  bool propagate_scores = false;
};

// Raw per-edge scores (G_eff or pilot predictions) to smoothed hardness:
// normalize, propagate uncertainty, correct, optionally propagate scores.
ScoreVector smooth_scores(const BipartiteGraph& graph, const ScoreVector& raw,
                          const SmoothingOptions& options);

}  // namespace graphsub

#endif  // GRAPHSUB_PROPAGATION_H_
