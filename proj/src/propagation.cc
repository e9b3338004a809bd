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

#include "graphsub/propagation.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace graphsub {
namespace {

void check_config(const PropagationConfig& config) {
  if (!(config.gamma >= 0.0 && config.gamma < 1.0)) {
    throw ContractError("gamma must lie in [0, 1), got " +
                        std::to_string(config.gamma));
  }
  if (!(config.tolerance > 0.0)) throw ContractError("tolerance must be positive");
  if (config.max_iters == 0) throw ContractError("max_iters must be positive");
}

// Iterates x <- step(x) from x0 until the max-norm update drops below the
// tolerance. `step` writes the full next iterate.
template <typename Step>
PropagationResult iterate(const ScoreVector& x0, Semantics semantics,
                          const PropagationConfig& config, Step&& step) {
  check_config(config);
  PropagationResult result;
  result.values.semantics = semantics;
  std::vector<double> current = x0.values;
  std::vector<double> next(current.size());
  double update = 0.0;
  for (std::size_t it = 1; it <= config.max_iters; ++it) {
    step(current, next);
    update = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      const double d = std::abs(next[i] - current[i]);
      update = std::max(update, d);
      sq += d * d;
    }
    result.residuals.push_back(update);
    result.residuals_l2.push_back(std::sqrt(sq));
    current.swap(next);
    result.iterations = it;
    if (!std::isfinite(update)) break;
    if (update < config.tolerance) {
      result.values.values = std::move(current);
      return result;
    }
  }
  throw ConvergenceError("propagation did not converge in " +
                             std::to_string(config.max_iters) +
                             " iterations; residual " + std::to_string(update),
                         update);
}

PropagationResult linegraph_fixpoint(const ScoreVector& x0,
                                     const LineGraph& lg,
                                     const PropagationConfig& config,
                                     Semantics semantics) {
  if (x0.size() != lg.num_nodes()) {
    throw ContractError("score vector does not match the line graph size");
  }
  std::vector<double> inv_sqrt(lg.num_nodes(), 0.0);
  for (EdgeId n = 0; n < lg.num_nodes(); ++n) {
    if (lg.degree(n) > 0) inv_sqrt[n] = 1.0 / std::sqrt(static_cast<double>(lg.degree(n)));
  }
  const double gamma = config.gamma;
  const bool symmetric = config.normalization == Normalization::kSymmetric;
  return iterate(x0, semantics, config,
                 [&](const std::vector<double>& cur, std::vector<double>& next) {
                   for (EdgeId n = 0; n < lg.num_nodes(); ++n) {
                     double acc = 0.0;
                     if (symmetric) {
                       for (EdgeId m : lg.neighbors(n)) acc += inv_sqrt[m] * cur[m];
                       acc *= inv_sqrt[n];
                     } else if (lg.degree(n) > 0) {
                       for (EdgeId m : lg.neighbors(n)) acc += cur[m];
                       acc /= static_cast<double>(lg.degree(n));
                     }
                     next[n] = (1.0 - gamma) * x0[n] + gamma * acc;
                   }
                 });
}

PropagationResult edge_fixpoint(const BipartiteGraph& graph,
                                const ScoreVector& x0,
                                const PropagationConfig& config,
                                const std::vector<double>* exclusion,
                                Semantics semantics) {
  if (x0.size() != graph.num_edges()) {
    throw ContractError("score vector does not match the graph's edge count");
  }
  std::vector<double> node_sum(graph.num_nodes());
  const double gamma = config.gamma;
  return iterate(
      x0, semantics, config,
      [&](const std::vector<double>& cur, std::vector<double>& next) {
        std::fill(node_sum.begin(), node_sum.end(), 0.0);
        for (EdgeId e = 0; e < graph.num_edges(); ++e) {
          const Edge& edge = graph.edge(e);
          node_sum[graph.user_node(edge.user)] += cur[e];
          node_sum[graph.item_node(edge.item)] += cur[e];
        }
        for (EdgeId e = 0; e < graph.num_edges(); ++e) {
          const Edge& edge = graph.edge(e);
          const NodeId a = graph.user_node(edge.user);
          const NodeId b = graph.item_node(edge.item);
          const std::size_t denom =
              graph.node_edges(a).size() + graph.node_edges(b).size() - 2;
          if (denom == 0) {
            next[e] = x0[e];
            continue;
          }
          const double self = exclusion ? (*exclusion)[e] : cur[e];
          next[e] = (1.0 - gamma) * x0[e] +
                    gamma * (node_sum[a] + node_sum[b] - 2.0 * self) /
                        static_cast<double>(denom);
        }
      });
}

}  // namespace

LineGraph build_line_graph(const BipartiteGraph& graph) {
  LineGraph lg;
  const std::size_t n = graph.num_edges();
  lg.offsets_.assign(n + 1, 0);
  for (EdgeId e = 0; e < n; ++e) {
    const Edge& edge = graph.edge(e);
    lg.offsets_[e + 1] = lg.offsets_[e] + graph.user_degree(edge.user) +
                         graph.item_degree(edge.item) - 2;
  }
  lg.adjacency_.reserve(lg.offsets_[n]);
  for (EdgeId e = 0; e < n; ++e) {
    const Edge& edge = graph.edge(e);
    for (EdgeId f : graph.user_edges(edge.user)) {
      if (f != e) lg.adjacency_.push_back(f);
    }
    for (EdgeId f : graph.item_edges(edge.item)) {
      if (f != e) lg.adjacency_.push_back(f);
    }
  }
  return lg;
}

std::uint64_t line_graph_edge_count(const BipartiteGraph& graph) {
  std::uint64_t squares = 0;
  for (NodeId u = 0; u < graph.num_users(); ++u) {
    const std::uint64_t d = graph.user_degree(u);
    squares += d * d;
  }
  for (NodeId v = 0; v < graph.num_items(); ++v) {
    const std::uint64_t d = graph.item_degree(v);
    squares += d * d;
  }
  return squares / 2 - graph.num_edges();
}

NormalizedScores normalize_and_uncertainty(const ScoreVector& scores,
                                           const ScoreVector& labels) {
  if (scores.size() == 0) throw ContractError("cannot normalize an empty score vector");
  if (scores.size() != labels.size()) {
    throw ContractError("scores and labels differ in length");
  }
  const auto [lo, hi] = std::minmax_element(scores.values.begin(), scores.values.end());
  const double min = *lo;
  const double range = *hi - *lo;
  NormalizedScores out;
  out.z = {Semantics::kNormalized, std::vector<double>(scores.size(), 0.0)};
  out.b = {Semantics::kUncertainty, std::vector<double>(scores.size(), 0.0)};
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (range > 0.0) out.z[i] = std::clamp((scores[i] - min) / range, 0.0, 1.0);
    out.b[i] = std::abs(labels[i] - out.z[i]);
  }
  return out;
}

PropagationResult propagate_uncertainty_linegraph(const ScoreVector& b,
                                                  const LineGraph& line_graph,
                                                  const PropagationConfig& config) {
  return linegraph_fixpoint(b, line_graph, config, Semantics::kUncertainty);
}

PropagationResult propagate_uncertainty_edges(const BipartiteGraph& graph,
                                              const ScoreVector& b,
                                              const PropagationConfig& config,
                                              SelfExclusion self_exclusion,
                                              const ScoreVector* z) {
  if (self_exclusion == SelfExclusion::kInitialScore) {
    if (z == nullptr || z->size() != graph.num_edges()) {
      throw ContractError("self-exclusion by Z needs the normalized scores");
    }
    return edge_fixpoint(graph, b, config, &z->values, Semantics::kUncertainty);
  }
  return edge_fixpoint(graph, b, config, nullptr, Semantics::kUncertainty);
}

ScoreVector correct_scores(const ScoreVector& labels, const ScoreVector& b_hat) {
  if (labels.size() != b_hat.size()) {
    throw ContractError("labels and uncertainties differ in length");
  }
  ScoreVector z{Semantics::kCorrected, std::vector<double>(labels.size())};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    z[i] = labels[i] > 0.5 ? 1.0 - b_hat[i] : b_hat[i];
  }
  return z;
}

PropagationResult propagate_scores_linegraph(const ScoreVector& z_hat,
                                             const LineGraph& line_graph,
                                             const PropagationConfig& config) {
  return linegraph_fixpoint(z_hat, line_graph, config, Semantics::kCorrected);
}

PropagationResult propagate_scores_edges(const BipartiteGraph& graph,
                                         const ScoreVector& z_hat,
                                         const PropagationConfig& config) {
  return edge_fixpoint(graph, z_hat, config, nullptr, Semantics::kCorrected);
}

ScoreVector smooth_scores(const BipartiteGraph& graph, const ScoreVector& raw,
                          const SmoothingOptions& options) {
  const ScoreVector y = edge_labels(graph);
  const NormalizedScores zb = normalize_and_uncertainty(raw, y);
  PropagationConfig config = options.config;
  ScoreVector b_hat;
  LineGraph lg;
  if (options.kernel == Kernel::kLineGraph) {
    lg = build_line_graph(graph);
    b_hat = propagate_uncertainty_linegraph(zb.b, lg, config).values;
  } else {
    b_hat = propagate_uncertainty_edges(graph, zb.b, config,
                                        options.self_exclusion, &zb.z)
                .values;
  }
  ScoreVector z_hat = correct_scores(y, b_hat);
  if (options.propagate_scores) {
    z_hat = options.kernel == Kernel::kLineGraph
                ? propagate_scores_linegraph(z_hat, lg, config).values
                : propagate_scores_edges(graph, z_hat, config).values;
  }
  // Symmetric normalization and the Z self-exclusion variant can leave the
  // unit interval slightly.
  for (double& x : z_hat.values) x = std::clamp(x, 0.0, 1.0);
  z_hat.semantics = Semantics::kCorrected;
  return z_hat;
}

}  // namespace graphsub
