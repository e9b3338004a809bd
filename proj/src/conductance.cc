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

#include <algorithm>
#include <cmath>
#include <string>

#include "graphsub/error.h"
#include "graphsub/random.h"
#include "parallel.h"

namespace graphsub {
namespace {

Eigen::MatrixXd laplacian_pinv(const Eigen::MatrixXd& laplacian) {
  const Eigen::Index n = laplacian.rows();
  if (n <= 1) return Eigen::MatrixXd::Zero(n, n);
  if (static_cast<std::size_t>(n) <= ResistanceSolver::kEigenLimit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(laplacian);
    // Connected component: exactly one zero eigenvalue, sorted first.
    const Eigen::MatrixXd v = eig.eigenvectors().rightCols(n - 1);
    const Eigen::VectorXd inv = eig.eigenvalues().tail(n - 1).cwiseInverse();
    return v * inv.asDiagonal() * v.transpose();
  }
  const double shift = 1.0 / static_cast<double>(n);
  Eigen::MatrixXd shifted = laplacian.array() + shift;
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() != Eigen::Success) {
    throw ContractError("Laplacian factorization failed");
  }
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
  return inv.array() - shift;
}

// Uniform index in [0, n) by multiply-shift.
inline std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(
      (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

}  // namespace

ResistanceSolver::ResistanceSolver(const BipartiteGraph& graph)
    : num_nodes_(graph.num_nodes()),
      components_(connected_components(graph)),
      local_index_(graph.num_nodes(), 0) {
  std::vector<std::size_t> sizes(components_.count, 0);
  for (NodeId n = 0; n < num_nodes_; ++n) {
    local_index_[n] = static_cast<std::uint32_t>(sizes[components_.label[n]]++);
  }
  std::vector<Eigen::MatrixXd> laplacians(components_.count);
  for (std::size_t c = 0; c < components_.count; ++c) {
    const auto s = static_cast<Eigen::Index>(sizes[c]);
    laplacians[c] = Eigen::MatrixXd::Zero(s, s);
  }
  for (const Edge& e : graph.edges()) {
    const NodeId a = graph.user_node(e.user);
    const NodeId b = graph.item_node(e.item);
    auto& lap = laplacians[components_.label[a]];
    const auto i = local_index_[a];
    const auto j = local_index_[b];
    lap(i, i) += 1.0;
    lap(j, j) += 1.0;
    lap(i, j) -= 1.0;
    lap(j, i) -= 1.0;
  }
  pinv_.reserve(components_.count);
  for (auto& lap : laplacians) {
    pinv_.push_back(laplacian_pinv(lap));
    lap.resize(0, 0);
  }
}

double ResistanceSolver::resistance(NodeId a, NodeId b) const {
  if (a >= num_nodes_ || b >= num_nodes_) {
    throw ContractError("node id out of range: " + std::to_string(std::max(a, b)));
  }
  if (a == b) return 0.0;
  if (!components_.connected(a, b)) return kInfiniteResistance;
  const auto& p = pinv_[components_.label[a]];
  const auto i = local_index_[a];
  const auto j = local_index_[b];
  return std::max(0.0, p(i, i) + p(j, j) - 2.0 * p(i, j));
}

double exact_resistance(const BipartiteGraph& pos_graph, NodeId u, NodeId v) {
  if (u >= pos_graph.num_nodes() || v >= pos_graph.num_nodes()) {
    throw ContractError("node id out of range: " + std::to_string(std::max(u, v)));
  }
  return ResistanceSolver(pos_graph).resistance(u, v);
}

CommuteTimeEstimator::CommuteTimeEstimator(const BipartiteGraph& graph)
    : graph_(graph), components_(connected_components(graph)) {}

CommuteEstimate CommuteTimeEstimator::estimate(NodeId u, NodeId v,
                                               const CommuteConfig& config,
                                               std::uint64_t stream) const {
  if (u >= graph_.num_nodes() || v >= graph_.num_nodes()) {
    throw ContractError("node id out of range: " + std::to_string(std::max(u, v)));
  }
  if (!components_.connected(u, v)) {
    throw ContractError("commute time between disconnected nodes " +
                        std::to_string(u) + " and " + std::to_string(v) +
                        " is infinite");
  }
  if (config.max_walks == 0) throw ContractError("max_walks must be positive");
  if (u == v) return CommuteEstimate{0.0, 0.0, 0};

  std::mt19937_64 rng = make_stream(config.seed, stream);
  auto hit = [&](NodeId from, NodeId to) {
    std::uint64_t steps = 0;
    NodeId node = from;
    while (node != to) {
      const auto incident = graph_.node_edges(node);
      node = graph_.other_end(incident[pick(rng, incident.size())], node);
      ++steps;
    }
    return steps;
  };

  double mean = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  while (true) {
    const double x = static_cast<double>(hit(u, v) + hit(v, u));
    ++k;
    const double delta = x - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (x - mean);
    if (k >= config.max_walks) break;
    const double update = std::abs(delta) / static_cast<double>(k);
    if (k >= config.min_walks && update < config.tolerance) break;
  }
  const double variance = k > 1 ? m2 / static_cast<double>(k - 1) : 0.0;
  return CommuteEstimate{mean, std::sqrt(variance / static_cast<double>(k)), k};
}

CommuteEstimate commute_time_mc(const BipartiteGraph& pos_graph, NodeId u,
                                NodeId v, const CommuteConfig& config) {
  return CommuteTimeEstimator(pos_graph).estimate(u, v, config);
}

ScoreVector effective_conductance(const BipartiteGraph& graph,
                                  const ConductanceOptions& options,
                                  std::vector<CommuteEstimate>* estimates) {
  const BipartiteGraph pos = positive_subgraph(graph);
  ScoreVector g_eff{Semantics::kEffectiveConductance,
                    std::vector<double>(graph.num_edges(), 0.0)};

  if (options.mode == ConductanceMode::kExact) {
    const ResistanceSolver solver(pos);
    for (EdgeId e = 0; e < graph.num_edges(); ++e) {
      const Edge& edge = graph.edge(e);
      const double r =
          solver.resistance(graph.user_node(edge.user), graph.item_node(edge.item));
      g_eff[e] = std::isinf(r) ? 0.0 : 1.0 / r;
    }
    if (estimates != nullptr) estimates->clear();
    return g_eff;
  }

  const CommuteTimeEstimator estimator(pos);
  const double volume = 2.0 * static_cast<double>(pos.num_edges());
  std::vector<CommuteEstimate> local(graph.num_edges());
  internal::parallel_for(graph.num_edges(), options.workers, [&](std::size_t e) {
    const Edge& edge = graph.edge(static_cast<EdgeId>(e));
    const NodeId a = graph.user_node(edge.user);
    const NodeId b = graph.item_node(edge.item);
    if (!estimator.components().connected(a, b)) return;
    local[e] = estimator.estimate(a, b, options.commute, e);
    g_eff[e] = volume / local[e].value;
  });
  if (estimates != nullptr) *estimates = std::move(local);
  return g_eff;
}

ScoreVector hardness_ec(const BipartiteGraph& graph, const ScoreVector& g_eff) {
  if (g_eff.size() != graph.num_edges()) {
    throw ContractError("G_eff vector does not match the graph's edge count");
  }
  ScoreVector h{Semantics::kHardness, std::vector<double>(graph.num_edges())};
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    h[e] = std::max(0.0, g_eff[e] - graph.edge(e).label);
  }
  return h;
}

ScoreVector hardness_ec(const BipartiteGraph& graph,
                        const ConductanceOptions& options) {
  return hardness_ec(graph, effective_conductance(graph, options));
}

ScoreVector hardness_er(const BipartiteGraph& graph) {
  const ResistanceSolver solver(graph);
  ScoreVector h{Semantics::kHardness, std::vector<double>(graph.num_edges())};
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    const Edge& edge = graph.edge(e);
    h[e] = solver.resistance(graph.user_node(edge.user), graph.item_node(edge.item));
  }
  return h;
}

}  // namespace graphsub
