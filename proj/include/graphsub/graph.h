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

#ifndef GRAPHSUB_GRAPH_H_
#define GRAPHSUB_GRAPH_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace graphsub {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

// One raw interaction row: x_n = (user, item, context) with label y_n.
struct InteractionRecord {
  std::string user_id;
  std::string item_id;
  int label = 0;
  std::vector<double> context;
};

// Ordered interaction rows. Label counts are kept in sync with the rows and
// every row must carry the same number of context features.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<InteractionRecord> records);

  // Throws ContractError on a label outside {0,1} or a context length that
  // differs from the rows already present.
  void add(InteractionRecord record);

  const std::vector<InteractionRecord>& records() const { return records_; }
  const InteractionRecord& operator[](std::size_t i) const {
    return records_[i];
  }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  std::size_t n_pos() const { return n_pos_; }
  std::size_t n_neg() const { return records_.size() - n_pos_; }
  std::size_t context_dim() const { return context_dim_; }

 private:
  std::vector<InteractionRecord> records_;
  std::size_t n_pos_ = 0;
  std::size_t context_dim_ = 0;
};

// Reads a delimited file with a header row: user_id, item_id, label, then
// any number of context columns. Errors name the offending 1-based line.
Dataset read_dataset(const std::string& path, char delimiter = '\t');
void write_dataset(const Dataset& dataset, const std::string& path,
                   char delimiter = '\t');

// A deduplicated user-item pair. `label` is 1 iff any duplicate record is
// positive; `multiplicity` counts the duplicates.
struct Edge {
  NodeId user = 0;
  NodeId item = 0;
  int label = 0;
  std::uint32_t multiplicity = 1;
};

// Bipartite user-item graph with CSR adjacency over edge ids.
//
// Nodes are addressed two ways: per side (user index in [0, M), item index in
// [0, Q)) and in a unified numbering where users occupy [0, M) and items
// occupy [M, M + Q). Algorithms that do not care about sides (Laplacians,
// walks, components) use the unified numbering.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;

  // Assembles a graph from its parts and builds adjacency. `edge_of_record`
  // may be empty for derived graphs that are not tied to a dataset.
  static BipartiteGraph from_parts(std::vector<std::string> user_tokens,
                                   std::vector<std::string> item_tokens,
                                   std::vector<Edge> edges,
                                   std::vector<EdgeId> edge_of_record);

  std::size_t num_users() const { return user_tokens_.size(); }
  std::size_t num_items() const { return item_tokens_.size(); }
  std::size_t num_nodes() const { return num_users() + num_items(); }
  std::size_t num_edges() const { return edges_.size(); }

  const std::vector<std::string>& user_tokens() const { return user_tokens_; }
  const std::vector<std::string>& item_tokens() const { return item_tokens_; }
  std::optional<NodeId> find_user(std::string_view token) const;
  std::optional<NodeId> find_item(std::string_view token) const;
  std::optional<EdgeId> find_edge(NodeId user, NodeId item) const;

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }

  std::span<const EdgeId> user_edges(NodeId user) const;
  std::span<const EdgeId> item_edges(NodeId item) const;
  std::size_t user_degree(NodeId user) const { return user_edges(user).size(); }
  std::size_t item_degree(NodeId item) const { return item_edges(item).size(); }

  NodeId user_node(NodeId user) const { return user; }
  NodeId item_node(NodeId item) const {
    return static_cast<NodeId>(num_users()) + item;
  }
  bool is_user_node(NodeId node) const { return node < num_users(); }
  // Edge ids incident to a node in the unified numbering.
  std::span<const EdgeId> node_edges(NodeId node) const;
  // The endpoint of `e` opposite to unified node `node`.
  NodeId other_end(EdgeId e, NodeId node) const;

  std::span<const EdgeId> edge_of_record() const { return edge_of_record_; }

  std::size_t num_positive_edges() const;

 private:
  void build_index();

  std::vector<std::string> user_tokens_;
  std::vector<std::string> item_tokens_;
  std::unordered_map<std::string, NodeId> user_lookup_;
  std::unordered_map<std::string, NodeId> item_lookup_;
  std::unordered_map<std::uint64_t, EdgeId> edge_lookup_;
  std::vector<Edge> edges_;
  std::vector<EdgeId> edge_of_record_;
  // CSR over the unified numbering: node_offsets_[n]..node_offsets_[n+1]
  // indexes node_adjacency_.
  std::vector<std::size_t> node_offsets_;
  std::vector<EdgeId> node_adjacency_;
};

// One edge per distinct (user, item) pair; node ids by first appearance.
BipartiteGraph build_graph(const Dataset& dataset);

// The label-1 edges with node numbering preserved. Edge order follows the
// source graph.
BipartiteGraph positive_subgraph(const BipartiteGraph& graph);

struct Components {
  // Component id per unified node id, numbered by smallest member node.
  std::vector<std::uint32_t> label;
  std::size_t count = 0;

  bool connected(NodeId a, NodeId b) const { return label[a] == label[b]; }
};

Components connected_components(const BipartiteGraph& graph);

// Text edge list plus a ".idx" sidecar holding the node tokens and the
// record-to-edge map.
void write_graph(const BipartiteGraph& graph, const std::string& path);
BipartiteGraph read_graph(const std::string& path);

}  // namespace graphsub

#endif  // GRAPHSUB_GRAPH_H_
