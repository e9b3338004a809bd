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

#include "graphsub/graph.h"

#include <algorithm>
#include <numeric>
#include <utility>

#include "graphsub/error.h"
#include "text_util.h"

namespace graphsub {
namespace {

constexpr std::string_view kGraphMagic = "# graphsub-graph v1";
constexpr std::string_view kIndexMagic = "# graphsub-graph-index v1";

std::uint64_t pair_key(NodeId user, NodeId item) {
  return (static_cast<std::uint64_t>(user) << 32) | item;
}

void check_token(const std::string& token) {
  if (token.empty() || token.find_first_of("\t\n\r") != std::string::npos) {
    throw ContractError("token '" + token +
                        "' is empty or contains a tab or newline");
  }
}

}  // namespace

Dataset::Dataset(std::vector<InteractionRecord> records) {
  records_.reserve(records.size());
  for (auto& r : records) add(std::move(r));
}

void Dataset::add(InteractionRecord record) {
  if (record.label != 0 && record.label != 1) {
    throw ContractError("record " + std::to_string(records_.size()) +
                        ": label must be 0 or 1, got " +
                        std::to_string(record.label));
  }
  if (records_.empty()) {
    context_dim_ = record.context.size();
  } else if (record.context.size() != context_dim_) {
    throw ContractError("record " + std::to_string(records_.size()) +
                        ": expected " + std::to_string(context_dim_) +
                        " context features, got " +
                        std::to_string(record.context.size()));
  }
  n_pos_ += static_cast<std::size_t>(record.label);
  records_.push_back(std::move(record));
}

Dataset read_dataset(const std::string& path, char delimiter) {
  std::ifstream in = internal::open_input(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw ContractError(path + ": missing header row");
  }
  const auto header = internal::split(internal::strip_cr(line), delimiter);
  if (header.size() < 3) {
    throw ContractError(path +
                        ": header needs user_id, item_id and label columns");
  }
  const std::size_t n_columns = header.size();

  Dataset dataset;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = internal::strip_cr(line);
    if (row.empty()) continue;
    const auto fields = internal::split(row, delimiter);
    const std::string where = path + ":" + std::to_string(line_no);
    if (fields.size() != n_columns) {
      throw ContractError(where + ": expected " + std::to_string(n_columns) +
                          " columns, got " + std::to_string(fields.size()));
    }
    InteractionRecord record;
    record.user_id = std::string(fields[0]);
    record.item_id = std::string(fields[1]);
    if (record.user_id.empty() || record.item_id.empty()) {
      throw ContractError(where + ": empty user or item id");
    }
    if (fields[2] == "0") {
      record.label = 0;
    } else if (fields[2] == "1") {
      record.label = 1;
    } else {
      throw ContractError(where + ": malformed label '" +
                          std::string(fields[2]) + "'");
    }
    record.context.reserve(n_columns - 3);
    for (std::size_t c = 3; c < n_columns; ++c) {
      auto value = internal::parse_double(fields[c]);
      if (!value) {
        throw ContractError(where + ": malformed context value '" +
                            std::string(fields[c]) + "'");
      }
      record.context.push_back(*value);
    }
    dataset.add(std::move(record));
  }
  return dataset;
}

void write_dataset(const Dataset& dataset, const std::string& path,
                   char delimiter) {
  std::ofstream out = internal::open_output(path);
  out << "user_id" << delimiter << "item_id" << delimiter << "label";
  for (std::size_t c = 0; c < dataset.context_dim(); ++c) {
    out << delimiter << "c" << c;
  }
  out << '\n';
  for (const auto& r : dataset.records()) {
    out << r.user_id << delimiter << r.item_id << delimiter << r.label;
    for (double x : r.context) out << delimiter << internal::format_double(x);
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

BipartiteGraph BipartiteGraph::from_parts(std::vector<std::string> user_tokens,
                                          std::vector<std::string> item_tokens,
                                          std::vector<Edge> edges,
                                          std::vector<EdgeId> edge_of_record) {
  BipartiteGraph g;
  g.user_tokens_ = std::move(user_tokens);
  g.item_tokens_ = std::move(item_tokens);
  g.edges_ = std::move(edges);
  g.edge_of_record_ = std::move(edge_of_record);
  g.build_index();
  return g;
}

void BipartiteGraph::build_index() {
  user_lookup_.clear();
  item_lookup_.clear();
  edge_lookup_.clear();
  for (NodeId i = 0; i < user_tokens_.size(); ++i) {
    if (!user_lookup_.emplace(user_tokens_[i], i).second) {
      throw ContractError("duplicate user token '" + user_tokens_[i] + "'");
    }
  }
  for (NodeId i = 0; i < item_tokens_.size(); ++i) {
    if (!item_lookup_.emplace(item_tokens_[i], i).second) {
      throw ContractError("duplicate item token '" + item_tokens_[i] + "'");
    }
  }
  const std::size_t n = num_nodes();
  std::vector<std::size_t> degree(n, 0);
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (edge.user >= num_users() || edge.item >= num_items()) {
      throw ContractError("edge " + std::to_string(e) +
                          " references a node out of range");
    }
    if (edge.label != 0 && edge.label != 1) {
      throw ContractError("edge " + std::to_string(e) + " has label " +
                          std::to_string(edge.label));
    }
    if (!edge_lookup_.emplace(pair_key(edge.user, edge.item), e).second) {
      throw ContractError("duplicate edge (" + user_tokens_[edge.user] + ", " +
                          item_tokens_[edge.item] + ")");
    }
    ++degree[edge.user];
    ++degree[item_node(edge.item)];
  }
  for (EdgeId e : edge_of_record_) {
    if (e >= edges_.size()) {
      throw ContractError("record maps to missing edge " + std::to_string(e));
    }
  }
  node_offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    node_offsets_[i + 1] = node_offsets_[i] + degree[i];
  }
  node_adjacency_.assign(node_offsets_[n], 0);
  std::vector<std::size_t> cursor(node_offsets_.begin(),
                                  node_offsets_.end() - 1);
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    node_adjacency_[cursor[edges_[e].user]++] = e;
    node_adjacency_[cursor[item_node(edges_[e].item)]++] = e;
  }
}

std::optional<NodeId> BipartiteGraph::find_user(std::string_view token) const {
  auto it = user_lookup_.find(std::string(token));
  if (it == user_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeId> BipartiteGraph::find_item(std::string_view token) const {
  auto it = item_lookup_.find(std::string(token));
  if (it == item_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeId> BipartiteGraph::find_edge(NodeId user,
                                                NodeId item) const {
  auto it = edge_lookup_.find(pair_key(user, item));
  if (it == edge_lookup_.end()) return std::nullopt;
  return it->second;
}

std::span<const EdgeId> BipartiteGraph::node_edges(NodeId node) const {
  return std::span<const EdgeId>(node_adjacency_)
      .subspan(node_offsets_[node], node_offsets_[node + 1] - node_offsets_[node]);
}

std::span<const EdgeId> BipartiteGraph::user_edges(NodeId user) const {
  return node_edges(user_node(user));
}

std::span<const EdgeId> BipartiteGraph::item_edges(NodeId item) const {
  return node_edges(item_node(item));
}

NodeId BipartiteGraph::other_end(EdgeId e, NodeId node) const {
  const Edge& edge = edges_[e];
  return node == edge.user ? item_node(edge.item) : edge.user;
}

std::size_t BipartiteGraph::num_positive_edges() const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(),
                    [](const Edge& e) { return e.label == 1; }));
}

BipartiteGraph build_graph(const Dataset& dataset) {
  if (dataset.empty()) throw ContractError("cannot build a graph: dataset is empty");

  std::vector<std::string> users;
  std::vector<std::string> items;
  std::unordered_map<std::string, NodeId> user_ids;
  std::unordered_map<std::string, NodeId> item_ids;
  std::unordered_map<std::uint64_t, EdgeId> edge_ids;
  std::vector<Edge> edges;
  std::vector<EdgeId> edge_of_record;
  edge_of_record.reserve(dataset.size());

  for (const auto& r : dataset.records()) {
    auto [uit, new_user] =
        user_ids.emplace(r.user_id, static_cast<NodeId>(users.size()));
    if (new_user) users.push_back(r.user_id);
    auto [iit, new_item] =
        item_ids.emplace(r.item_id, static_cast<NodeId>(items.size()));
    if (new_item) items.push_back(r.item_id);

    const NodeId u = uit->second;
    const NodeId v = iit->second;
    auto [eit, new_edge] =
        edge_ids.emplace(pair_key(u, v), static_cast<EdgeId>(edges.size()));
    if (new_edge) {
      edges.push_back(Edge{u, v, r.label, 1});
    } else {
      Edge& e = edges[eit->second];
      e.label = std::max(e.label, r.label);
      ++e.multiplicity;
    }
    edge_of_record.push_back(eit->second);
  }
  return BipartiteGraph::from_parts(std::move(users), std::move(items),
                                    std::move(edges), std::move(edge_of_record));
}

BipartiteGraph positive_subgraph(const BipartiteGraph& graph) {
  std::vector<Edge> kept;
  for (const Edge& e : graph.edges()) {
    if (e.label == 1) kept.push_back(e);
  }
  return BipartiteGraph::from_parts(graph.user_tokens(), graph.item_tokens(),
                                    std::move(kept), {});
}

Components connected_components(const BipartiteGraph& graph) {
  constexpr std::uint32_t kUnset = ~std::uint32_t{0};
  const std::size_t n = graph.num_nodes();
  Components result;
  result.label.assign(n, kUnset);
  std::vector<NodeId> stack;
  for (NodeId start = 0; start < n; ++start) {
    if (result.label[start] != kUnset) continue;
    const auto id = static_cast<std::uint32_t>(result.count++);
    result.label[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const NodeId node = stack.back();
      stack.pop_back();
      for (EdgeId e : graph.node_edges(node)) {
        const NodeId next = graph.other_end(e, node);
        if (result.label[next] == kUnset) {
          result.label[next] = id;
          stack.push_back(next);
        }
      }
    }
  }
  return result;
}

void write_graph(const BipartiteGraph& graph, const std::string& path) {
  for (const auto& t : graph.user_tokens()) check_token(t);
  for (const auto& t : graph.item_tokens()) check_token(t);
  {
    std::ofstream out = internal::open_output(path);
    out << kGraphMagic << '\n' << "user\titem\tlabel\tmultiplicity\n";
    for (const Edge& e : graph.edges()) {
      out << graph.user_tokens()[e.user] << '\t' << graph.item_tokens()[e.item]
          << '\t' << e.label << '\t' << e.multiplicity << '\n';
    }
    if (!out) throw IoError("failed writing " + path);
  }
  const std::string index_path = path + ".idx";
  std::ofstream out = internal::open_output(index_path);
  out << kIndexMagic << '\n';
  out << "users\t" << graph.num_users() << '\n';
  for (const auto& t : graph.user_tokens()) out << t << '\n';
  out << "items\t" << graph.num_items() << '\n';
  for (const auto& t : graph.item_tokens()) out << t << '\n';
  out << "records\t" << graph.edge_of_record().size() << '\n';
  for (EdgeId e : graph.edge_of_record()) out << e << '\n';
  if (!out) throw IoError("failed writing " + index_path);
}

namespace {

std::size_t read_section(std::ifstream& in, const std::string& path,
                         std::string_view name) {
  std::string line;
  if (std::getline(in, line)) {
    const auto fields = internal::split(internal::strip_cr(line), '\t');
    if (fields.size() == 2 && fields[0] == name) {
      if (auto n = internal::parse_int<std::size_t>(fields[1])) return *n;
    }
  }
  throw ContractError(path + ": expected section '" + std::string(name) + "'");
}

}  // namespace

BipartiteGraph read_graph(const std::string& path) {
  const std::string index_path = path + ".idx";
  std::vector<std::string> users;
  std::vector<std::string> items;
  std::vector<EdgeId> edge_of_record;
  {
    std::ifstream in = internal::open_input(index_path);
    std::string line;
    if (!std::getline(in, line) || internal::strip_cr(line) != kIndexMagic) {
      throw ContractError(index_path + ": not a graphsub graph index (v1)");
    }
    auto read_tokens = [&](std::string_view name, std::vector<std::string>& out) {
      const std::size_t n = read_section(in, index_path, name);
      out.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line)) {
          throw ContractError(index_path + ": truncated " + std::string(name));
        }
        out.emplace_back(internal::strip_cr(line));
      }
    };
    read_tokens("users", users);
    read_tokens("items", items);
    const std::size_t n_records = read_section(in, index_path, "records");
    edge_of_record.reserve(n_records);
    for (std::size_t i = 0; i < n_records; ++i) {
      std::optional<EdgeId> e;
      if (std::getline(in, line)) {
        e = internal::parse_int<EdgeId>(internal::strip_cr(line));
      }
      if (!e) throw ContractError(index_path + ": bad record entry " + std::to_string(i));
      edge_of_record.push_back(*e);
    }
  }

  std::unordered_map<std::string_view, NodeId> user_ids;
  std::unordered_map<std::string_view, NodeId> item_ids;
  for (NodeId i = 0; i < users.size(); ++i) user_ids.emplace(users[i], i);
  for (NodeId i = 0; i < items.size(); ++i) item_ids.emplace(items[i], i);

  std::ifstream in = internal::open_input(path);
  std::string line;
  if (!std::getline(in, line) || internal::strip_cr(line) != kGraphMagic) {
    throw ContractError(path + ": not a graphsub graph (v1)");
  }
  std::getline(in, line);  // column header
  std::vector<Edge> edges;
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = internal::strip_cr(line);
    if (row.empty()) continue;
    const auto f = internal::split(row, '\t');
    const std::string where = path + ":" + std::to_string(line_no);
    if (f.size() != 4) throw ContractError(where + ": expected 4 columns");
    auto u = user_ids.find(f[0]);
    auto v = item_ids.find(f[1]);
    auto label = internal::parse_int<int>(f[2]);
    auto mult = internal::parse_int<std::uint32_t>(f[3]);
    if (u == user_ids.end() || v == item_ids.end() || !label || !mult) {
      throw ContractError(where + ": malformed edge row");
    }
    edges.push_back(Edge{u->second, v->second, *label, *mult});
  }
  return BipartiteGraph::from_parts(std::move(users), std::move(items),
                                    std::move(edges), std::move(edge_of_record));
}

}  // namespace graphsub
