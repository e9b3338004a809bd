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

#include "graphsub/score_vector.h"

#include <array>
#include <cmath>
#include <utility>

#include "graphsub/error.h"
#include "text_util.h"

namespace graphsub {
namespace {

constexpr std::array<std::pair<Semantics, std::string_view>, 8> kNames = {{
    {Semantics::kEffectiveConductance, "G_eff"},
    {Semantics::kEffectiveResistance, "R_eff"},
    {Semantics::kNormalized, "Z"},
    {Semantics::kLabel, "Y"},
    {Semantics::kUncertainty, "B"},
    {Semantics::kCorrected, "Z_hat"},
    {Semantics::kHardness, "hardness"},
    {Semantics::kRate, "rate"},
}};

}  // namespace

std::string_view semantics_name(Semantics s) {
  for (const auto& [sem, name] : kNames) {
    if (sem == s) return name;
  }
  return "unknown";
}

std::optional<Semantics> parse_semantics(std::string_view name) {
  for (const auto& [sem, n] : kNames) {
    if (n == name) return sem;
  }
  return std::nullopt;
}

void validate_scores(const ScoreVector& scores, const BipartiteGraph& graph) {
  if (scores.size() != graph.num_edges()) {
    throw ContractError("score vector has " + std::to_string(scores.size()) +
                        " entries for a graph with " +
                        std::to_string(graph.num_edges()) + " edges");
  }
  const bool unit_range = scores.semantics == Semantics::kNormalized ||
                          scores.semantics == Semantics::kRate;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double x = scores[i];
    if (!std::isfinite(x)) {
      throw ContractError("score " + std::to_string(i) + " is not finite");
    }
    if (unit_range && (x < 0.0 || x > 1.0)) {
      throw ContractError("score " + std::to_string(i) + " = " +
                          std::to_string(x) + " outside [0, 1] for " +
                          std::string(semantics_name(scores.semantics)));
    }
  }
}

ScoreVector edge_labels(const BipartiteGraph& graph) {
  ScoreVector y{Semantics::kLabel, std::vector<double>(graph.num_edges())};
  for (EdgeId e = 0; e < graph.num_edges(); ++e) y[e] = graph.edge(e).label;
  return y;
}

std::vector<double> per_record(const ScoreVector& scores,
                               const BipartiteGraph& graph) {
  std::vector<double> out;
  out.reserve(graph.edge_of_record().size());
  for (EdgeId e : graph.edge_of_record()) out.push_back(scores[e]);
  return out;
}

void write_scores(const ScoreVector& scores, const BipartiteGraph& graph,
                  const std::string& path) {
  validate_scores(scores, graph);
  std::ofstream out = internal::open_output(path);
  out << "user\titem\tlabel\tscore\ttag\n";
  const std::string_view tag = semantics_name(scores.semantics);
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    const Edge& edge = graph.edge(e);
    out << graph.user_tokens()[edge.user] << '\t'
        << graph.item_tokens()[edge.item] << '\t' << edge.label << '\t'
        << internal::format_double(scores[e]) << '\t' << tag << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

ScoreVector read_scores(const std::string& path, const BipartiteGraph& graph) {
  std::ifstream in = internal::open_input(path);
  std::string line;
  std::getline(in, line);  // header
  ScoreVector scores;
  scores.values.assign(graph.num_edges(), 0.0);
  std::vector<bool> seen(graph.num_edges(), false);
  std::optional<Semantics> tag;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = internal::strip_cr(line);
    if (row.empty()) continue;
    const auto f = internal::split(row, '\t');
    const std::string where = path + ":" + std::to_string(line_no);
    if (f.size() != 5) throw ContractError(where + ": expected 5 columns");
    const auto u = graph.find_user(f[0]);
    const auto v = graph.find_item(f[1]);
    const auto e = (u && v) ? graph.find_edge(*u, *v) : std::nullopt;
    if (!e) {
      throw ContractError(where + ": pair (" + std::string(f[0]) + ", " +
                          std::string(f[1]) + ") is not an edge of the graph");
    }
    const auto value = internal::parse_double(f[3]);
    const auto sem = parse_semantics(f[4]);
    if (!value || !sem) throw ContractError(where + ": malformed score row");
    if (tag && *tag != *sem) throw ContractError(where + ": mixed semantics tags");
    tag = sem;
    if (seen[*e]) throw ContractError(where + ": duplicate edge");
    seen[*e] = true;
    scores[*e] = *value;
  }
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    if (!seen[e]) {
      const Edge& edge = graph.edge(e);
      throw ContractError(path + ": no score for edge (" +
                          graph.user_tokens()[edge.user] + ", " +
                          graph.item_tokens()[edge.item] + ")");
    }
  }
  scores.semantics = tag.value_or(Semantics::kHardness);
  validate_scores(scores, graph);
  return scores;
}

}  // namespace graphsub
