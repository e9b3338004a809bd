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

#ifndef GRAPHSUB_SCORE_VECTOR_H_
#define GRAPHSUB_SCORE_VECTOR_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphsub/graph.h"

namespace graphsub {

// What a per-edge score means.
enum class Semantics {
  kEffectiveConductance,  // G_eff
  kEffectiveResistance,   // R_eff
  kNormalized,            // Z, min-max normalized score
  kLabel,                 // Y
  kUncertainty,           // B or smoothed B
  kCorrected,             // Z-hat, and propagated scores
  kHardness,
  kRate,
};

std::string_view semantics_name(Semantics s);
std::optional<Semantics> parse_semantics(std::string_view name);

// Real values aligned to the edge ids of one BipartiteGraph.
struct ScoreVector {
  Semantics semantics = Semantics::kHardness;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

// Throws ContractError unless the vector has one finite value per edge and
// respects the range of its semantics ([0,1] for normalized and rate).
void validate_scores(const ScoreVector& scores, const BipartiteGraph& graph);

// Edge labels as a ScoreVector.
ScoreVector edge_labels(const BipartiteGraph& graph);

// Expands an edge-aligned vector to one value per record.
std::vector<double> per_record(const ScoreVector& scores,
                               const BipartiteGraph& graph);

// Tab-separated: user, item, label, score, tag; one row per edge in edge
// order, with a header row.
void write_scores(const ScoreVector& scores, const BipartiteGraph& graph,
                  const std::string& path);
ScoreVector read_scores(const std::string& path, const BipartiteGraph& graph);

}  // namespace graphsub

#endif  // GRAPHSUB_SCORE_VECTOR_H_
