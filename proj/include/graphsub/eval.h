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

#ifndef GRAPHSUB_EVAL_H_
#define GRAPHSUB_EVAL_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace graphsub {

struct Prediction {
  std::string user;
  std::string item;
  double probability = 0.0;
  int label = 0;
};

using PredictionSet = std::vector<Prediction>;

// Probability that a random positive outranks a random negative, ties
// counted half. Throws ContractError unless both classes are present.
double auc(std::span<const double> scores, std::span<const int> labels);
double auc(const PredictionSet& predictions);

struct NdcgResult {
  double mean = 0.0;
  std::size_t users_evaluated = 0;
  // Users without a positive, left out of the mean.
  std::size_t users_excluded = 0;
};

// Binary-gain NDCG@k per user (records grouped by user id), averaged.
NdcgResult ndcg_at_k(const PredictionSet& predictions, std::size_t k);

// Adaptive calibration error: records sorted by score into n_bins bins of
// equal count (the first N mod n_bins bins take one extra record), then the
// mean over bins of |mean label - mean score|.
double ace(std::span<const double> scores, std::span<const int> labels,
           std::size_t n_bins = 15);
double ace(const PredictionSet& predictions, std::size_t n_bins = 15);

// Tab-separated with header: user, item, label, prob.
void write_predictions(const PredictionSet& predictions, const std::string& path);
PredictionSet read_predictions(const std::string& path);

}  // namespace graphsub

#endif  // GRAPHSUB_EVAL_H_
