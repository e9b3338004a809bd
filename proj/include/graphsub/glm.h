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

#ifndef GRAPHSUB_GLM_H_
#define GRAPHSUB_GLM_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "graphsub/graph.h"
#include "graphsub/sampling.h"
#include "graphsub/score_vector.h"

namespace graphsub {

double sigmoid(double x);
// log(1 + e^x) without overflow.
double softplus(double x);

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t epochs = 20;
  std::size_t batch_size = 1024;
  double l2 = 1e-6;
  // Decoupled decay: params -= learning_rate * weight_decay * params on
  // every update, outside the adaptive scaling.
  double weight_decay = 0.0;
  std::size_t dim = 8;
  std::uint64_t seed = 0;
  double init_scale = 0.1;
  // When false the log-rates are ignored (plain logistic loss).
  bool log_odds_correction = true;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Factorized logistic model:
//   g(x) = <user_emb(u), item_emb(v)> + <w, c> + b,  p(y=1|x) = sigmoid(g).
// Users and items outside the vocabulary share one cold-start row per side.
class GlmModel {
 public:
  GlmModel() = default;
  // Zero-initialized parameters.
  GlmModel(std::vector<std::string> users, std::vector<std::string> items,
           std::size_t dim, std::size_t context_dim);

  std::size_t dim() const { return dim_; }
  std::size_t context_dim() const { return context_dim_; }
  std::size_t num_users() const { return users_.size(); }
  std::size_t num_items() const { return items_.size(); }
  const std::vector<std::string>& users() const { return users_; }
  const std::vector<std::string>& items() const { return items_; }

  std::size_t user_row(std::string_view user) const;
  std::size_t item_row(std::string_view item) const;

  double logit(const InteractionRecord& record) const;
  double predict(const InteractionRecord& record) const;
  // Logit for already resolved rows.
  double logit_at(std::size_t user_row, std::size_t item_row,
                  std::span<const double> context) const;

  // Flat parameter layout: user rows (num_users + 1) * dim, item rows
  // (num_items + 1) * dim, context weights, bias.
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::size_t user_offset(std::size_t row) const { return row * dim_; }
  std::size_t item_offset(std::size_t row) const {
    return (num_users() + 1 + row) * dim_;
  }
  std::size_t context_offset() const { return (num_users() + num_items() + 2) * dim_; }
  std::size_t bias_offset() const { return context_offset() + context_dim_; }

  // Normal(0, scale) embeddings for the vocabulary rows; cold-start rows,
  // context weights and bias stay zero.
  void randomize(std::uint64_t seed, double scale);

  // Binary tensor file plus ".manifest" (dims, vocabulary hashes) and
  // ".vocab" sidecars.
  void save(const std::string& path) const;
  static GlmModel load(const std::string& path);

 private:
  std::vector<std::string> users_;
  std::vector<std::string> items_;
  std::unordered_map<std::string, std::size_t> user_lookup_;
  std::unordered_map<std::string, std::size_t> item_lookup_;
  std::size_t dim_ = 0;
  std::size_t context_dim_ = 0;
  std::vector<double> params_;
};

// Mean negative log-likelihood over included records of the labels under
// the corrected probability sigmoid(g - log pi). Equals plain binary
// cross-entropy when every rate is 1. When `gradient` is non-null it
// receives d(loss)/d(params). Throws ContractError for an included record
// with rate 0.
double corrected_loss(const GlmModel& model, const Dataset& dataset,
                      const SamplingPlan& plan,
                      std::vector<double>* gradient = nullptr);

// Per-epoch training record.
struct FitTrace {
  std::vector<double> epoch_loss;
  // AUC of the model's probabilities for the epoch's included records, each
  // scored just before the update on its batch. NaN when the included
  // records hold a single class.
  std::vector<double> progressive_auc;
  // Called after every epoch with the 0-based epoch and current model.
  std::function<void(std::size_t, const GlmModel&)> on_epoch;
};

// Adam on the corrected loss over the included records. Embedding rows are
// updated only in batches that use them (lazy Adam); context weights and
// the bias every batch. L2 applies to all but the bias. The vocabulary is
// the users and items seen in included records. Throws ContractError when
// the loss becomes non-finite.
GlmModel fit(const Dataset& dataset, const SamplingPlan& plan,
             const TrainConfig& config, FitTrace* trace = nullptr);

std::vector<double> predict_all(const GlmModel& model, const Dataset& dataset);

// Per-edge mean predicted probability over the edge's records.
ScoreVector pilot_scores(const GlmModel& model, const Dataset& dataset,
                         const BipartiteGraph& graph);

}  // namespace graphsub

#endif  // GRAPHSUB_GLM_H_
