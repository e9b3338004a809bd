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

#include "graphsub/glm.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "graphsub/error.h"
#include "graphsub/eval.h"
#include "graphsub/hash.h"
#include "graphsub/random.h"
#include "text_util.h"

namespace graphsub {
namespace {

constexpr char kMagic[8] = {'G', 'S', 'U', 'B', 'G', 'L', 'M', '1'};

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    out += t;
    out += '\n';
  }
  return out;
}

void build_lookup(const std::vector<std::string>& tokens,
                  std::unordered_map<std::string, std::size_t>& lookup) {
  lookup.clear();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!lookup.emplace(tokens[i], i).second) {
      throw ContractError("duplicate vocabulary token '" + tokens[i] + "'");
    }
  }
}

struct Row {
  std::size_t user;
  std::size_t item;
  std::size_t record;
};

// Adds the gradient of one record's loss, scaled by `weight`, and returns
// the record's loss.
double accumulate(const GlmModel& model, const Row& row,
                  const InteractionRecord& record, double log_rate,
                  double weight, std::span<double> grad) {
  const double g = model.logit_at(row.user, row.item, record.context) - log_rate;
  const double loss = softplus(g) - record.label * g;
  const double dg = weight * (sigmoid(g) - record.label);
  const auto p = model.params();
  const std::size_t d = model.dim();
  const std::size_t uo = model.user_offset(row.user);
  const std::size_t io = model.item_offset(row.item);
  for (std::size_t k = 0; k < d; ++k) {
    grad[uo + k] += dg * p[io + k];
    grad[io + k] += dg * p[uo + k];
  }
  const std::size_t co = model.context_offset();
  for (std::size_t k = 0; k < record.context.size(); ++k) {
    grad[co + k] += dg * record.context[k];
  }
  grad[model.bias_offset()] += dg;
  return loss;
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

GlmModel::GlmModel(std::vector<std::string> users,
                   std::vector<std::string> items, std::size_t dim,
                   std::size_t context_dim)
    : users_(std::move(users)),
      items_(std::move(items)),
      dim_(dim),
      context_dim_(context_dim) {
  if (dim_ == 0) throw ContractError("embedding dimension must be at least 1");
  build_lookup(users_, user_lookup_);
  build_lookup(items_, item_lookup_);
  params_.assign(bias_offset() + 1, 0.0);
}

std::size_t GlmModel::user_row(std::string_view user) const {
  auto it = user_lookup_.find(std::string(user));
  return it == user_lookup_.end() ? users_.size() : it->second;
}

std::size_t GlmModel::item_row(std::string_view item) const {
  auto it = item_lookup_.find(std::string(item));
  return it == item_lookup_.end() ? items_.size() : it->second;
}

double GlmModel::logit_at(std::size_t urow, std::size_t irow,
                            std::span<const double> context) const {
  if (context.size() != context_dim_) {
    throw ContractError("record has " + std::to_string(context.size()) +
                        " context features, model expects " +
                        std::to_string(context_dim_));
  }
  const double* u = params_.data() + user_offset(urow);
  const double* v = params_.data() + item_offset(irow);
  double g = params_[bias_offset()];
  for (std::size_t k = 0; k < dim_; ++k) g += u[k] * v[k];
  const double* w = params_.data() + context_offset();
  for (std::size_t k = 0; k < context_dim_; ++k) g += w[k] * context[k];
  return g;
}

double GlmModel::logit(const InteractionRecord& record) const {
  return logit_at(user_row(record.user_id), item_row(record.item_id),
                    record.context);
}

double GlmModel::predict(const InteractionRecord& record) const {
  return sigmoid(logit(record));
}

void GlmModel::randomize(std::uint64_t seed, double scale) {
  std::mt19937_64 rng = make_stream(seed, 0x6c6d);
  std::normal_distribution<double> normal(0.0, scale);
  for (std::size_t r = 0; r < num_users(); ++r) {
    for (std::size_t k = 0; k < dim_; ++k) params_[user_offset(r) + k] = normal(rng);
  }
  for (std::size_t r = 0; r < num_items(); ++r) {
    for (std::size_t k = 0; k < dim_; ++k) params_[item_offset(r) + k] = normal(rng);
  }
}

void GlmModel::save(const std::string& path) const {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    const std::uint64_t header[4] = {dim_, context_dim_, users_.size(),
                                     items_.size()};
    out.write(kMagic, sizeof(kMagic));
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    out.write(reinterpret_cast<const char*>(params_.data()),
              static_cast<std::streamsize>(params_.size() * sizeof(double)));
    if (!out) throw IoError("failed writing " + path);
  }
  {
    std::ofstream out = internal::open_output(path + ".vocab");
    for (const auto& u : users_) out << "user\t" << u << '\n';
    for (const auto& i : items_) out << "item\t" << i << '\n';
    if (!out) throw IoError("failed writing " + path + ".vocab");
  }
  std::ofstream out = internal::open_output(path + ".manifest");
  out << "format=graphsub-glm v1\n"
      << "dim=" << dim_ << '\n'
      << "context_dim=" << context_dim_ << '\n'
      << "num_users=" << users_.size() << '\n'
      << "num_items=" << items_.size() << '\n'
      << "users_sha256=" << sha256_hex(join_tokens(users_)) << '\n'
      << "items_sha256=" << sha256_hex(join_tokens(items_)) << '\n'
      << "tensor_sha256=" << sha256_file(path) << '\n';
  if (!out) throw IoError("failed writing " + path + ".manifest");
}

GlmModel GlmModel::load(const std::string& path) {
  std::map<std::string, std::string> manifest;
  {
    std::ifstream in = internal::open_input(path + ".manifest");
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) manifest[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  std::vector<std::string> users;
  std::vector<std::string> items;
  {
    std::ifstream in = internal::open_input(path + ".vocab");
    std::string line;
    while (std::getline(in, line)) {
      const auto f = internal::split(internal::strip_cr(line), '\t');
      if (f.size() != 2) throw ContractError(path + ".vocab: malformed line");
      (f[0] == "user" ? users : items).emplace_back(f[1]);
    }
  }
  if (manifest["users_sha256"] != sha256_hex(join_tokens(users)) ||
      manifest["items_sha256"] != sha256_hex(join_tokens(items))) {
    throw ContractError(path + ": vocabulary does not match its manifest");
  }
  if (manifest["tensor_sha256"] != sha256_file(path)) {
    throw ContractError(path + ": tensor file does not match its manifest");
  }

  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  char magic[sizeof(kMagic)];
  std::uint64_t header[4];
  in.read(magic, sizeof(magic));
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ContractError(path + ": not a graphsub model file");
  }
  if (header[2] != users.size() || header[3] != items.size()) {
    throw ContractError(path + ": vocabulary size does not match the tensor");
  }
  GlmModel model(std::move(users), std::move(items), header[0], header[1]);
  in.read(reinterpret_cast<char*>(model.params_.data()),
          static_cast<std::streamsize>(model.params_.size() * sizeof(double)));
  if (!in) throw ContractError(path + ": truncated parameter tensor");
  return model;
}

double corrected_loss(const GlmModel& model, const Dataset& dataset,
                      const SamplingPlan& plan, std::vector<double>* gradient) {
  if (plan.size() != dataset.size()) {
    throw ContractError("plan does not match the dataset");
  }
  std::vector<std::size_t> kept;
  for (std::size_t n = 0; n < dataset.size(); ++n) {
    if (!plan.included[n]) continue;
    if (!(plan.rate[n] > 0.0)) {
      throw ContractError("included record " + std::to_string(n) +
                          " has rate 0; its log-rate is undefined");
    }
    kept.push_back(n);
  }
  if (kept.empty()) throw ContractError("plan includes no records");
  std::vector<double> scratch;
  std::vector<double>& grad = gradient ? *gradient : scratch;
  grad.assign(model.params().size(), 0.0);
  const double weight = 1.0 / static_cast<double>(kept.size());
  double total = 0.0;
  for (std::size_t n : kept) {
    const auto& r = dataset[n];
    const Row row{model.user_row(r.user_id), model.item_row(r.item_id), n};
    total += accumulate(model, row, r, plan.log_rate[n], weight, grad);
  }
  return total * weight;
}

GlmModel fit(const Dataset& dataset, const SamplingPlan& plan,
             const TrainConfig& config, FitTrace* trace) {
  if (plan.size() != dataset.size()) {
    throw ContractError("plan does not match the dataset");
  }
  if (!(config.learning_rate > 0.0) || config.epochs == 0 || config.batch_size == 0) {
    throw ContractError("learning rate, epochs and batch size must be positive");
  }

  std::vector<std::string> users;
  std::vector<std::string> items;
  {
    std::unordered_map<std::string_view, bool> seen_u;
    std::unordered_map<std::string_view, bool> seen_i;
    for (std::size_t n = 0; n < dataset.size(); ++n) {
      if (!plan.included[n]) continue;
      if (!(plan.rate[n] > 0.0)) {
        throw ContractError("included record " + std::to_string(n) +
                            " has rate 0; its log-rate is undefined");
      }
      const auto& r = dataset[n];
      if (seen_u.emplace(r.user_id, true).second) users.push_back(r.user_id);
      if (seen_i.emplace(r.item_id, true).second) items.push_back(r.item_id);
    }
  }
  GlmModel model(std::move(users), std::move(items), config.dim,
                 dataset.context_dim());
  model.randomize(config.seed, config.init_scale);

  std::vector<Row> rows;
  for (std::size_t n = 0; n < dataset.size(); ++n) {
    if (!plan.included[n]) continue;
    rows.push_back(Row{model.user_row(dataset[n].user_id),
                       model.item_row(dataset[n].item_id), n});
  }
  if (rows.empty()) throw ContractError("plan includes no records");

  auto params = model.params();
  const std::size_t n_params = params.size();
  const std::size_t d = model.dim();
  std::vector<double> grad(n_params, 0.0);
  std::vector<double> m(n_params, 0.0);
  std::vector<double> v(n_params, 0.0);
  const std::size_t bias = model.bias_offset();
  const std::size_t shared_begin = model.context_offset();
  // Embedding rows touched by the current batch, by offset.
  std::vector<std::uint8_t> touched(shared_begin / std::max<std::size_t>(d, 1) + 1, 0);
  std::vector<std::size_t> touched_rows;
  double beta1_t = 1.0;
  double beta2_t = 1.0;
  if (trace != nullptr) {
    trace->epoch_loss.clear();
    trace->progressive_auc.clear();
  }
  std::vector<double> seen_prob;
  std::vector<int> seen_label;
  bool both_classes = false;
  for (const Row& r : rows) both_classes |= dataset[r.record].label != dataset[rows[0].record].label;

  auto adam = [&](std::size_t k, double step) {
    const double gk = k == bias ? grad[k] : grad[k] + config.l2 * params[k];
    m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * gk;
    v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * gk * gk;
    params[k] -= step * m[k] / (std::sqrt(v[k]) + config.epsilon);
    if (k != bias) params[k] -= config.learning_rate * config.weight_decay * params[k];
    grad[k] = 0.0;
  };
  auto touch = [&](std::size_t offset) {
    const std::size_t r = offset / d;
    if (!touched[r]) {
      touched[r] = 1;
      touched_rows.push_back(r);
    }
  };

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::mt19937_64 rng = make_stream(config.seed, 0x5eed0000ULL + epoch);
    std::shuffle(rows.begin(), rows.end(), rng);
    double total = 0.0;
    seen_prob.clear();
    seen_label.clear();
    for (std::size_t start = 0; start < rows.size(); start += config.batch_size) {
      const std::size_t end = std::min(rows.size(), start + config.batch_size);
      const double weight = 1.0 / static_cast<double>(end - start);
      for (std::size_t i = start; i < end; ++i) {
        const std::size_t n = rows[i].record;
        const double log_rate = config.log_odds_correction ? plan.log_rate[n] : 0.0;
        if (trace != nullptr) {
          seen_prob.push_back(sigmoid(
              model.logit_at(rows[i].user, rows[i].item, dataset[n].context)));
          seen_label.push_back(dataset[n].label);
        }
        total += accumulate(model, rows[i], dataset[n], log_rate, weight, grad);
        if (d > 0) {
          touch(model.user_offset(rows[i].user));
          touch(model.item_offset(rows[i].item));
        }
      }
      beta1_t *= config.beta1;
      beta2_t *= config.beta2;
      const double step = config.learning_rate * std::sqrt(1.0 - beta2_t) / (1.0 - beta1_t);
      // Lazy update: rows absent from the batch keep their parameters and
      // moments.
      for (std::size_t r : touched_rows) {
        for (std::size_t k = r * d; k < (r + 1) * d; ++k) adam(k, step);
        touched[r] = 0;
      }
      touched_rows.clear();
      for (std::size_t k = shared_begin; k < n_params; ++k) adam(k, step);
    }
    const double mean_loss = total / static_cast<double>(rows.size());
    if (!std::isfinite(mean_loss)) {
      throw ContractError("training diverged at epoch " + std::to_string(epoch + 1) +
                          " (loss is not finite); try a smaller learning rate");
    }
    if (trace != nullptr) {
      trace->epoch_loss.push_back(mean_loss);
      trace->progressive_auc.push_back(both_classes
                                           ? auc(seen_prob, seen_label)
                                           : std::numeric_limits<double>::quiet_NaN());
      if (trace->on_epoch) trace->on_epoch(epoch, model);
    }
  }
  return model;
}

std::vector<double> predict_all(const GlmModel& model, const Dataset& dataset) {
  std::vector<double> out;
  out.reserve(dataset.size());
  for (const auto& r : dataset.records()) out.push_back(model.predict(r));
  return out;
}

ScoreVector pilot_scores(const GlmModel& model, const Dataset& dataset,
                         const BipartiteGraph& graph) {
  if (graph.edge_of_record().size() != dataset.size()) {
    throw ContractError("graph was not built from this dataset");
  }
  ScoreVector h{Semantics::kHardness, std::vector<double>(graph.num_edges(), 0.0)};
  std::vector<double> count(graph.num_edges(), 0.0);
  for (std::size_t n = 0; n < dataset.size(); ++n) {
    const EdgeId e = graph.edge_of_record()[n];
    h[e] += model.predict(dataset[n]);
    count[e] += 1.0;
  }
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    if (count[e] > 0.0) h[e] /= count[e];
  }
  return h;
}

}  // namespace graphsub
