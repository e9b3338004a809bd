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

#include "graphsub/eval.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "graphsub/error.h"
#include "text_util.h"

namespace graphsub {
namespace {

void split_columns(const PredictionSet& predictions, std::vector<double>& scores,
                   std::vector<int>& labels) {
  scores.clear();
  labels.clear();
  for (const auto& p : predictions) {
    scores.push_back(p.probability);
    labels.push_back(p.label);
  }
}

}  // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw ContractError("auc: scores and labels differ in length");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double n_pos = 0.0;
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    // Ranks i+1..j share their average.
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] == 1) {
        n_pos += 1.0;
        positive_rank_sum += rank;
      }
    }
    i = j;
  }
  const double n_neg = static_cast<double>(scores.size()) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) {
    throw ContractError("auc needs at least one positive and one negative");
  }
  return (positive_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

double auc(const PredictionSet& predictions) {
  std::vector<double> scores;
  std::vector<int> labels;
  split_columns(predictions, scores, labels);
  return auc(scores, labels);
}

NdcgResult ndcg_at_k(const PredictionSet& predictions, std::size_t k) {
  if (k == 0) throw ContractError("ndcg: k must be positive");
  std::unordered_map<std::string_view, std::size_t> group_of;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    auto [it, fresh] = group_of.emplace(predictions[i].user, groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  NdcgResult result;
  double total = 0.0;
  for (auto& group : groups) {
    std::stable_sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) {
      return predictions[a].probability > predictions[b].probability;
    });
    std::size_t n_pos = 0;
    for (std::size_t i : group) n_pos += predictions[i].label == 1;
    if (n_pos == 0) {
      ++result.users_excluded;
      continue;
    }
    double dcg = 0.0;
    const std::size_t depth = std::min(k, group.size());
    for (std::size_t r = 0; r < depth; ++r) {
      if (predictions[group[r]].label == 1) dcg += 1.0 / std::log2(r + 2.0);
    }
    double ideal = 0.0;
    for (std::size_t r = 0; r < std::min(k, n_pos); ++r) ideal += 1.0 / std::log2(r + 2.0);
    total += dcg / ideal;
    ++result.users_evaluated;
  }
  if (result.users_evaluated > 0) {
    result.mean = total / static_cast<double>(result.users_evaluated);
  }
  return result;
}

double ace(std::span<const double> scores, std::span<const int> labels,
           std::size_t n_bins) {
  if (scores.size() != labels.size()) {
    throw ContractError("ace: scores and labels differ in length");
  }
  if (n_bins == 0) throw ContractError("ace: need at least one bin");
  if (scores.size() < n_bins) {
    throw ContractError("ace: " + std::to_string(scores.size()) +
                        " records cannot fill " + std::to_string(n_bins) + " bins");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  const std::size_t base = scores.size() / n_bins;
  const std::size_t extra = scores.size() % n_bins;
  double total = 0.0;
  std::size_t pos = 0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    const std::size_t count = base + (b < extra ? 1 : 0);
    double label_sum = 0.0;
    double score_sum = 0.0;
    for (std::size_t t = pos; t < pos + count; ++t) {
      label_sum += labels[order[t]];
      score_sum += scores[order[t]];
    }
    pos += count;
    total += std::abs(label_sum - score_sum) / static_cast<double>(count);
  }
  return total / static_cast<double>(n_bins);
}

double ace(const PredictionSet& predictions, std::size_t n_bins) {
  std::vector<double> scores;
  std::vector<int> labels;
  split_columns(predictions, scores, labels);
  return ace(scores, labels, n_bins);
}

void write_predictions(const PredictionSet& predictions, const std::string& path) {
  std::ofstream out = internal::open_output(path);
  out << "user\titem\tlabel\tprob\n";
  for (const auto& p : predictions) {
    out << p.user << '\t' << p.item << '\t' << p.label << '\t'
        << internal::format_double(p.probability) << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

PredictionSet read_predictions(const std::string& path) {
  std::ifstream in = internal::open_input(path);
  std::string line;
  std::getline(in, line);
  PredictionSet out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = internal::strip_cr(line);
    if (row.empty()) continue;
    const auto f = internal::split(row, '\t');
    const std::string where = path + ":" + std::to_string(line_no);
    if (f.size() != 4) throw ContractError(where + ": expected 4 columns");
    const auto prob = internal::parse_double(f[3]);
    if ((f[2] != "0" && f[2] != "1") || !prob || *prob < 0.0 || *prob > 1.0) {
      throw ContractError(where + ": malformed prediction row");
    }
    out.push_back(Prediction{std::string(f[0]), std::string(f[1]), *prob,
                             f[2] == "1" ? 1 : 0});
  }
  return out;
}

}  // namespace graphsub
