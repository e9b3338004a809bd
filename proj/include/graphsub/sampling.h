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

#ifndef GRAPHSUB_SAMPLING_H_
#define GRAPHSUB_SAMPLING_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "graphsub/graph.h"
#include "graphsub/score_vector.h"

namespace graphsub {

struct RateConfig {
  double alpha = 0.2;          // target mean rate over negative records
  double rho_min = 0.1;        // floor of a single-source rate
  double rho_prod_min = 0.005; // floor of the product ensemble
  std::uint64_t seed = 0;
};

// Result of fitting rate = clamp(scale * base, floor, cap) so that the
// weighted mean over negatives equals alpha.
struct TunedRates {
  std::vector<double> rates;
  double scale = 0.0;
};

// `negative_weight[i]` is the number of negative records that share entry i
// (its rate). Entries with weight 0 get counterfactual rates from the same
// formula. Throws ContractError when alpha lies outside the reachable range.
TunedRates tune_rates(std::span<const double> base,
                      std::span<const double> negative_weight, double alpha,
                      double floor, double cap = 1.0);

// Number of negative records mapped to each edge.
std::vector<double> negative_record_counts(const BipartiteGraph& graph,
                                           const Dataset& dataset);

// min(max(rho * h, rho_min), 1) with rho tuned to the target mean.
ScoreVector rates_from_hardness(const ScoreVector& hardness,
                                std::span<const double> negative_weight,
                                const RateConfig& config);

// Uniform rates equal to alpha.
ScoreVector uniform_rates(std::size_t n, double alpha);

ScoreVector ensemble_max(const ScoreVector& pi_d, const ScoreVector& pi_phi,
                         std::span<const double> negative_weight,
                         const RateConfig& config);
// Averaged; rescaled only when the average misses alpha by more than 1e-6.
ScoreVector ensemble_mean(const ScoreVector& pi_d, const ScoreVector& pi_phi,
                          std::span<const double> negative_weight,
                          const RateConfig& config);
ScoreVector ensemble_prod(const ScoreVector& pi_d, const ScoreVector& pi_phi,
                          std::span<const double> negative_weight,
                          const RateConfig& config);

// Takes `pi_other` where pi_major < low and pi_other > high, `pi_major`
// elsewhere, then rescales to the target mean. `flipped`, when given,
// receives the indices that took pi_other.
ScoreVector flip_rates(const ScoreVector& pi_major, const ScoreVector& pi_other,
                       double low, double high,
                       std::span<const double> negative_weight,
                       const RateConfig& config,
                       std::vector<std::size_t>* flipped = nullptr);

// Per-record outcome of hard negative sampling.
struct SamplingPlan {
  std::vector<double> rate;      // pi(x_n)
  std::vector<double> log_rate;  // log pi(x_n)
  std::vector<std::uint8_t> included;

  std::size_t size() const { return rate.size(); }
  std::size_t num_included() const;
};

// Keeps every positive record and each negative record n with probability
// record_rates[n], using a counter-based draw keyed by (seed, n).
SamplingPlan subsample(const Dataset& dataset,
                       std::span<const double> record_rates,
                       std::uint64_t seed);

// A plan with rate 1 for every record; all records included.
SamplingPlan full_plan(const Dataset& dataset);

// Tab-separated: user, item, label, pi, log_pi, delta.
void write_plan(const Dataset& dataset, const SamplingPlan& plan,
                const std::string& path);
// Reads a plan written for `dataset`; rows must match its records in order.
SamplingPlan read_plan(const Dataset& dataset, const std::string& path);

// Pilot scores from a (user, item, score) file with a header row. Every
// edge needs a score; pairs outside the graph are ignored; a pair listed
// twice with different scores is rejected.
ScoreVector ingest_pilot_scores(const std::string& path,
                                const BipartiteGraph& graph);

}  // namespace graphsub

#endif  // GRAPHSUB_SAMPLING_H_
