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

#include "graphsub/sampling.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "graphsub/error.h"
#include "graphsub/random.h"
#include "text_util.h"

namespace graphsub {
namespace {

constexpr double kMeanTolerance = 1e-6;

double weighted_mean(std::span<const double> rates,
                     std::span<const double> weight, double total) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rates.size(); ++i) acc += weight[i] * rates[i];
  return acc / total;
}

void check_aligned(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ContractError(std::string(what) + ": vectors differ in length (" +
                        std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

void check_rates(const ScoreVector& pi, const char* name) {
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (!(pi[i] >= 0.0 && pi[i] <= 1.0)) {
      throw ContractError(std::string(name) + "[" + std::to_string(i) +
                          "] = " + std::to_string(pi[i]) + " is not a rate");
    }
  }
}

}  // namespace

TunedRates tune_rates(std::span<const double> base,
                      std::span<const double> negative_weight, double alpha,
                      double floor, double cap) {
  check_aligned(base.size(), negative_weight.size(), "tune_rates");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ContractError("alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
  if (!(floor >= 0.0 && floor <= cap)) {
    throw ContractError("rate floor must lie in [0, cap]");
  }
  double total = 0.0;
  double min_positive = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (!(base[i] >= 0.0) || !std::isfinite(base[i])) {
      throw ContractError("score " + std::to_string(i) +
                          " must be finite and non-negative");
    }
    if (negative_weight[i] < 0.0) throw ContractError("negative weight");
    total += negative_weight[i];
    if (negative_weight[i] > 0.0 && base[i] > 0.0) {
      min_positive = std::min(min_positive, base[i]);
    }
  }
  if (total <= 0.0) throw ContractError("no negative records to normalize over");

  std::vector<double> rates(base.size());
  auto evaluate = [&](double scale) {
    for (std::size_t i = 0; i < base.size(); ++i) {
      rates[i] = std::clamp(scale * base[i], floor, cap);
    }
    return weighted_mean(rates, negative_weight, total);
  };

  const double lowest = evaluate(0.0);
  const double hi_scale =
      std::isinf(min_positive) ? 0.0 : cap / min_positive;
  const double highest = evaluate(hi_scale);
  if (alpha < lowest - 1e-12 || alpha > highest + 1e-12) {
    std::ostringstream msg;
    msg << "target mean rate " << alpha << " is unreachable; feasible range is ["
        << lowest << ", " << highest << "]";
    throw ContractError(msg.str());
  }

  double lo = 0.0;
  double hi = hi_scale;
  double scale = hi_scale;
  for (int it = 0; it < 400; ++it) {
    scale = 0.5 * (lo + hi);
    const double mean = evaluate(scale);
    if (std::abs(mean - alpha) <= 1e-12) break;
    if (mean < alpha) {
      lo = scale;
    } else {
      hi = scale;
    }
    if (hi - lo <= 1e-15 * hi) break;
  }
  const double mean = evaluate(scale);
  if (std::abs(mean - alpha) > kMeanTolerance) {
    throw ContractError("rate normalization failed to reach the target mean");
  }
  return TunedRates{std::move(rates), scale};
}

std::vector<double> negative_record_counts(const BipartiteGraph& graph,
                                           const Dataset& dataset) {
  check_aligned(graph.edge_of_record().size(), dataset.size(),
                "negative_record_counts");
  std::vector<double> counts(graph.num_edges(), 0.0);
  for (std::size_t n = 0; n < dataset.size(); ++n) {
    if (dataset[n].label == 0) counts[graph.edge_of_record()[n]] += 1.0;
  }
  return counts;
}

ScoreVector rates_from_hardness(const ScoreVector& hardness,
                                std::span<const double> negative_weight,
                                const RateConfig& config) {
  if (!(config.rho_min > 0.0 && config.rho_min <= 1.0)) {
    throw ContractError("rho_min must lie in (0, 1]");
  }
  auto tuned = tune_rates(hardness.values, negative_weight, config.alpha,
                          config.rho_min);
  return ScoreVector{Semantics::kRate, std::move(tuned.rates)};
}

ScoreVector uniform_rates(std::size_t n, double alpha) {
  return ScoreVector{Semantics::kRate, std::vector<double>(n, alpha)};
}

ScoreVector ensemble_max(const ScoreVector& pi_d, const ScoreVector& pi_phi,
                         std::span<const double> negative_weight,
                         const RateConfig& config) {
  check_aligned(pi_d.size(), pi_phi.size(), "ensemble_max");
  check_rates(pi_d, "pi_D");
  check_rates(pi_phi, "pi_phi");
  std::vector<double> m(pi_d.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::max(pi_d[i], pi_phi[i]);
  auto tuned = tune_rates(m, negative_weight, config.alpha, 0.0);
  return ScoreVector{Semantics::kRate, std::move(tuned.rates)};
}

ScoreVector ensemble_mean(const ScoreVector& pi_d, const ScoreVector& pi_phi,
                          std::span<const double> negative_weight,
                          const RateConfig& config) {
  check_aligned(pi_d.size(), pi_phi.size(), "ensemble_mean");
  check_aligned(pi_d.size(), negative_weight.size(), "ensemble_mean");
  check_rates(pi_d, "pi_D");
  check_rates(pi_phi, "pi_phi");
  ScoreVector out{Semantics::kRate, std::vector<double>(pi_d.size())};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * (pi_d[i] + pi_phi[i]);
  const double total =
      std::accumulate(negative_weight.begin(), negative_weight.end(), 0.0);
  if (total <= 0.0) throw ContractError("no negative records to normalize over");
  if (std::abs(weighted_mean(out.values, negative_weight, total) - config.alpha) >
      kMeanTolerance) {
    out.values = tune_rates(out.values, negative_weight, config.alpha, 0.0).rates;
  }
  return out;
}

ScoreVector ensemble_prod(const ScoreVector& pi_d, const ScoreVector& pi_phi,
                          std::span<const double> negative_weight,
                          const RateConfig& config) {
  check_aligned(pi_d.size(), pi_phi.size(), "ensemble_prod");
  check_rates(pi_d, "pi_D");
  check_rates(pi_phi, "pi_phi");
  if (!(config.rho_prod_min > 0.0 && config.rho_prod_min <= 1.0)) {
    throw ContractError("rho_prod_min must lie in (0, 1]");
  }
  std::vector<double> p(pi_d.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = pi_d[i] * pi_phi[i];
  auto tuned = tune_rates(p, negative_weight, config.alpha, config.rho_prod_min);
  return ScoreVector{Semantics::kRate, std::move(tuned.rates)};
}

ScoreVector flip_rates(const ScoreVector& pi_major, const ScoreVector& pi_other,
                       double low, double high,
                       std::span<const double> negative_weight,
                       const RateConfig& config,
                       std::vector<std::size_t>* flipped) {
  check_aligned(pi_major.size(), pi_other.size(), "flip_rates");
  check_rates(pi_major, "pi_major");
  check_rates(pi_other, "pi_other");
  if (!(low >= 0.0 && high <= 1.0 && low < high)) {
    throw ContractError("flip thresholds need 0 <= low < high <= 1");
  }
  std::vector<double> mixed = pi_major.values;
  if (flipped != nullptr) flipped->clear();
  for (std::size_t i = 0; i < mixed.size(); ++i) {
    if (pi_major[i] < low && pi_other[i] > high) {
      mixed[i] = pi_other[i];
      if (flipped != nullptr) flipped->push_back(i);
    }
  }
  auto tuned = tune_rates(mixed, negative_weight, config.alpha, 0.0);
  return ScoreVector{Semantics::kRate, std::move(tuned.rates)};
}

std::size_t SamplingPlan::num_included() const {
  return static_cast<std::size_t>(
      std::count(included.begin(), included.end(), std::uint8_t{1}));
}

SamplingPlan subsample(const Dataset& dataset,
                       std::span<const double> record_rates,
                       std::uint64_t seed) {
  check_aligned(dataset.size(), record_rates.size(), "subsample");
  SamplingPlan plan;
  plan.rate.assign(record_rates.begin(), record_rates.end());
  plan.log_rate.resize(dataset.size());
  plan.included.resize(dataset.size());
  for (std::size_t n = 0; n < dataset.size(); ++n) {
    const double pi = record_rates[n];
    if (!(pi >= 0.0 && pi <= 1.0)) {
      throw ContractError("record " + std::to_string(n) + " has rate " +
                          std::to_string(pi) + " outside [0, 1]");
    }
    plan.log_rate[n] = std::log(pi);
    plan.included[n] =
        dataset[n].label == 1 || uniform01(seed, n) <= pi ? 1 : 0;
  }
  return plan;
}

SamplingPlan full_plan(const Dataset& dataset) {
  SamplingPlan plan;
  plan.rate.assign(dataset.size(), 1.0);
  plan.log_rate.assign(dataset.size(), 0.0);
  plan.included.assign(dataset.size(), 1);
  return plan;
}

void write_plan(const Dataset& dataset, const SamplingPlan& plan,
                const std::string& path) {
  check_aligned(dataset.size(), plan.size(), "write_plan");
  std::ofstream out = internal::open_output(path);
  out << "user\titem\tlabel\tpi\tlog_pi\tdelta\n";
  for (std::size_t n = 0; n < dataset.size(); ++n) {
    const auto& r = dataset[n];
    out << r.user_id << '\t' << r.item_id << '\t' << r.label << '\t'
        << internal::format_double(plan.rate[n]) << '\t'
        << internal::format_double(plan.log_rate[n]) << '\t'
        << static_cast<int>(plan.included[n]) << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

SamplingPlan read_plan(const Dataset& dataset, const std::string& path) {
  std::ifstream in = internal::open_input(path);
  std::string line;
  std::getline(in, line);
  SamplingPlan plan;
  std::size_t n = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = internal::strip_cr(line);
    if (row.empty()) continue;
    const auto f = internal::split(row, '\t');
    const std::string where = path + ":" + std::to_string(line_no);
    if (f.size() != 6) throw ContractError(where + ": expected 6 columns");
    if (n >= dataset.size() || f[0] != dataset[n].user_id ||
        f[1] != dataset[n].item_id) {
      throw ContractError(where + ": row does not match dataset record " +
                          std::to_string(n));
    }
    const auto pi = internal::parse_double(f[3]);
    const auto log_pi = internal::parse_double(f[4]);
    if (!pi || !log_pi || (f[5] != "0" && f[5] != "1")) {
      throw ContractError(where + ": malformed plan row");
    }
    plan.rate.push_back(*pi);
    plan.log_rate.push_back(*log_pi);
    plan.included.push_back(f[5] == "1" ? 1 : 0);
    ++n;
  }
  if (n != dataset.size()) {
    throw ContractError(path + ": plan has " + std::to_string(n) +
                        " rows for " + std::to_string(dataset.size()) + " records");
  }
  return plan;
}

ScoreVector ingest_pilot_scores(const std::string& path,
                                const BipartiteGraph& graph) {
  std::ifstream in = internal::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ContractError(path + ": missing header row");
  ScoreVector h{Semantics::kHardness, std::vector<double>(graph.num_edges(), 0.0)};
  std::vector<bool> seen(graph.num_edges(), false);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = internal::strip_cr(line);
    if (row.empty()) continue;
    const auto f = internal::split(row, '\t');
    const std::string where = path + ":" + std::to_string(line_no);
    if (f.size() < 3) throw ContractError(where + ": expected user, item, score");
    const auto score = internal::parse_double(f[2]);
    if (!score || !std::isfinite(*score) || *score < 0.0) {
      throw ContractError(where + ": score must be a finite non-negative number");
    }
    const auto u = graph.find_user(f[0]);
    const auto v = graph.find_item(f[1]);
    const auto e = (u && v) ? graph.find_edge(*u, *v) : std::nullopt;
    if (!e) continue;
    if (seen[*e] && h[*e] != *score) {
      throw ContractError(where + ": conflicting duplicate score for (" +
                          std::string(f[0]) + ", " + std::string(f[1]) + ")");
    }
    seen[*e] = true;
    h[*e] = *score;
  }
  std::vector<std::string> missing;
  std::size_t n_missing = 0;
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    if (seen[e]) continue;
    ++n_missing;
    if (missing.size() < 5) {
      const Edge& edge = graph.edge(e);
      missing.push_back("(" + graph.user_tokens()[edge.user] + ", " +
                        graph.item_tokens()[edge.item] + ")");
    }
  }
  if (n_missing > 0) {
    std::string msg = path + ": " + std::to_string(n_missing) +
                      " edges have no pilot score, first:";
    for (const auto& m : missing) msg += " " + m;
    throw ContractError(msg);
  }
  return h;
}

}  // namespace graphsub
