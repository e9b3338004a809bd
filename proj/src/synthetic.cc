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

#include "graphsub/synthetic.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "graphsub/error.h"
#include "graphsub/random.h"
#include "text_util.h"

namespace graphsub {
namespace {

double logit(double p) { return std::log(p) - std::log1p(-p); }

void check_spec(const SyntheticSpec& s) {
  if (s.n_users == 0 || s.n_items == 0 || s.n_communities == 0) {
    throw ContractError("synthetic spec needs users, items and communities");
  }
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(s.within_rate) || !in_unit(s.cross_rate)) {
    throw ContractError("within and cross rates must lie in [0, 1]");
  }
  if (!(s.within_rate > s.cross_rate)) {
    throw ContractError("within_rate must exceed cross_rate");
  }
  if (!(s.exposure_bias > 0.0)) throw ContractError("exposure_bias must be positive");
  if (!(s.latent_scale >= 0.0)) throw ContractError("latent_scale must be >= 0");
  if (s.latent_scale > 0.0 && s.latent_dim == 0) {
    throw ContractError("latent_dim must be positive when latent_scale > 0");
  }
}

}  // namespace

std::string synthetic_user(std::size_t i) { return "u" + std::to_string(i); }
std::string synthetic_item(std::size_t j) { return "i" + std::to_string(j); }

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  check_spec(spec);
  const std::size_t k = spec.latent_dim;
  std::mt19937_64 rng = make_stream(spec.seed, 1);
  std::normal_distribution<double> normal;
  std::vector<double> a(spec.n_users * k);
  std::vector<double> b(spec.n_items * k);
  for (double& x : a) x = normal(rng);
  for (double& x : b) x = normal(rng);
  const double scale = k > 0 ? spec.latent_scale / std::sqrt(static_cast<double>(k)) : 0.0;

  SyntheticData out;
  out.user_community.resize(spec.n_users);
  out.item_community.resize(spec.n_items);
  for (std::size_t u = 0; u < spec.n_users; ++u) out.user_community[u] = u % spec.n_communities;
  for (std::size_t v = 0; v < spec.n_items; ++v) out.item_community[v] = v % spec.n_communities;

  struct Raw {
    std::uint32_t user;
    std::uint32_t item;
    int label;
  };
  std::vector<Raw> raw;
  std::vector<std::uint8_t> positive(spec.n_items);
  std::vector<std::uint32_t> candidates;
  std::vector<double> weights;
  std::mt19937_64 neg_rng = make_stream(spec.seed, 2);
  for (std::size_t u = 0; u < spec.n_users; ++u) {
    std::fill(positive.begin(), positive.end(), 0);
    std::size_t n_pos = 0;
    for (std::size_t v = 0; v < spec.n_items; ++v) {
      const double base = out.user_community[u] == out.item_community[v]
                              ? spec.within_rate
                              : spec.cross_rate;
      double p = base;
      if (scale > 0.0 && base > 0.0 && base < 1.0) {
        double dot = 0.0;
        for (std::size_t d = 0; d < k; ++d) dot += a[u * k + d] * b[v * k + d];
        p = 1.0 / (1.0 + std::exp(-(logit(base) + scale * dot)));
      }
      if (uniform01(spec.seed, 0x100000000ULL + u * spec.n_items + v) < p) {
        positive[v] = 1;
        ++n_pos;
        raw.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v), 1});
      }
    }
    if (n_pos == 0 || n_pos == spec.n_items) continue;
    candidates.clear();
    weights.clear();
    for (std::size_t v = 0; v < spec.n_items; ++v) {
      if (positive[v]) continue;
      candidates.push_back(static_cast<std::uint32_t>(v));
      weights.push_back(out.item_community[v] == out.user_community[u] ? spec.exposure_bias
                                                                       : 1.0);
    }
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    for (std::size_t n = 0; n < n_pos * spec.negatives_per_positive; ++n) {
      raw.push_back({static_cast<std::uint32_t>(u), candidates[pick(neg_rng)], 0});
    }
  }
  if (raw.empty()) throw ContractError("synthetic spec produced no interactions");
  std::shuffle(raw.begin(), raw.end(), rng);

  for (const Raw& r : raw) {
    std::vector<double> context(spec.context_dim);
    for (double& x : context) x = normal(rng);
    out.dataset.add({synthetic_user(r.user), synthetic_item(r.item), r.label,
                     std::move(context)});
  }
  return out;
}

void write_communities(const SyntheticData& data, const std::string& path) {
  std::ofstream out = internal::open_output(path);
  out << "kind\ttoken\tcommunity\n";
  for (std::size_t u = 0; u < data.user_community.size(); ++u) {
    out << "user\t" << synthetic_user(u) << '\t' << data.user_community[u] << '\n';
  }
  for (std::size_t v = 0; v < data.item_community.size(); ++v) {
    out << "item\t" << synthetic_item(v) << '\t' << data.item_community[v] << '\n';
  }
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace graphsub
