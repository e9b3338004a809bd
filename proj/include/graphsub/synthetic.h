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

#ifndef GRAPHSUB_SYNTHETIC_H_
#define GRAPHSUB_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "graphsub/graph.h"

namespace graphsub {

// Planted-community interaction generator. Users and items are assigned to
// community i % n_communities. Each (user, item) pair is positive with
// probability sigmoid(logit(base) + latent_scale * <a_u, b_v> / sqrt(k)),
// where base is within_rate or cross_rate and a_u, b_v ~ N(0, I_k). Every
// positive brings negatives_per_positive negative records for the same user
// on items drawn from that user's non-positive items, with items of the
// user's own community weighted by exposure_bias (1 = uniform).
struct SyntheticSpec {
  std::size_t n_users = 2000;
  std::size_t n_items = 1000;
  std::size_t n_communities = 10;
  double within_rate = 0.05;
  double cross_rate = 0.0002;
  std::size_t negatives_per_positive = 4;
  double exposure_bias = 1.0;
  std::size_t context_dim = 2;  // pure noise columns
  std::size_t latent_dim = 4;
  double latent_scale = 1.0;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  Dataset dataset;
  std::vector<std::uint32_t> user_community;  // indexed by user number
  std::vector<std::uint32_t> item_community;
};

// Token helpers shared with test assertions: "u<i>" and "i<j>".
std::string synthetic_user(std::size_t i);
std::string synthetic_item(std::size_t j);

// Throws ContractError for rates outside [0, 1], within_rate <= cross_rate,
// or empty sizes.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Tab-separated: kind (user|item), token, community.
void write_communities(const SyntheticData& data, const std::string& path);

}  // namespace graphsub

#endif  // GRAPHSUB_SYNTHETIC_H_
