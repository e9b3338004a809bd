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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "graphsub/error.h"

namespace graphsub {
namespace {

double pair_count_auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[i] != 1 || y[j] != 0) continue;
      pairs += 1.0;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

PredictionSet one_user(const std::vector<double>& s, const std::vector<int>& y) {
  PredictionSet p;
  for (std::size_t i = 0; i < s.size(); ++i) {
    p.push_back({"u", "i" + std::to_string(i), s[i], y[i]});
  }
  return p;
}

TEST(AucTest, Examples) {
  EXPECT_EQ(auc(std::vector<double>{0.9, 0.1}, std::vector<int>{1, 0}), 1.0);
  EXPECT_EQ(auc(std::vector<double>{0.3, 0.3, 0.3}, std::vector<int>{1, 0, 1}), 0.5);
  EXPECT_EQ(auc(std::vector<double>{0.8, 0.6, 0.4}, std::vector<int>{1, 0, 1}), 0.5);
}

TEST(AucTest, SingleClassIsAnError) {
  EXPECT_THROW(auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), ContractError);
  EXPECT_THROW(auc(std::vector<double>{0.1}, std::vector<int>{1, 0}), ContractError);
}

TEST(AucTest, MatchesPairCountWithTies) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 60;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = (rng() % 8) / 8.0;
      y[i] = rng() % 2;
    }
    y[0] = 1;
    y[1] = 0;
    EXPECT_NEAR(auc(s, y), pair_count_auc(s, y), 1e-12);
  }
}

TEST(AucTest, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> s(200);
  std::vector<double> t(200);
  std::vector<int> y(200);
  for (int i = 0; i < 200; ++i) {
    s[i] = std::round(unit(rng) * 50) / 50;
    t[i] = std::exp(5 * s[i]) - 3;
    y[i] = unit(rng) < s[i];
  }
  EXPECT_EQ(auc(s, y), auc(t, y));
}

TEST(NdcgTest, Examples) {
  EXPECT_NEAR(ndcg_at_k(one_user({0.9, 0.5}, {0, 1}), 2).mean, 1.0 / std::log2(3.0), 1e-15);
  EXPECT_EQ(ndcg_at_k(one_user({0.9, 0.8, 0.1}, {1, 1, 0}), 2).mean, 1.0);
  EXPECT_EQ(ndcg_at_k(one_user({0.9, 0.5}, {0, 1}), 10).mean,
            ndcg_at_k(one_user({0.9, 0.5}, {0, 1}), 2).mean);
}

TEST(NdcgTest, UsersWithoutPositivesAreExcluded) {
  PredictionSet p = one_user({0.9, 0.5}, {1, 0});
  p.push_back({"w", "a", 0.3, 0});
  p.push_back({"w", "b", 0.2, 0});
  const NdcgResult r = ndcg_at_k(p, 5);
  EXPECT_EQ(r.mean, 1.0);
  EXPECT_EQ(r.users_evaluated, 1u);
  EXPECT_EQ(r.users_excluded, 1u);
}

TEST(NdcgTest, HandComputedMultiUser) {
  PredictionSet p = one_user({0.1, 0.9, 0.5}, {1, 0, 1});
  p.push_back({"w", "a", 0.7, 1});
  p.push_back({"w", "b", 0.2, 0});
  // User u ranks [0, 1, 1]: DCG = 1/log2(3) + 1/2, IDCG = 1 + 1/log2(3).
  const double u = (1 / std::log2(3.0) + 0.5) / (1 + 1 / std::log2(3.0));
  EXPECT_NEAR(ndcg_at_k(p, 3).mean, (u + 1.0) / 2.0, 1e-15);
}

TEST(NdcgProperty, BoundedInUnitInterval) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    PredictionSet p;
    for (int i = 0; i < 40; ++i) {
      p.push_back({"u" + std::to_string(i % 4), "i" + std::to_string(i), unit(rng),
                   unit(rng) < 0.3});
    }
    for (std::size_t k = 1; k <= 12; ++k) {
      const double v = ndcg_at_k(p, k).mean;
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

// The ideal DCG grows with k too, so NDCG can drop as k grows.
TEST(NdcgTest, CanDecreaseInK) {
  const PredictionSet p = one_user({0.9, 0.5, 0.1}, {1, 0, 1});
  EXPECT_EQ(ndcg_at_k(p, 1).mean, 1.0);
  EXPECT_NEAR(ndcg_at_k(p, 2).mean, 1.0 / (1 + 1 / std::log2(3.0)), 1e-15);
  EXPECT_NEAR(ndcg_at_k(p, 3).mean, 1.5 / (1 + 1 / std::log2(3.0)), 1e-15);
}

TEST(NdcgTest, ZeroKIsAnError) {
  EXPECT_THROW(ndcg_at_k(one_user({0.5}, {1}), 0), ContractError);
}

TEST(AceTest, Examples) {
  EXPECT_EQ(ace(std::vector<double>{0.0, 1.0}, std::vector<int>{1, 0}, 2), 1.0);
  // Constant base-rate predictor, one bin.
  std::vector<double> s(8, 0.375);
  std::vector<int> y{1, 0, 0, 1, 0, 1, 0, 0};
  EXPECT_EQ(ace(s, y, 1), 0.0);
}

TEST(AceTest, RemainderGoesToLowestBins) {
  // Five records, two bins: the low bin holds three.
  const std::vector<double> s{0.1, 0.2, 0.3, 0.8, 0.9};
  const std::vector<int> y{0, 0, 0, 1, 1};
  const double low = std::abs(0.0 - 0.2);
  const double high = std::abs(1.0 - 0.85);
  EXPECT_NEAR(ace(s, y, 2), (low + high) / 2.0, 1e-15);
}

TEST(AceTest, TooFewRecordsIsAnError) {
  EXPECT_THROW(ace(std::vector<double>{0.5}, std::vector<int>{1}, 2), ContractError);
  EXPECT_THROW(ace(std::vector<double>{0.5}, std::vector<int>{1}, 0), ContractError);
}

TEST(AceTest, CalibratedSigmoidDataIsCalibrated) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> s(100000);
  std::vector<int> y(100000);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = 1.0 / (1.0 + std::exp(-normal(rng)));
    y[i] = unit(rng) < s[i];
  }
  EXPECT_LE(ace(s, y, 10), 0.01);
}

TEST(PredictionIoTest, RoundTrip) {
  const PredictionSet p{{"a", "x", 0.25, 1}, {"b", "y", 0.125, 0}};
  const std::string path =
      (std::filesystem::temp_directory_path() /
       ("graphsub_eval_" + std::to_string(::getpid()) + ".tsv"))
          .string();
  write_predictions(p, path);
  const PredictionSet back = read_predictions(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].user, "b");
  EXPECT_EQ(back[1].item, "y");
  EXPECT_EQ(back[1].probability, 0.125);
  EXPECT_EQ(back[1].label, 0);
  EXPECT_EQ(auc(back), auc(p));
  std::filesystem::remove(path);
  EXPECT_THROW(read_predictions(path), IoError);
}

}  // namespace
}  // namespace graphsub
