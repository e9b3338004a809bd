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

#include "graphsub/pipeline.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>

#include "graphsub/error.h"
#include "graphsub/glm.h"
#include "graphsub/graph.h"
#include "graphsub/sampling.h"
#include "graphsub/score_vector.h"
#include "graphsub/synthetic.h"
#include "test_util.h"

namespace graphsub {
namespace {

namespace fs = std::filesystem;

std::string fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("graphsub_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  EXPECT_TRUE(in.good()) << path;
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

double rate_of(const std::string& rates_path, const BipartiteGraph& g,
               const char* user, const char* item) {
  const ScoreVector r = read_scores(rates_path, g);
  return r[*g.find_edge(*g.find_user(user), *g.find_item(item))];
}

// Small planted-community data with context columns, split into train and
// test files inside `dir`.
void write_small_benchmark(const std::string& dir, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.n_users = 60;
  spec.n_items = 30;
  spec.n_communities = 3;
  spec.within_rate = 0.3;
  spec.cross_rate = 0.02;
  spec.seed = seed;
  const SyntheticData data = generate_synthetic(spec);
  Dataset train;
  Dataset test;
  for (std::size_t n = 0; n < data.dataset.size(); ++n) {
    (n % 5 == 0 ? test : train).add(data.dataset[n]);
  }
  write_dataset(train, dir + "/train.tsv");
  write_dataset(test, dir + "/test.tsv");
}

Config small_config(const std::string& data_dir, const std::string& run_dir) {
  Config c;
  c.set("run.dir", run_dir);
  c.set("run.seed", "7");
  c.set("data.train", data_dir + "/train.tsv");
  c.set("data.test", data_dir + "/test.tsv");
  c.set("train.epochs", "3");
  c.set("train.batch_size", "64");
  c.set("eval.ndcg_k", "3");
  return c;
}

TEST(ConfigTest, DefaultsEchoReferenceValues) {
  const Config c;
  EXPECT_EQ(c.get_double("rates.alpha"), 0.2);
  EXPECT_EQ(c.get_double("rates.rho_min"), 0.1);
  EXPECT_EQ(c.get_double("rates.rho_prod_min"), 0.005);
  EXPECT_EQ(c.get_double("combine.rho_min"), 0.01);
  EXPECT_EQ(c.get_double("score.tolerance"), 0.1);
  EXPECT_EQ(c.get_double("propagate.gamma"), 0.2);
  EXPECT_EQ(c.get_u64("eval.ace_bins"), 15u);
  EXPECT_FALSE(c.has_value("run.seed"));
}

TEST(ConfigTest, RejectsUnknownKeys) {
  Config c;
  EXPECT_THROW(c.set("rates.alpah", "0.3"), ContractError);
  EXPECT_THROW(c.get("nope"), ContractError);
}

TEST(ConfigTest, LoadParsesCommentsAndWhitespace) {
  const std::string dir = fresh_dir("config_load");
  spit(dir + "/c.conf",
       "# comment line\n\n  rates.alpha = 0.35  # trailing\nrun.seed=11\n");
  const Config c = Config::load(dir + "/c.conf");
  EXPECT_EQ(c.get_double("rates.alpha"), 0.35);
  EXPECT_EQ(c.seed(), 11u);

  spit(dir + "/bad.conf", "rates.alpha=0.3\nmystery.key=1\n");
  try {
    Config::load(dir + "/bad.conf");
    FAIL() << "unknown key accepted";
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.conf:2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("mystery.key"), std::string::npos);
  }
  spit(dir + "/noeq.conf", "rates.alpha 0.3\n");
  EXPECT_THROW(Config::load(dir + "/noeq.conf"), ContractError);
  EXPECT_THROW(Config::load(dir + "/missing.conf"), IoError);
}

TEST(ConfigTest, SaveRoundTrips) {
  const std::string dir = fresh_dir("config_save");
  Config c;
  c.set("propagate.kernel", "linegraph");
  c.set("run.seed", "3");
  c.save(dir + "/c.conf");
  EXPECT_EQ(Config::load(dir + "/c.conf").entries(), c.entries());
}

TEST(ConfigTest, TypedGettersRejectMalformedValues) {
  Config c;
  c.set("rates.alpha", "fifth");
  c.set("train.epochs", "-3");
  c.set("train.correction", "maybe");
  EXPECT_THROW(c.get_double("rates.alpha"), ContractError);
  EXPECT_THROW(c.get_u64("train.epochs"), ContractError);
  EXPECT_THROW(c.get_bool("train.correction"), ContractError);
  EXPECT_THROW(c.seed(), ContractError);
}

TEST(PipelineTest, ToyGraphRatesRankU2V1Highest) {
  for (const char* propagate : {"false", "true"}) {
    SCOPED_TRACE(propagate);
    const std::string dir = fresh_dir(std::string("toy_") + propagate);
    write_dataset(testing::toy_dataset(), dir + "/toy.tsv");
    Config c;
    c.set("run.dir", dir + "/run");
    c.set("run.until", "rates");
    c.set("data.train", dir + "/toy.tsv");
    c.set("rates.alpha", "0.5");
    c.set("propagate.enabled", propagate);
    const PipelineResult r = run_pipeline(c);
    EXPECT_EQ(r.executed,
              (std::vector<std::string>{"build-graph", "score", "propagate", "rates"}));
    const BipartiteGraph g = read_graph(dir + "/run/graph.tsv");
    const std::string rates = dir + "/run/rates.tsv";
    const double r21 = rate_of(rates, g, "u2", "v1");
    const double r23 = rate_of(rates, g, "u2", "v3");
    EXPECT_GT(r21, r23);
    EXPECT_NEAR(0.5 * (r21 + r23), 0.5, 1e-6);
    if (std::string(propagate) == "false") {
      // h = (1/3, 0), floor 0.1: rho/3 = 0.9.
      EXPECT_NEAR(r21, 0.9, 1e-6);
      EXPECT_NEAR(r23, 0.1, 1e-6);
    }
  }
}

TEST(PipelineTest, EdgeAndLineGraphKernelsAgree) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 5; ++trial) {
    const std::string dir = fresh_dir("kernels_" + std::to_string(trial));
    const Dataset d = testing::random_dataset(rng, 6, 7, 30, 0.4, true);
    write_dataset(d, dir + "/d.tsv");
    Config c;
    stage_build_graph(c, dir + "/d.tsv", dir + "/g.tsv");
    const BipartiteGraph g = read_graph(dir + "/g.tsv");
    ASSERT_LE(g.num_edges(), 50u);
    stage_score(c, dir + "/d.tsv", dir + "/g.tsv", dir + "/s.tsv");
    c.set("propagate.normalization", "row");
    c.set("propagate.tolerance", "1e-13");
    c.set("propagate.kernel", "edge");
    stage_propagate(c, dir + "/g.tsv", dir + "/s.tsv", dir + "/edge.tsv");
    c.set("propagate.kernel", "linegraph");
    stage_propagate(c, dir + "/g.tsv", dir + "/s.tsv", dir + "/line.tsv");
    const ScoreVector a = read_scores(dir + "/edge.tsv", g);
    const ScoreVector b = read_scores(dir + "/line.tsv", g);
    for (std::size_t e = 0; e < a.size(); ++e) EXPECT_NEAR(a[e], b[e], 1e-10);
  }
}

TEST(PipelineTest, RerunWithSameSeedIsByteIdentical) {
  const std::string data = fresh_dir("rerun_data");
  write_small_benchmark(data, 5);
  const std::string a = fresh_dir("rerun_a");
  const std::string b = fresh_dir("rerun_b");
  run_pipeline(small_config(data, a));
  run_pipeline(small_config(data, b));
  for (const char* f : {"plan.tsv", "rates.tsv", "model.glm", "predictions.tsv",
                        "metrics.txt.kv"}) {
    EXPECT_EQ(slurp(a + "/" + f), slurp(b + "/" + f)) << f;
  }
  Config other = small_config(data, fresh_dir("rerun_c"));
  other.set("run.seed", "8");
  run_pipeline(other);
  EXPECT_NE(slurp(a + "/plan.tsv"), slurp(other.get("run.dir") + "/plan.tsv"));
}

TEST(PipelineTest, SeparateStagesEqualOneInvocation) {
  const std::string data = fresh_dir("assoc_data");
  write_small_benchmark(data, 6);
  const std::string whole = fresh_dir("assoc_whole");
  const Config c = small_config(data, whole);
  const PipelineResult r = run_pipeline(c);
  ASSERT_TRUE(r.report.has_value());

  const std::string s = fresh_dir("assoc_steps");
  const std::string train = data + "/train.tsv";
  stage_build_graph(c, train, s + "/graph.tsv");
  stage_score(c, train, s + "/graph.tsv", s + "/scores.tsv");
  stage_propagate(c, s + "/graph.tsv", s + "/scores.tsv", s + "/hardness.tsv");
  stage_rates(c, train, s + "/graph.tsv", s + "/hardness.tsv", s + "/rates.tsv");
  stage_sample(c, train, s + "/graph.tsv", s + "/rates.tsv", s + "/plan.tsv");
  stage_train(c, train, s + "/plan.tsv", s + "/model.glm");
  stage_predict(c, s + "/model.glm", data + "/test.tsv", s + "/predictions.tsv");
  const EvalReport report = stage_eval(c, s + "/predictions.tsv", s + "/metrics.txt");
  for (const char* f : {"graph.tsv", "graph.tsv.idx", "scores.tsv", "hardness.tsv",
                        "rates.tsv", "plan.tsv", "model.glm", "model.glm.vocab",
                        "predictions.tsv", "metrics.txt", "metrics.txt.kv"}) {
    EXPECT_EQ(slurp(whole + "/" + f), slurp(s + "/" + f)) << f;
  }
  EXPECT_EQ(report.auc, r.report->auc);
  verify_manifest_chain(s + "/metrics.txt");
}

TEST(PipelineTest, ManifestChainValidatesAndDetectsTampering) {
  const std::string data = fresh_dir("chain_data");
  write_small_benchmark(data, 9);
  const std::string run = fresh_dir("chain_run");
  const PipelineResult r = run_pipeline(small_config(data, run));
  for (const auto& [stage, artifact] : r.artifacts) {
    EXPECT_TRUE(fs::exists(manifest_path(artifact))) << stage;
    EXPECT_NO_THROW(verify_manifest_chain(artifact)) << stage;
  }
  const RunManifest m = read_manifest(manifest_path(run + "/plan.tsv"));
  EXPECT_EQ(m.stage, "sample");
  EXPECT_EQ(m.seed, std::optional<std::uint64_t>(7));
  ASSERT_EQ(m.inputs.size(), 3u);
  EXPECT_TRUE(m.inputs[0].manifest_sha256.empty());  // raw dataset
  EXPECT_FALSE(m.inputs[2].manifest_sha256.empty());
  EXPECT_GE(m.duration_seconds, 0.0);
  const RunManifest mr = read_manifest(manifest_path(run + "/rates.tsv"));
  EXPECT_EQ(mr.config.at("rates.alpha"), "0.2");
  EXPECT_FALSE(mr.seed.has_value());

  // Editing an upstream artifact breaks every downstream chain.
  std::string rates = slurp(run + "/rates.tsv");
  spit(run + "/rates.tsv", rates + "\n");
  try {
    verify_manifest_chain(run + "/metrics.txt");
    FAIL() << "tampered rates accepted";
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("rates.tsv"), std::string::npos);
  }
  spit(run + "/rates.tsv", rates);
  EXPECT_NO_THROW(verify_manifest_chain(run + "/metrics.txt"));

  // Regenerating an upstream stage replaces its manifest.
  Config c = small_config(data, run);
  stage_rates(c, data + "/train.tsv", run + "/graph.tsv", run + "/hardness.tsv",
              run + "/rates.tsv");
  EXPECT_EQ(slurp(run + "/rates.tsv"), rates);
  EXPECT_THROW(verify_manifest_chain(run + "/plan.tsv"), ContractError);
  EXPECT_THROW(verify_manifest_chain(run + "/nothing.tsv"), ContractError);
}

TEST(PipelineTest, ResumeReusesCurrentStages) {
  const std::string data = fresh_dir("resume_data");
  write_small_benchmark(data, 10);
  const std::string run = fresh_dir("resume_run");
  Config c = small_config(data, run);
  const PipelineResult first = run_pipeline(c);
  EXPECT_EQ(first.executed.size(), 8u);
  EXPECT_TRUE(first.reused.empty());

  const PipelineResult second = run_pipeline(c);
  EXPECT_TRUE(second.executed.empty());
  EXPECT_EQ(second.reused.size(), 8u);
  ASSERT_TRUE(second.report.has_value());
  EXPECT_EQ(second.report->auc, first.report->auc);

  c.set("rates.alpha", "0.3");
  const PipelineResult third = run_pipeline(c);
  EXPECT_EQ(third.reused,
            (std::vector<std::string>{"build-graph", "score", "propagate"}));
  EXPECT_EQ(third.executed, (std::vector<std::string>{"rates", "sample", "train",
                                                       "predict", "eval"}));
  verify_manifest_chain(run + "/metrics.txt");

  // A deleted output forces its stage to rerun.
  fs::remove(run + "/model.glm.vocab");
  const PipelineResult fourth = run_pipeline(c);
  EXPECT_EQ(fourth.executed, (std::vector<std::string>{"train", "predict", "eval"}));
}

TEST(PipelineTest, FailingStageReportsStageAndManifest) {
  const std::string data = fresh_dir("fail_data");
  write_small_benchmark(data, 11);
  const std::string run = fresh_dir("fail_run");
  Config c = small_config(data, run);
  c.set("score.method", "pilot");
  try {
    run_pipeline(c);
    FAIL() << "pilot scoring without scores accepted";
  } catch (const ContractError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("stage 'score' failed"), std::string::npos) << what;
    EXPECT_NE(what.find("scores.tsv.run.json"), std::string::npos) << what;
  }
  Config missing = small_config(data, run);
  missing.set("data.train", data + "/absent.tsv");
  try {
    run_pipeline(missing);
    FAIL() << "missing dataset accepted";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("stage 'build-graph' failed"),
              std::string::npos);
  }
  EXPECT_THROW(run_pipeline(Config()), ContractError);
}

TEST(PipelineTest, StochasticStagesRequireSeed) {
  const std::string data = fresh_dir("seed_data");
  write_small_benchmark(data, 12);
  Config c = small_config(data, fresh_dir("seed_run"));
  c.set("run.seed", "");
  try {
    run_pipeline(c);
    FAIL() << "sampling without a seed accepted";
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("stage 'sample' failed"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("seed"), std::string::npos);
  }
  // Exact scoring is deterministic and needs no seed; MC scoring does.
  c.set("run.until", "score");
  c.set("score.mode", "mc");
  EXPECT_THROW(run_pipeline(c), ContractError);
}

TEST(PipelineTest, MonteCarloScoresReproduceGivenSeed) {
  const std::string dir = fresh_dir("mc_scores");
  write_dataset(testing::toy_dataset(), dir + "/toy.tsv");
  Config c;
  c.set("score.mode", "mc");
  c.set("run.seed", "4");
  stage_build_graph(c, dir + "/toy.tsv", dir + "/g.tsv");
  stage_score(c, dir + "/toy.tsv", dir + "/g.tsv", dir + "/a.tsv");
  stage_score(c, dir + "/toy.tsv", dir + "/g.tsv", dir + "/b.tsv");
  EXPECT_EQ(slurp(dir + "/a.tsv"), slurp(dir + "/b.tsv"));
  EXPECT_EQ(read_manifest(manifest_path(dir + "/a.tsv")).seed,
            std::optional<std::uint64_t>(4));
}

TEST(PipelineTest, ResistanceAndPilotScoresFlowThrough) {
  const std::string dir = fresh_dir("methods");
  write_dataset(testing::toy_dataset(), dir + "/toy.tsv");
  Config c;
  c.set("propagate.enabled", "false");
  stage_build_graph(c, dir + "/toy.tsv", dir + "/g.tsv");
  const BipartiteGraph g = read_graph(dir + "/g.tsv");

  c.set("score.method", "er");
  stage_score(c, dir + "/toy.tsv", dir + "/g.tsv", dir + "/er.tsv");
  const ScoreVector er = read_scores(dir + "/er.tsv", g);
  EXPECT_EQ(er.semantics, Semantics::kEffectiveResistance);
  // (u2, v3) is a leaf edge of the full graph.
  EXPECT_NEAR(er[*g.find_edge(*g.find_user("u2"), *g.find_item("v3"))], 1.0, 1e-12);

  spit(dir + "/pilot.tsv",
       "user\titem\tscore\nu1\tv1\t0.9\nu1\tv2\t0.8\nu2\tv2\t0.7\n"
       "u2\tv1\t0.6\nu2\tv3\t0.05\n");
  c.set("score.method", "pilot");
  c.set("score.pilot_file", dir + "/pilot.tsv");
  stage_score(c, dir + "/toy.tsv", dir + "/g.tsv", dir + "/pilot_scores.tsv");
  stage_propagate(c, dir + "/g.tsv", dir + "/pilot_scores.tsv", dir + "/h.tsv");
  const ScoreVector h = read_scores(dir + "/h.tsv", g);
  EXPECT_EQ(h[*g.find_edge(*g.find_user("u2"), *g.find_item("v1"))], 0.6);
  EXPECT_EQ(h[*g.find_edge(*g.find_user("u2"), *g.find_item("v3"))], 0.05);
  const RunManifest m = read_manifest(manifest_path(dir + "/pilot_scores.tsv"));
  EXPECT_EQ(m.inputs.size(), 3u);
}

// Pilot predictions as hardness without propagation give rates proportional
// to the pilot probability, clipped to [rho_min, 1].
TEST(PipelineTest, PilotScoresReproduceOptSamplingRates) {
  const std::string dir = fresh_dir("opt_sampling");
  write_small_benchmark(dir, 14);
  const Dataset train = read_dataset(dir + "/train.tsv");
  TrainConfig tc;
  tc.epochs = 3;
  tc.seed = 2;
  const GlmModel pilot = fit(train, full_plan(train), tc);
  pilot.save(dir + "/pilot.glm");

  Config c;
  c.set("score.method", "pilot");
  c.set("score.pilot_model", dir + "/pilot.glm");
  c.set("propagate.enabled", "false");
  c.set("rates.rho_min", "0.05");
  const std::string t = dir + "/train.tsv";
  stage_build_graph(c, t, dir + "/g.tsv");
  stage_score(c, t, dir + "/g.tsv", dir + "/s.tsv");
  stage_propagate(c, dir + "/g.tsv", dir + "/s.tsv", dir + "/h.tsv");
  stage_rates(c, t, dir + "/g.tsv", dir + "/h.tsv", dir + "/r.tsv");
  const BipartiteGraph g = read_graph(dir + "/g.tsv");
  const ScoreVector rates = read_scores(dir + "/r.tsv", g);

  std::vector<double> sum(g.num_edges(), 0.0);
  std::vector<double> count(g.num_edges(), 0.0);
  std::vector<double> negatives(g.num_edges(), 0.0);
  for (std::size_t n = 0; n < train.size(); ++n) {
    const InteractionRecord& r = train[n];
    const EdgeId e = *g.find_edge(*g.find_user(r.user_id), *g.find_item(r.item_id));
    sum[e] += pilot.predict(r);
    count[e] += 1.0;
    if (r.label == 0) negatives[e] += 1.0;
  }
  double rho = -1.0;
  for (EdgeId e = 0; e < g.num_edges() && rho < 0.0; ++e) {
    if (rates[e] > 0.05 && rates[e] < 1.0) rho = rates[e] / (sum[e] / count[e]);
  }
  ASSERT_GT(rho, 0.0);
  double num = 0.0;
  double den = 0.0;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const double expected = std::clamp(rho * sum[e] / count[e], 0.05, 1.0);
    EXPECT_NEAR(rates[e], expected, 1e-9);
    num += negatives[e] * rates[e];
    den += negatives[e];
  }
  EXPECT_NEAR(num / den, 0.2, 1e-6);
}

TEST(PipelineTest, CombineWithPilotBranch) {
  const std::string data = fresh_dir("combine_data");
  write_small_benchmark(data, 13);
  const Dataset train = read_dataset(data + "/train.tsv");
  TrainConfig tc;
  tc.epochs = 2;
  tc.seed = 1;
  fit(train, full_plan(train), tc).save(data + "/pilot.glm");

  for (const char* strategy : {"max", "mean", "prod", "flip"}) {
    SCOPED_TRACE(strategy);
    const std::string run = fresh_dir(std::string("combine_") + strategy);
    Config c = small_config(data, run);
    c.set("run.until", "sample");
    c.set("combine.strategy", strategy);
    c.set("score.pilot_model", data + "/pilot.glm");
    const PipelineResult r = run_pipeline(c);
    EXPECT_EQ(r.executed,
              (std::vector<std::string>{"build-graph", "score", "propagate", "rates",
                                        "score_b", "propagate_b", "rates_b",
                                        "combine", "sample"}));
    const BipartiteGraph g = read_graph(run + "/graph.tsv");
    const ScoreVector combined = read_scores(run + "/rates_combined.tsv", g);
    const auto w = negative_record_counts(g, train);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t e = 0; e < combined.size(); ++e) {
      EXPECT_GE(combined[e], 0.0);
      EXPECT_LE(combined[e], 1.0);
      num += w[e] * combined[e];
      den += w[e];
    }
    EXPECT_NEAR(num / den, 0.2, 1e-6);
    const RunManifest m = read_manifest(manifest_path(run + "/rates_b.tsv"));
    EXPECT_EQ(m.config.at("rates.rho_min"), "0.01");
    EXPECT_NO_THROW(verify_manifest_chain(run + "/plan.tsv"));
  }
}

TEST(PipelineTest, EvalReportWritesTextAndKeyValues) {
  const std::string dir = fresh_dir("eval_report");
  PredictionSet p = {{"a", "x", 0.9, 1}, {"a", "y", 0.2, 0},
                     {"b", "x", 0.4, 1}, {"b", "y", 0.6, 0}};
  write_predictions(p, dir + "/p.tsv");
  Config c;
  c.set("eval.ace_bins", "2");
  c.set("eval.ndcg_k", "1, 2");
  const EvalReport r = stage_eval(c, dir + "/p.tsv", dir + "/m.txt");
  EXPECT_EQ(r.records, 4u);
  EXPECT_DOUBLE_EQ(r.auc, 0.75);
  ASSERT_EQ(r.ndcg.size(), 2u);
  EXPECT_DOUBLE_EQ(r.ndcg.at(1).mean, 0.5);
  const std::string kv = slurp(dir + "/m.txt.kv");
  EXPECT_NE(kv.find("auc=0.75\n"), std::string::npos);
  EXPECT_NE(kv.find("ace_bins=2\n"), std::string::npos);
  EXPECT_NE(kv.find("ndcg@1=0.5\n"), std::string::npos);
  EXPECT_NE(kv.find("ndcg@2_users=2\n"), std::string::npos);
  EXPECT_NE(slurp(dir + "/m.txt").find("auc"), std::string::npos);
  EXPECT_EQ(read_manifest(manifest_path(dir + "/m.txt")).config.at("eval.ace_bins"),
            "2");
  c.set("eval.ndcg_k", "0");
  EXPECT_THROW(stage_eval(c, dir + "/p.tsv", dir + "/m2.txt"), ContractError);
}

}  // namespace
}  // namespace graphsub
