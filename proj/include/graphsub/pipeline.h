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

#ifndef GRAPHSUB_PIPELINE_H_
#define GRAPHSUB_PIPELINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graphsub/eval.h"

namespace graphsub {

// Flat key=value configuration with stage-scoped prefixes ("score.method",
// "rates.alpha"). Unknown keys are rejected so typos surface early.
class Config {
 public:
  // Every known key with its default value.
  Config();

  // Lines of key=value; '#' starts a comment.
  static Config load(const std::string& path);
  void save(const std::string& path) const;

  void set(const std::string& key, const std::string& value);
  bool has_value(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  // The seed is mandatory for stochastic stages and has no default.
  std::uint64_t seed() const;

  // Entries whose key starts with any of the prefixes.
  std::map<std::string, std::string> snapshot(
      const std::vector<std::string>& prefixes) const;
  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct FileDigest {
  std::string path;
  std::string sha256;
  // Hash of the run manifest that produced this file, empty when the file
  // has none (raw inputs).
  std::string manifest_sha256;
};

struct RunManifest {
  std::string stage;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  std::map<std::string, std::string> config;
  std::optional<std::uint64_t> seed;
  double duration_seconds = 0.0;
};

// "<artifact>.run.json"
std::string manifest_path(const std::string& artifact);
void write_manifest(const RunManifest& manifest, const std::string& path);
RunManifest read_manifest(const std::string& path);

// Checks the artifact's outputs against its manifest and, recursively, that
// every input still matches both its recorded hash and the manifest that
// produced it. Throws ContractError naming the first broken link.
void verify_manifest_chain(const std::string& artifact);

// Stage entry points. Each writes its outputs plus a run manifest next to
// the first output, and returns that manifest.

// Planted-community data from the synth.* keys and run.seed; community
// labels go to "<dataset_out>.communities".
RunManifest stage_synth(const Config& config, const std::string& dataset_out);
RunManifest stage_build_graph(const Config& config, const std::string& dataset,
                              const std::string& graph_out);
// score.method: ec (G_eff), er (R_eff) or pilot (score.pilot_file, a TSV of
// user, item, score, or score.pilot_model, a GLM checkpoint).
RunManifest stage_score(const Config& config, const std::string& dataset,
                        const std::string& graph, const std::string& scores_out);
// Raw scores to hardness: the corrected, propagated scores when
// propagate.enabled, otherwise the method's direct hardness (max(0, G - y),
// R, or the pilot score).
RunManifest stage_propagate(const Config& config, const std::string& graph,
                            const std::string& scores,
                            const std::string& hardness_out);
RunManifest stage_rates(const Config& config, const std::string& dataset,
                        const std::string& graph, const std::string& hardness,
                        const std::string& rates_out);
// combine.strategy: max, mean, prod or flip. `rates` holds pi_D (the
// majority rates for flip) and `other` holds pi_phi.
RunManifest stage_combine(const Config& config, const std::string& dataset,
                          const std::string& graph, const std::string& rates,
                          const std::string& other,
                          const std::string& rates_out);
RunManifest stage_sample(const Config& config, const std::string& dataset,
                         const std::string& graph, const std::string& rates,
                         const std::string& plan_out);
RunManifest stage_train(const Config& config, const std::string& dataset,
                        const std::string& plan, const std::string& model_out);
RunManifest stage_predict(const Config& config, const std::string& model,
                          const std::string& dataset,
                          const std::string& predictions_out);

struct EvalReport {
  std::size_t records = 0;
  double auc = 0.0;
  double ace = 0.0;
  std::size_t ace_bins = 0;
  std::map<std::size_t, NdcgResult> ndcg;
};

EvalReport evaluate(const PredictionSet& predictions, const Config& config);
// Human-readable text to `path` and key=value lines to "<path>.kv".
void write_report(const EvalReport& report, const std::string& path);
EvalReport stage_eval(const Config& config, const std::string& predictions,
                      const std::string& metrics_out);

struct PipelineResult {
  std::vector<std::string> executed;
  std::vector<std::string> reused;
  std::map<std::string, std::string> artifacts;  // stage -> first output
  std::optional<EvalReport> report;
};

// Runs build-graph, score, propagate, rates, [combine], sample, train,
// predict and eval inside run.dir, stopping after run.until. With
// combine.strategy set and combine.other empty, a second score, propagate
// and rates branch runs with score.method = combine.method and
// rates.rho_min = combine.rho_min. A stage whose manifest still matches its
// inputs, configuration and seed is reused. A failing stage is rethrown with
// its name and manifest path prefixed.
PipelineResult run_pipeline(const Config& config);

}  // namespace graphsub

#endif  // GRAPHSUB_PIPELINE_H_
