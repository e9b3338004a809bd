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

// graphsub command-line front end. Every verb maps its flags onto config
// keys, runs one pipeline stage and writes a run manifest per artifact.
//
// Exit codes: 0 success, 1 contract violation or usage error, 2 I/O error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "graphsub/error.h"
#include "graphsub/pipeline.h"

namespace {

using graphsub::Config;

struct Verb {
  CLI::App* app = nullptr;
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::string> flags;  // config key -> value
  std::vector<std::pair<std::string, std::string>> sets;
  std::map<std::string, std::string> paths;

  // --flag bound to a config key; the default comes from Config.
  void key(const std::string& flag, const std::string& config_key,
           const std::vector<std::string>& choices = {}) {
    static const Config defaults;
    const std::string& def = defaults.get(config_key);
    auto* opt = app->add_option_function<std::string>(
        "--" + flag, [this, config_key](const std::string& v) { flags[config_key] = v; },
        config_key + (def.empty() ? "" : " (default " + def + ")"));
    if (!choices.empty()) opt->check(CLI::IsMember(choices));
  }

  void path(const std::string& flag, const std::string& help, bool required = true) {
    auto* opt = app->add_option("--" + flag, paths[flag], help);
    if (required) opt->required();
  }

  void seed_flag(bool required) {
    auto* opt = app->add_option("--seed", seed, "run.seed");
    if (required) opt->required();
  }

  Config config() const {
    Config c = config_file.empty() ? Config() : Config::load(config_file);
    for (const auto& [k, v] : flags) c.set(k, v);
    for (const auto& [k, v] : sets) c.set(k, v);
    if (seed) c.set("run.seed", std::to_string(*seed));
    return c;
  }

  const std::string& at(const std::string& flag) const { return paths.at(flag); }
};

Verb& add_verb(CLI::App& app, std::vector<std::unique_ptr<Verb>>& verbs,
               const std::string& name, const std::string& help) {
  verbs.push_back(std::make_unique<Verb>());
  Verb& v = *verbs.back();
  v.app = app.add_subcommand(name, help);
  v.app->add_option("--config", v.config_file, "key=value config file")
      ->check(CLI::ExistingFile);
  return v;
}

void score_keys(Verb& v) {
  v.key("mode", "score.mode", {"exact", "mc"});
  v.key("tolerance", "score.tolerance");
  v.key("max-walks", "score.max_walks");
  v.key("min-walks", "score.min_walks");
  v.key("workers", "score.workers");
  v.key("pilot-file", "score.pilot_file");
  v.key("pilot-model", "score.pilot_model");
}

void propagate_keys(Verb& v) {
  v.key("enabled", "propagate.enabled", {"true", "false"});
  v.key("kernel", "propagate.kernel", {"edge", "linegraph"});
  v.key("variant", "propagate.variant", {"self_excl_bt", "self_excl_z"});
  v.key("normalization", "propagate.normalization", {"auto", "row", "symmetric"});
  v.key("gamma", "propagate.gamma");
  v.key("prop-tolerance", "propagate.tolerance");
  v.key("max-iters", "propagate.max_iters");
  v.key("propagate-scores", "propagate.scores", {"true", "false"});
}

void rate_keys(Verb& v) {
  v.key("alpha", "rates.alpha");
  v.key("rho-min", "rates.rho_min");
  v.key("rho-prod-min", "rates.rho_prod_min");
}

void train_keys(Verb& v) {
  v.key("learning-rate", "train.learning_rate");
  v.key("epochs", "train.epochs");
  v.key("batch-size", "train.batch_size");
  v.key("l2", "train.l2");
  v.key("weight-decay", "train.weight_decay");
  v.key("dim", "train.dim");
  v.key("init-scale", "train.init_scale");
  v.key("correction", "train.correction", {"true", "false"});
}

void eval_keys(Verb& v) {
  v.key("ace-bins", "eval.ace_bins");
  v.key("ndcg-k", "eval.ndcg_k");
}

void print_report(const graphsub::EvalReport& r) {
  std::cout << "records " << r.records << "\nauc " << r.auc << "\nace " << r.ace
            << " (" << r.ace_bins << " bins)\n";
  for (const auto& [k, n] : r.ndcg) {
    std::cout << "ndcg@" << k << ' ' << n.mean << " (" << n.users_evaluated
              << " users)\n";
  }
}

void wrote(const std::string& path) {
  std::cout << "wrote " << path << " (manifest " << graphsub::manifest_path(path)
            << ")\n";
}

int run(int argc, char** argv) {
  CLI::App app{"graphsub: graph-based hard negative subsampling"};
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Verb>> verbs;

  Verb& synth = add_verb(app, verbs, "synth", "generate planted-community data");
  synth.path("out", "output dataset TSV");
  synth.seed_flag(true);
  synth.key("users", "synth.users");
  synth.key("items", "synth.items");
  synth.key("communities", "synth.communities");
  synth.key("within-rate", "synth.within_rate");
  synth.key("cross-rate", "synth.cross_rate");
  synth.key("negatives-per-positive", "synth.negatives_per_positive");
  synth.key("exposure-bias", "synth.exposure_bias");
  synth.key("context-dim", "synth.context_dim");
  synth.key("latent-dim", "synth.latent_dim");
  synth.key("latent-scale", "synth.latent_scale");

  Verb& build = add_verb(app, verbs, "build-graph", "deduplicate records into a graph");
  build.path("data", "dataset TSV");
  build.path("out", "output graph file");

  Verb& score = add_verb(app, verbs, "score", "raw per-edge scores");
  score.path("data", "dataset TSV");
  score.path("graph", "graph file");
  score.path("out", "output score file");
  score.key("method", "score.method", {"ec", "er", "pilot"});
  score.app->get_option("--method")->required();
  score.seed_flag(false);
  score_keys(score);

  Verb& propagate = add_verb(app, verbs, "propagate", "raw scores to hardness");
  propagate.path("graph", "graph file");
  propagate.path("scores", "raw score file");
  propagate.path("out", "output hardness file");
  propagate_keys(propagate);

  Verb& rates = add_verb(app, verbs, "rates", "hardness to normalized rates");
  rates.path("data", "dataset TSV");
  rates.path("graph", "graph file");
  rates.path("hardness", "hardness file");
  rates.path("out", "output rate file");
  rate_keys(rates);

  Verb& ensemble = add_verb(app, verbs, "ensemble", "combine two rate files");
  ensemble.path("data", "dataset TSV");
  ensemble.path("graph", "graph file");
  ensemble.path("rates", "model-agnostic rates (pi_D)");
  ensemble.path("other", "model-based rates (pi_phi)");
  ensemble.path("out", "output rate file");
  ensemble.key("strategy", "combine.strategy", {"max", "mean", "prod"});
  ensemble.app->get_option("--strategy")->required();
  rate_keys(ensemble);

  Verb& flip = add_verb(app, verbs, "flip", "flip control experiment");
  flip.path("data", "dataset TSV");
  flip.path("graph", "graph file");
  flip.path("rates", "majority rates");
  flip.path("other", "rates to flip towards");
  flip.path("out", "output rate file");
  flip.key("low", "combine.flip_low");
  flip.key("high", "combine.flip_high");
  rate_keys(flip);

  Verb& sample = add_verb(app, verbs, "sample", "Bernoulli subsampling of negatives");
  sample.path("data", "dataset TSV");
  sample.path("graph", "graph file");
  sample.path("rates", "rate file");
  sample.path("out", "output plan TSV");
  sample.seed_flag(true);

  Verb& train = add_verb(app, verbs, "train", "fit the corrected GLM");
  train.path("data", "dataset TSV");
  train.path("plan", "plan TSV from sample");
  train.path("out", "output model checkpoint");
  train.seed_flag(true);
  train_keys(train);

  Verb& predict = add_verb(app, verbs, "predict", "score a dataset with a model");
  predict.path("model", "model checkpoint");
  predict.path("data", "dataset TSV");
  predict.path("out", "output prediction TSV");

  Verb& eval = add_verb(app, verbs, "eval", "AUC, NDCG@k and ACE of predictions");
  eval.path("predictions", "prediction TSV");
  eval.path("out", "output metrics text (key=value copy in <out>.kv)");
  eval_keys(eval);

  Verb& pipeline = add_verb(app, verbs, "pipeline", "run all stages, resumably");
  pipeline.seed_flag(true);
  pipeline.key("dir", "run.dir");
  pipeline.key("until", "run.until");
  pipeline.key("train-data", "data.train");
  pipeline.key("test-data", "data.test");
  pipeline.key("method", "score.method", {"ec", "er", "pilot"});
  pipeline.key("strategy", "combine.strategy", {"none", "max", "mean", "prod", "flip"});
  pipeline.key("combine-method", "combine.method", {"ec", "er", "pilot"});
  pipeline.key("other", "combine.other");
  score_keys(pipeline);
  propagate_keys(pipeline);
  rate_keys(pipeline);
  train_keys(pipeline);
  eval_keys(pipeline);
  pipeline.app->add_option_function<std::vector<std::string>>(
      "--set",
      [&pipeline](const std::vector<std::string>& kvs) {
        for (const auto& kv : kvs) {
          const auto eq = kv.find('=');
          if (eq == std::string::npos) {
            throw CLI::ValidationError("--set", "expected key=value, got " + kv);
          }
          pipeline.sets.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
        }
      },
      "any config key as key=value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (synth.app->parsed()) {
    graphsub::stage_synth(synth.config(), synth.at("out"));
    wrote(synth.at("out"));
  } else if (build.app->parsed()) {
    graphsub::stage_build_graph(build.config(), build.at("data"), build.at("out"));
    wrote(build.at("out"));
  } else if (score.app->parsed()) {
    const Config c = score.config();
    if (c.get("score.method") == "ec" && c.get("score.mode") == "mc" && !score.seed) {
      throw graphsub::ContractError("--seed is required with --mode mc");
    }
    graphsub::stage_score(c, score.at("data"), score.at("graph"), score.at("out"));
    wrote(score.at("out"));
  } else if (propagate.app->parsed()) {
    graphsub::stage_propagate(propagate.config(), propagate.at("graph"),
                              propagate.at("scores"), propagate.at("out"));
    wrote(propagate.at("out"));
  } else if (rates.app->parsed()) {
    graphsub::stage_rates(rates.config(), rates.at("data"), rates.at("graph"),
                          rates.at("hardness"), rates.at("out"));
    wrote(rates.at("out"));
  } else if (ensemble.app->parsed()) {
    graphsub::stage_combine(ensemble.config(), ensemble.at("data"),
                            ensemble.at("graph"), ensemble.at("rates"),
                            ensemble.at("other"), ensemble.at("out"));
    wrote(ensemble.at("out"));
  } else if (flip.app->parsed()) {
    Config c = flip.config();
    c.set("combine.strategy", "flip");
    graphsub::stage_combine(c, flip.at("data"), flip.at("graph"), flip.at("rates"),
                            flip.at("other"), flip.at("out"));
    wrote(flip.at("out"));
  } else if (sample.app->parsed()) {
    graphsub::stage_sample(sample.config(), sample.at("data"), sample.at("graph"),
                           sample.at("rates"), sample.at("out"));
    wrote(sample.at("out"));
  } else if (train.app->parsed()) {
    graphsub::stage_train(train.config(), train.at("data"), train.at("plan"),
                          train.at("out"));
    wrote(train.at("out"));
  } else if (predict.app->parsed()) {
    graphsub::stage_predict(predict.config(), predict.at("model"), predict.at("data"),
                            predict.at("out"));
    wrote(predict.at("out"));
  } else if (eval.app->parsed()) {
    print_report(graphsub::stage_eval(eval.config(), eval.at("predictions"),
                                      eval.at("out")));
    wrote(eval.at("out"));
  } else if (pipeline.app->parsed()) {
    const graphsub::PipelineResult r = graphsub::run_pipeline(pipeline.config());
    for (const auto& s : r.executed) std::cout << "ran    " << s << '\n';
    for (const auto& s : r.reused) std::cout << "reused " << s << '\n';
    if (r.report) print_report(*r.report);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const graphsub::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
