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

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <utility>

#include "graphsub/conductance.h"
#include "graphsub/error.h"
#include "graphsub/glm.h"
#include "graphsub/graph.h"
#include "graphsub/hash.h"
#include "graphsub/propagation.h"
#include "graphsub/sampling.h"
#include "graphsub/score_vector.h"
#include "graphsub/synthetic.h"
#include "json.hpp"
#include "text_util.h"

namespace graphsub {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

const std::map<std::string, std::string>& default_values() {
  static const std::map<std::string, std::string> defaults = {
      {"run.dir", "run"},
      {"run.until", "eval"},
      {"run.seed", ""},
      {"data.train", ""},
      {"data.test", ""},
      {"score.method", "ec"},
      {"score.mode", "exact"},
      {"score.tolerance", "0.1"},
      {"score.max_walks", "100000"},
      {"score.min_walks", "16"},
      {"score.workers", "1"},
      {"score.pilot_file", ""},
      {"score.pilot_model", ""},
      {"propagate.enabled", "true"},
      {"propagate.kernel", "edge"},
      {"propagate.variant", "self_excl_bt"},
      {"propagate.normalization", "auto"},
      {"propagate.gamma", "0.2"},
      {"propagate.tolerance", "1e-8"},
      {"propagate.max_iters", "1000"},
      {"propagate.scores", "false"},
      {"rates.alpha", "0.2"},
      {"rates.rho_min", "0.1"},
      {"rates.rho_prod_min", "0.005"},
      {"combine.strategy", "none"},
      {"combine.method", "pilot"},
      {"combine.other", ""},
      {"combine.rho_min", "0.01"},
      {"combine.flip_low", "0.2"},
      {"combine.flip_high", "0.8"},
      {"train.learning_rate", "0.01"},
      {"train.epochs", "20"},
      {"train.batch_size", "1024"},
      {"train.l2", "1e-6"},
      {"train.weight_decay", "0"},
      {"train.dim", "8"},
      {"train.init_scale", "0.1"},
      {"train.correction", "true"},
      {"eval.ace_bins", "15"},
      {"eval.ndcg_k", "5,10"},
      {"synth.users", "2000"},
      {"synth.items", "1000"},
      {"synth.communities", "10"},
      {"synth.within_rate", "0.05"},
      {"synth.cross_rate", "0.0002"},
      {"synth.negatives_per_positive", "4"},
      {"synth.exposure_bias", "1"},
      {"synth.context_dim", "2"},
      {"synth.latent_dim", "4"},
      {"synth.latent_scale", "1"},
  };
  return defaults;
}

// Configuration keys each stage's output depends on.
std::vector<std::string> stage_prefixes(const std::string& stage) {
  static const std::map<std::string, std::vector<std::string>> prefixes = {
      {"build-graph", {}},
      {"score", {"score."}},
      {"propagate", {"propagate."}},
      {"rates", {"rates."}},
      {"combine",
       {"combine.strategy", "combine.flip_", "rates.alpha", "rates.rho_prod_min"}},
      {"sample", {}},
      {"train", {"train."}},
      {"predict", {}},
      {"eval", {"eval."}},
      {"synth", {"synth."}},
  };
  return prefixes.at(stage);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string absolute_path(const std::string& path) {
  return fs::absolute(path).lexically_normal().string();
}

// Files written by a stage whose first output is `artifact`.
std::vector<std::string> companion_files(const std::string& artifact,
                                         const std::string& stage) {
  if (stage == "build-graph") return {artifact, artifact + ".idx"};
  if (stage == "train") return {artifact, artifact + ".vocab", artifact + ".manifest"};
  if (stage == "eval") return {artifact, artifact + ".kv"};
  if (stage == "synth") return {artifact, artifact + ".communities"};
  return {artifact};
}

FileDigest digest(const std::string& path) {
  FileDigest d;
  d.path = absolute_path(path);
  d.sha256 = sha256_file(path);
  const std::string m = manifest_path(path);
  if (fs::exists(m)) d.manifest_sha256 = sha256_file(m);
  return d;
}

std::vector<FileDigest> digest_inputs(const std::vector<std::string>& paths) {
  std::vector<FileDigest> out;
  for (const auto& p : paths) {
    if (!p.empty()) out.push_back(digest(p));
  }
  return out;
}

class StageRun {
 public:
  StageRun(std::string stage, const Config& config,
           const std::vector<std::string>& inputs, bool stochastic)
      : start_(std::chrono::steady_clock::now()) {
    manifest_.config = config.snapshot(stage_prefixes(stage));
    manifest_.stage = std::move(stage);
    if (stochastic) manifest_.seed = config.seed();
    manifest_.inputs = digest_inputs(inputs);
  }

  RunManifest finish(const std::string& artifact) {
    for (const auto& f : companion_files(artifact, manifest_.stage)) {
      FileDigest d;
      d.path = absolute_path(f);
      d.sha256 = sha256_file(f);
      manifest_.outputs.push_back(std::move(d));
    }
    manifest_.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    write_manifest(manifest_, manifest_path(artifact));
    return manifest_;
  }

 private:
  std::chrono::steady_clock::time_point start_;
  RunManifest manifest_;
};

Json digest_json(const FileDigest& d) {
  return Json{{"path", d.path}, {"sha256", d.sha256},
              {"manifest_sha256", d.manifest_sha256}};
}

FileDigest digest_from_json(const Json& j) {
  FileDigest d;
  d.path = j.at("path").get<std::string>();
  d.sha256 = j.at("sha256").get<std::string>();
  d.manifest_sha256 = j.value("manifest_sha256", std::string());
  return d;
}

ConductanceOptions conductance_options(const Config& config) {
  ConductanceOptions o;
  const std::string& mode = config.get("score.mode");
  if (mode == "exact") {
    o.mode = ConductanceMode::kExact;
  } else if (mode == "mc") {
    o.mode = ConductanceMode::kMonteCarlo;
    o.commute.seed = config.seed();
  } else {
    throw ContractError("score.mode must be exact or mc, got " + mode);
  }
  o.commute.tolerance = config.get_double("score.tolerance");
  o.commute.max_walks = config.get_u64("score.max_walks");
  o.commute.min_walks = config.get_u64("score.min_walks");
  o.workers = static_cast<unsigned>(config.get_u64("score.workers"));
  return o;
}

SmoothingOptions smoothing_options(const Config& config) {
  SmoothingOptions o;
  const std::string& kernel = config.get("propagate.kernel");
  if (kernel == "edge") {
    o.kernel = Kernel::kEdge;
  } else if (kernel == "linegraph") {
    o.kernel = Kernel::kLineGraph;
  } else {
    throw ContractError("propagate.kernel must be edge or linegraph, got " + kernel);
  }
  const std::string& variant = config.get("propagate.variant");
  if (variant == "self_excl_bt") {
    o.self_exclusion = SelfExclusion::kIterate;
  } else if (variant == "self_excl_z") {
    o.self_exclusion = SelfExclusion::kInitialScore;
  } else {
    throw ContractError(
        "propagate.variant must be self_excl_bt or self_excl_z, got " + variant);
  }
  const std::string& norm = config.get("propagate.normalization");
  if (norm == "auto") {
    o.config.normalization = o.kernel == Kernel::kEdge ? Normalization::kRow
                                                       : Normalization::kSymmetric;
  } else if (norm == "row") {
    o.config.normalization = Normalization::kRow;
  } else if (norm == "symmetric") {
    o.config.normalization = Normalization::kSymmetric;
  } else {
    throw ContractError(
        "propagate.normalization must be auto, row or symmetric, got " + norm);
  }
  o.config.gamma = config.get_double("propagate.gamma");
  o.config.tolerance = config.get_double("propagate.tolerance");
  o.config.max_iters = config.get_u64("propagate.max_iters");
  o.propagate_scores = config.get_bool("propagate.scores");
  return o;
}

RateConfig rate_config(const Config& config) {
  RateConfig r;
  r.alpha = config.get_double("rates.alpha");
  r.rho_min = config.get_double("rates.rho_min");
  r.rho_prod_min = config.get_double("rates.rho_prod_min");
  return r;
}

TrainConfig train_config(const Config& config) {
  TrainConfig t;
  t.learning_rate = config.get_double("train.learning_rate");
  t.epochs = config.get_u64("train.epochs");
  t.batch_size = config.get_u64("train.batch_size");
  t.l2 = config.get_double("train.l2");
  t.weight_decay = config.get_double("train.weight_decay");
  t.dim = config.get_u64("train.dim");
  t.init_scale = config.get_double("train.init_scale");
  t.log_odds_correction = config.get_bool("train.correction");
  t.seed = config.seed();
  return t;
}

std::vector<std::size_t> ndcg_cutoffs(const Config& config) {
  std::vector<std::size_t> ks;
  for (auto f : internal::split(config.get("eval.ndcg_k"), ',')) {
    const std::string t = trim(f);
    if (t.empty()) continue;
    const auto k = internal::parse_int<std::size_t>(t);
    if (!k || *k == 0) throw ContractError("eval.ndcg_k must list positive integers");
    ks.push_back(*k);
  }
  return ks;
}

}  // namespace

Config::Config() : values_(default_values()) {}

Config Config::load(const std::string& path) {
  std::ifstream in = internal::open_input(path);
  Config config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ContractError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    try {
      config.set(trim(std::string_view(body).substr(0, eq)),
                 trim(std::string_view(body).substr(eq + 1)));
    } catch (const ContractError& e) {
      throw ContractError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

void Config::save(const std::string& path) const {
  std::ofstream out = internal::open_output(path);
  for (const auto& [k, v] : values_) out << k << '=' << v << '\n';
  if (!out) throw IoError("failed writing " + path);
}

void Config::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ContractError("unknown config key '" + key + "'");
  it->second = value;
}

bool Config::has_value(const std::string& key) const {
  return !get(key).empty();
}

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ContractError("unknown config key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const auto v = internal::parse_double(get(key));
  if (!v) throw ContractError(key + " must be a number, got '" + get(key) + "'");
  return *v;
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const auto v = internal::parse_int<std::uint64_t>(get(key));
  if (!v) {
    throw ContractError(key + " must be a non-negative integer, got '" + get(key) + "'");
  }
  return *v;
}

bool Config::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ContractError(key + " must be true or false, got '" + v + "'");
}

std::uint64_t Config::seed() const {
  if (!has_value("run.seed")) {
    throw ContractError("a seed is required for this stage (run.seed / --seed)");
  }
  return get_u64("run.seed");
}

std::map<std::string, std::string> Config::snapshot(
    const std::vector<std::string>& prefixes) const {
  std::map<std::string, std::string> out;
  for (const auto& [k, v] : values_) {
    for (const auto& p : prefixes) {
      if (k.starts_with(p)) {
        out[k] = v;
        break;
      }
    }
  }
  return out;
}

std::string manifest_path(const std::string& artifact) {
  return artifact + ".run.json";
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  Json j;
  j["stage"] = manifest.stage;
  j["inputs"] = Json::array();
  for (const auto& d : manifest.inputs) j["inputs"].push_back(digest_json(d));
  j["outputs"] = Json::array();
  for (const auto& d : manifest.outputs) j["outputs"].push_back(digest_json(d));
  j["config"] = manifest.config;
  j["seed"] = manifest.seed ? Json(*manifest.seed) : Json(nullptr);
  j["duration_seconds"] = manifest.duration_seconds;
  std::ofstream out = internal::open_output(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream in = internal::open_input(path);
  RunManifest m;
  try {
    const Json j = Json::parse(in);
    m.stage = j.at("stage").get<std::string>();
    for (const auto& d : j.at("inputs")) m.inputs.push_back(digest_from_json(d));
    for (const auto& d : j.at("outputs")) m.outputs.push_back(digest_from_json(d));
    m.config = j.at("config").get<std::map<std::string, std::string>>();
    if (!j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
    m.duration_seconds = j.at("duration_seconds").get<double>();
  } catch (const Json::exception& e) {
    throw ContractError(path + ": malformed run manifest: " + e.what());
  }
  return m;
}

void verify_manifest_chain(const std::string& artifact) {
  const std::string mpath = manifest_path(artifact);
  if (!fs::exists(mpath)) throw ContractError(artifact + ": no run manifest");
  const RunManifest m = read_manifest(mpath);
  for (const auto& out : m.outputs) {
    if (!fs::exists(out.path)) {
      throw ContractError(mpath + ": output " + out.path + " is missing");
    }
    if (sha256_file(out.path) != out.sha256) {
      throw ContractError(mpath + ": output " + out.path + " changed after the run");
    }
  }
  for (const auto& in : m.inputs) {
    if (!fs::exists(in.path)) {
      throw ContractError(mpath + ": input " + in.path + " is missing");
    }
    if (sha256_file(in.path) != in.sha256) {
      throw ContractError(mpath + ": input " + in.path + " changed after the run");
    }
    const std::string upstream = manifest_path(in.path);
    if (in.manifest_sha256.empty()) {
      if (fs::exists(upstream)) {
        throw ContractError(mpath + ": input " + in.path +
                            " gained a run manifest after the run");
      }
      continue;
    }
    if (!fs::exists(upstream) || sha256_file(upstream) != in.manifest_sha256) {
      throw ContractError(mpath + ": input " + in.path +
                          " was regenerated after the run");
    }
    verify_manifest_chain(in.path);
  }
}

RunManifest stage_synth(const Config& config, const std::string& dataset_out) {
  StageRun run("synth", config, {}, true);
  SyntheticSpec spec;
  spec.n_users = config.get_u64("synth.users");
  spec.n_items = config.get_u64("synth.items");
  spec.n_communities = config.get_u64("synth.communities");
  spec.within_rate = config.get_double("synth.within_rate");
  spec.cross_rate = config.get_double("synth.cross_rate");
  spec.negatives_per_positive = config.get_u64("synth.negatives_per_positive");
  spec.exposure_bias = config.get_double("synth.exposure_bias");
  spec.context_dim = config.get_u64("synth.context_dim");
  spec.latent_dim = config.get_u64("synth.latent_dim");
  spec.latent_scale = config.get_double("synth.latent_scale");
  spec.seed = config.seed();
  const SyntheticData data = generate_synthetic(spec);
  write_dataset(data.dataset, dataset_out);
  write_communities(data, dataset_out + ".communities");
  return run.finish(dataset_out);
}

RunManifest stage_build_graph(const Config& config, const std::string& dataset,
                              const std::string& graph_out) {
  StageRun run("build-graph", config, {dataset}, false);
  write_graph(build_graph(read_dataset(dataset)), graph_out);
  return run.finish(graph_out);
}

RunManifest stage_score(const Config& config, const std::string& dataset,
                        const std::string& graph_path,
                        const std::string& scores_out) {
  const std::string& method = config.get("score.method");
  std::vector<std::string> inputs = {dataset, graph_path};
  bool stochastic = false;
  if (method == "ec") {
    stochastic = config.get("score.mode") == "mc";
  } else if (method == "pilot") {
    if (config.has_value("score.pilot_file") == config.has_value("score.pilot_model")) {
      throw ContractError(
          "score.method=pilot needs exactly one of score.pilot_file and "
          "score.pilot_model");
    }
    inputs.push_back(config.has_value("score.pilot_file")
                         ? config.get("score.pilot_file")
                         : config.get("score.pilot_model"));
  } else if (method != "er") {
    throw ContractError("score.method must be ec, er or pilot, got " + method);
  }
  StageRun run("score", config, inputs, stochastic);
  const BipartiteGraph graph = read_graph(graph_path);
  ScoreVector scores;
  if (method == "ec") {
    scores = effective_conductance(graph, conductance_options(config));
  } else if (method == "er") {
    scores = hardness_er(graph);
    scores.semantics = Semantics::kEffectiveResistance;
  } else if (config.has_value("score.pilot_file")) {
    scores = ingest_pilot_scores(config.get("score.pilot_file"), graph);
  } else {
    const Dataset ds = read_dataset(dataset);
    scores = pilot_scores(GlmModel::load(config.get("score.pilot_model")), ds, graph);
  }
  write_scores(scores, graph, scores_out);
  return run.finish(scores_out);
}

RunManifest stage_propagate(const Config& config, const std::string& graph_path,
                            const std::string& scores_path,
                            const std::string& hardness_out) {
  StageRun run("propagate", config, {graph_path, scores_path}, false);
  const BipartiteGraph graph = read_graph(graph_path);
  const ScoreVector raw = read_scores(scores_path, graph);
  ScoreVector hardness;
  if (config.get_bool("propagate.enabled")) {
    hardness = smooth_scores(graph, raw, smoothing_options(config));
  } else if (raw.semantics == Semantics::kEffectiveConductance) {
    hardness = hardness_ec(graph, raw);
  } else {
    hardness = raw;
  }
  hardness.semantics = Semantics::kHardness;
  write_scores(hardness, graph, hardness_out);
  return run.finish(hardness_out);
}

RunManifest stage_rates(const Config& config, const std::string& dataset,
                        const std::string& graph_path,
                        const std::string& hardness_path,
                        const std::string& rates_out) {
  StageRun run("rates", config, {dataset, graph_path, hardness_path}, false);
  const BipartiteGraph graph = read_graph(graph_path);
  const Dataset ds = read_dataset(dataset);
  const ScoreVector h = read_scores(hardness_path, graph);
  const auto w = negative_record_counts(graph, ds);
  write_scores(rates_from_hardness(h, w, rate_config(config)), graph, rates_out);
  return run.finish(rates_out);
}

RunManifest stage_combine(const Config& config, const std::string& dataset,
                          const std::string& graph_path,
                          const std::string& rates_path,
                          const std::string& other_path,
                          const std::string& rates_out) {
  StageRun run("combine", config, {dataset, graph_path, rates_path, other_path},
               false);
  const BipartiteGraph graph = read_graph(graph_path);
  const Dataset ds = read_dataset(dataset);
  const ScoreVector a = read_scores(rates_path, graph);
  const ScoreVector b = read_scores(other_path, graph);
  const auto w = negative_record_counts(graph, ds);
  const RateConfig rc = rate_config(config);
  const std::string& strategy = config.get("combine.strategy");
  ScoreVector out;
  if (strategy == "max") {
    out = ensemble_max(a, b, w, rc);
  } else if (strategy == "mean") {
    out = ensemble_mean(a, b, w, rc);
  } else if (strategy == "prod") {
    out = ensemble_prod(a, b, w, rc);
  } else if (strategy == "flip") {
    out = flip_rates(a, b, config.get_double("combine.flip_low"),
                     config.get_double("combine.flip_high"), w, rc);
  } else {
    throw ContractError("combine.strategy must be max, mean, prod or flip, got " +
                        strategy);
  }
  write_scores(out, graph, rates_out);
  return run.finish(rates_out);
}

RunManifest stage_sample(const Config& config, const std::string& dataset,
                         const std::string& graph_path,
                         const std::string& rates_path,
                         const std::string& plan_out) {
  StageRun run("sample", config, {dataset, graph_path, rates_path}, true);
  const BipartiteGraph graph = read_graph(graph_path);
  const Dataset ds = read_dataset(dataset);
  const ScoreVector rates = read_scores(rates_path, graph);
  if (rates.semantics != Semantics::kRate) {
    throw ContractError(rates_path + ": expected a rate file, found " +
                        std::string(semantics_name(rates.semantics)));
  }
  const SamplingPlan plan = subsample(ds, per_record(rates, graph), config.seed());
  write_plan(ds, plan, plan_out);
  return run.finish(plan_out);
}

RunManifest stage_train(const Config& config, const std::string& dataset,
                        const std::string& plan_path,
                        const std::string& model_out) {
  StageRun run("train", config, {dataset, plan_path}, true);
  const Dataset ds = read_dataset(dataset);
  const SamplingPlan plan = read_plan(ds, plan_path);
  fit(ds, plan, train_config(config)).save(model_out);
  return run.finish(model_out);
}

RunManifest stage_predict(const Config& config, const std::string& model_path,
                          const std::string& dataset,
                          const std::string& predictions_out) {
  StageRun run("predict", config, {model_path, dataset}, false);
  const GlmModel model = GlmModel::load(model_path);
  const Dataset ds = read_dataset(dataset);
  PredictionSet preds;
  preds.reserve(ds.size());
  for (const auto& r : ds.records()) {
    preds.push_back({r.user_id, r.item_id, model.predict(r), r.label});
  }
  write_predictions(preds, predictions_out);
  return run.finish(predictions_out);
}

EvalReport evaluate(const PredictionSet& predictions, const Config& config) {
  EvalReport report;
  report.records = predictions.size();
  report.ace_bins = config.get_u64("eval.ace_bins");
  report.auc = auc(predictions);
  report.ace = ace(predictions, report.ace_bins);
  for (std::size_t k : ndcg_cutoffs(config)) {
    report.ndcg[k] = ndcg_at_k(predictions, k);
  }
  return report;
}

void write_report(const EvalReport& report, const std::string& path) {
  {
    std::ofstream out = internal::open_output(path);
    out << "records   " << report.records << '\n'
        << "auc       " << internal::format_double(report.auc) << '\n'
        << "ace       " << internal::format_double(report.ace) << "  ("
        << report.ace_bins << " equal-mass bins)\n";
    for (const auto& [k, r] : report.ndcg) {
      out << "ndcg@" << k << "    " << internal::format_double(r.mean) << "  ("
          << r.users_evaluated << " users, " << r.users_excluded
          << " excluded without positives)\n";
    }
    if (!out) throw IoError("failed writing " + path);
  }
  std::ofstream out = internal::open_output(path + ".kv");
  out << "records=" << report.records << '\n'
      << "auc=" << internal::format_double(report.auc) << '\n'
      << "ace=" << internal::format_double(report.ace) << '\n'
      << "ace_bins=" << report.ace_bins << '\n';
  for (const auto& [k, r] : report.ndcg) {
    out << "ndcg@" << k << '=' << internal::format_double(r.mean) << '\n'
        << "ndcg@" << k << "_users=" << r.users_evaluated << '\n'
        << "ndcg@" << k << "_excluded=" << r.users_excluded << '\n';
  }
  if (!out) throw IoError("failed writing " + path + ".kv");
}

EvalReport stage_eval(const Config& config, const std::string& predictions,
                      const std::string& metrics_out) {
  StageRun run("eval", config, {predictions}, false);
  const EvalReport report = evaluate(read_predictions(predictions), config);
  write_report(report, metrics_out);
  run.finish(metrics_out);
  return report;
}

namespace {

// True when the manifest at `artifact` was produced from the same inputs,
// configuration and seed, and its outputs are intact.
bool is_current(const std::string& artifact, const std::string& stage,
                const std::vector<std::string>& inputs,
                const std::map<std::string, std::string>& config,
                std::optional<std::uint64_t> seed) {
  const std::string mpath = manifest_path(artifact);
  if (!fs::exists(mpath)) return false;
  RunManifest m;
  try {
    m = read_manifest(mpath);
  } catch (const ContractError&) {
    return false;
  }
  if (m.stage != stage || m.config != config || m.seed != seed) return false;
  for (const auto& out : m.outputs) {
    if (!fs::exists(out.path) || sha256_file(out.path) != out.sha256) return false;
  }
  std::vector<std::string> present;
  for (const auto& p : inputs) {
    if (!p.empty()) present.push_back(p);
  }
  if (m.inputs.size() != present.size()) return false;
  for (std::size_t i = 0; i < present.size(); ++i) {
    if (!fs::exists(present[i])) return false;
    const FileDigest now = digest(present[i]);
    if (now.path != m.inputs[i].path || now.sha256 != m.inputs[i].sha256 ||
        now.manifest_sha256 != m.inputs[i].manifest_sha256) {
      return false;
    }
  }
  return true;
}

class Runner {
 public:
  Runner(const Config& config, PipelineResult& result) : result_(result) {
    const std::string& until = config.get("run.until");
    const auto it = std::find(order_.begin(), order_.end(), until);
    if (it == order_.end()) {
      throw ContractError("run.until names an unknown stage: " + until);
    }
    last_ = static_cast<std::size_t>(it - order_.begin());
  }

  bool wanted(const std::string& stage) const {
    const auto it = std::find(order_.begin(), order_.end(), stage);
    return static_cast<std::size_t>(it - order_.begin()) <= last_;
  }

  // Runs `body` unless the artifact is current. `label` distinguishes the
  // secondary combine branch in the result lists.
  void stage(const std::string& label, const std::string& stage,
             const Config& config, const std::string& artifact,
             const std::vector<std::string>& inputs, bool stochastic,
             const std::function<void()>& body) {
    result_.artifacts[label] = artifact;
    const std::string prefix = "stage '" + label + "' failed (manifest " +
                               manifest_path(artifact) + "): ";
    try {
      std::optional<std::uint64_t> seed;
      if (stochastic) seed = config.seed();
      if (is_current(artifact, stage, inputs, config.snapshot(stage_prefixes(stage)),
                     seed)) {
        result_.reused.push_back(label);
        return;
      }
      body();
    } catch (const IoError& e) {
      throw IoError(prefix + e.what());
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(prefix + e.what(), e.residual());
    } catch (const ContractError& e) {
      throw ContractError(prefix + e.what());
    }
    result_.executed.push_back(label);
  }

 private:
  PipelineResult& result_;
  const std::vector<std::string> order_ = {"build-graph", "score",   "propagate",
                                           "rates",       "combine", "sample",
                                           "train",       "predict", "eval"};
  std::size_t last_ = 0;
};

}  // namespace

PipelineResult run_pipeline(const Config& config) {
  if (!config.has_value("data.train")) throw ContractError("data.train is required");
  const fs::path dir = config.get("run.dir");
  fs::create_directories(dir);
  auto at = [&](const char* name) { return (dir / name).string(); };
  const std::string dataset = config.get("data.train");
  const std::string graph = at("graph.tsv");

  PipelineResult result;
  Runner runner(config, result);

  auto score_branch = [&](const std::string& suffix, const Config& c) {
    const std::string scores = at(("scores" + suffix + ".tsv").c_str());
    const std::string hardness = at(("hardness" + suffix + ".tsv").c_str());
    const std::string rates = at(("rates" + suffix + ".tsv").c_str());
    std::vector<std::string> score_inputs = {dataset, graph};
    if (c.get("score.method") == "pilot") {
      score_inputs.push_back(c.has_value("score.pilot_file")
                                 ? c.get("score.pilot_file")
                                 : c.get("score.pilot_model"));
    }
    const bool mc = c.get("score.method") == "ec" && c.get("score.mode") == "mc";
    if (runner.wanted("score")) {
      runner.stage("score" + suffix, "score", c, scores, score_inputs, mc,
                   [&] { stage_score(c, dataset, graph, scores); });
    }
    if (runner.wanted("propagate")) {
      runner.stage("propagate" + suffix, "propagate", c, hardness, {graph, scores},
                   false,
                   [&] { stage_propagate(c, graph, scores, hardness); });
    }
    if (runner.wanted("rates")) {
      runner.stage("rates" + suffix, "rates", c, rates, {dataset, graph, hardness},
                   false,
                   [&] { stage_rates(c, dataset, graph, hardness, rates); });
    }
    return rates;
  };

  runner.stage("build-graph", "build-graph", config, graph, {dataset}, false,
               [&] { stage_build_graph(config, dataset, graph); });
  std::string rates = score_branch("", config);

  const std::string& strategy = config.get("combine.strategy");
  if (strategy != "none" && runner.wanted("combine")) {
    std::string other = config.get("combine.other");
    if (other.empty()) {
      Config secondary = config;
      secondary.set("score.method", config.get("combine.method"));
      secondary.set("rates.rho_min", config.get("combine.rho_min"));
      other = score_branch("_b", secondary);
    }
    const std::string combined = at("rates_combined.tsv");
    const std::string main_rates = rates;
    runner.stage("combine", "combine", config, combined,
                 {dataset, graph, main_rates, other}, false, [&] {
                   stage_combine(config, dataset, graph, main_rates, other, combined);
                 });
    rates = combined;
  }

  const std::string plan = at("plan.tsv");
  const std::string model = at("model.glm");
  if (runner.wanted("sample")) {
    runner.stage("sample", "sample", config, plan, {dataset, graph, rates}, true,
                 [&] { stage_sample(config, dataset, graph, rates, plan); });
  }
  if (runner.wanted("train")) {
    runner.stage("train", "train", config, model, {dataset, plan}, true,
                 [&] { stage_train(config, dataset, plan, model); });
  }
  if (!config.has_value("data.test")) return result;
  const std::string test = config.get("data.test");
  const std::string predictions = at("predictions.tsv");
  const std::string metrics = at("metrics.txt");
  if (runner.wanted("predict")) {
    runner.stage("predict", "predict", config, predictions, {model, test}, false,
                 [&] { stage_predict(config, model, test, predictions); });
  }
  if (runner.wanted("eval")) {
    runner.stage("eval", "eval", config, metrics, {predictions}, false,
                 [&] { stage_eval(config, predictions, metrics); });
    result.report = evaluate(read_predictions(predictions), config);
  }
  return result;
}

}  // namespace graphsub
