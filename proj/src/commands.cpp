/*
 * Copyright 2026 the kgcert authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "kgcert/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "kgcert/certify.hpp"
#include "kgcert/checkpoint.hpp"
#include "kgcert/eval.hpp"
#include "kgcert/kg.hpp"
#include "kgcert/manifest.hpp"
#include "kgcert/models.hpp"
#include "kgcert/train.hpp"

namespace kgcert {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// Shortest decimal form that round-trips to the same double.
std::string format_double(double value) {
  char buf[40];
  for (int precision : {15, 16, 17}) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

std::vector<int32_t> parse_int_list(const std::string& text, const std::string& key) {
  std::vector<int32_t> values;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      values.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ConfigError("config key `" + key + "`: expected comma-separated integers");
    }
  }
  return values;
}

char parse_separator(const std::string& name) {
  if (name == "tab") return '\t';
  if (name == "space") return ' ';
  if (name == "comma") return ',';
  if (name.size() == 1) return name[0];
  throw ConfigError("data.separator must be tab, space, comma or a single character");
}

// Shared per-command state: resolved configuration, output directory, and
// the manifest being assembled.
struct CommandContext {
  std::string command;
  KeyValueConfig resolved;
  fs::path out_dir;
  RunManifest manifest;
  std::chrono::steady_clock::time_point start;

  explicit CommandContext(std::string name)
      : command(std::move(name)), start(std::chrono::steady_clock::now()) {
    manifest.command = command;
    manifest.started_at = current_utc_timestamp();
  }

  void resolve_out_dir() {
    fs::path dir = resolved.require_string("out_dir");
    if (dir.is_relative()) {
      if (const char* root = std::getenv("KGCERT_OUTPUT_ROOT")) {
        dir = fs::path(root) / dir;
      }
    }
    fs::create_directories(dir);
    out_dir = dir;
  }

  // Prints and stores the resolved configuration before any compute.
  void echo_config() {
    manifest.resolved_config =
        std::map<std::string, std::string>(resolved.entries().begin(),
                                           resolved.entries().end());
    std::cout << "# resolved configuration (" << command << ")\n"
              << resolved.render() << std::flush;
    std::ofstream echo(out_dir / "config_resolved.cfg", std::ios::trunc);
    if (!echo) throw Error("cannot write config echo");
    echo << resolved.render();
    manifest.outputs.push_back("config_resolved.cfg");
  }

  void add_input(const std::string& label, const fs::path& path) {
    manifest.input_fingerprints[label] = fingerprint_hex(fingerprint_file(path));
  }

  fs::path output(const std::string& name) {
    manifest.outputs.push_back(name);
    return out_dir / name;
  }

  void finish() {
    manifest.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest.write(out_dir / "manifest.json");
    std::cout << "manifest written: " << (out_dir / "manifest.json").string()
              << " (determinism_key " << manifest.determinism_key() << ")\n";
  }
};

struct LoadedData {
  KnowledgeGraph kg;
  FilterIndex filter;
};

// Loads the dataset named in the config, fingerprints the files, augments
// with reverse relations and builds the filter index.
LoadedData load_data(CommandContext& ctx) {
  const fs::path train = ctx.resolved.require_string("data.train");
  std::optional<fs::path> valid;
  std::optional<fs::path> test;
  if (!ctx.resolved.get_string("data.valid", "").empty()) {
    valid = fs::path(ctx.resolved.get_string("data.valid", ""));
  }
  if (!ctx.resolved.get_string("data.test", "").empty()) {
    test = fs::path(ctx.resolved.get_string("data.test", ""));
  }
  const char sep = parse_separator(ctx.resolved.get_string("data.separator", "tab"));

  ctx.add_input("data.train", train);
  if (valid) ctx.add_input("data.valid", *valid);
  if (test) ctx.add_input("data.test", *test);

  LoadedData data;
  data.kg = add_reverse_relations(load_dataset(train, valid, test, sep));
  data.filter = build_filter_index(data.kg);
  return data;
}

const std::vector<std::string> kDataKeys = {
    "data.train", "data.valid", "data.test", "data.separator", "out_dir",
    "seed",       "threads"};

std::vector<std::string> with_data_keys(std::vector<std::string> keys) {
  keys.insert(keys.end(), kDataKeys.begin(), kDataKeys.end());
  return keys;
}

const std::vector<std::string> kTrainKeys = {
    "family",        "dim",        "epochs",       "batch_size",
    "learning_rate", "optimizer",  "adam.beta1",   "adam.beta2",
    "adam.eps",      "alpha",      "lambda",       "perturb_prob",
    "sigma_refresh", "init_scale", "label_smoothing"};

TrainConfig train_config_from(const KeyValueConfig& config) {
  TrainConfig tc;
  tc.family = family_from_string(config.get_string("family", "distmult"));
  tc.dim = static_cast<int32_t>(config.get_int("dim", 32));
  tc.epochs = static_cast<int32_t>(config.get_int("epochs", 100));
  tc.batch_size = static_cast<int32_t>(config.get_int("batch_size", 128));
  tc.learning_rate = config.get_double("learning_rate", 0.01);
  const std::string opt = config.get_string("optimizer", "adam");
  if (opt == "adam") {
    tc.optimizer = OptimizerKind::kAdam;
  } else if (opt == "sgd") {
    tc.optimizer = OptimizerKind::kSgd;
  } else {
    throw ConfigError("optimizer must be adam or sgd");
  }
  tc.adam_beta1 = config.get_double("adam.beta1", 0.9);
  tc.adam_beta2 = config.get_double("adam.beta2", 0.999);
  tc.adam_eps = config.get_double("adam.eps", 1e-8);
  tc.alpha = config.get_double("alpha", 0.5);
  tc.lambda = config.get_double("lambda", 0.1);
  tc.perturb_prob = config.get_double("perturb_prob", 1.0);
  const std::string refresh = config.get_string("sigma_refresh", "per-epoch");
  if (refresh == "per-epoch") {
    tc.sigma_refresh = SigmaRefresh::kPerEpoch;
  } else if (refresh == "once") {
    tc.sigma_refresh = SigmaRefresh::kOnce;
  } else {
    throw ConfigError("sigma_refresh must be per-epoch or once");
  }
  tc.seed = config.get_uint("seed", 0);
  tc.init_scale = config.get_double("init_scale", 0.1);
  tc.label_smoothing = config.get_double("label_smoothing", 0.1);
  tc.validate();
  return tc;
}

// Writes the resolved view of a TrainConfig back into flat keys so the echo
// always shows every effective value.
void resolve_train_keys(KeyValueConfig& out, const TrainConfig& tc) {
  out.set("family", family_name(tc.family));
  out.set("dim", std::to_string(tc.dim));
  out.set("epochs", std::to_string(tc.epochs));
  out.set("batch_size", std::to_string(tc.batch_size));
  out.set("learning_rate", format_double(tc.learning_rate));
  out.set("optimizer", tc.optimizer == OptimizerKind::kAdam ? "adam" : "sgd");
  out.set("adam.beta1", format_double(tc.adam_beta1));
  out.set("adam.beta2", format_double(tc.adam_beta2));
  out.set("adam.eps", format_double(tc.adam_eps));
  out.set("alpha", format_double(tc.alpha));
  out.set("lambda", format_double(tc.lambda));
  out.set("perturb_prob", format_double(tc.perturb_prob));
  out.set("sigma_refresh",
          tc.sigma_refresh == SigmaRefresh::kPerEpoch ? "per-epoch" : "once");
  out.set("seed", std::to_string(tc.seed));
  out.set("init_scale", format_double(tc.init_scale));
  out.set("label_smoothing", format_double(tc.label_smoothing));
}

void resolve_data_keys(KeyValueConfig& out, const KeyValueConfig& in) {
  out.set("data.train", in.require_string("data.train"));
  out.set("data.valid", in.get_string("data.valid", ""));
  out.set("data.test", in.get_string("data.test", ""));
  out.set("data.separator", in.get_string("data.separator", "tab"));
  out.set("out_dir", in.require_string("out_dir"));
  out.set("seed", std::to_string(in.get_uint("seed", 0)));
  out.set("threads", std::to_string(in.get_int("threads", 1)));
}

void write_train_log(const fs::path& path, const std::vector<EpochLog>& log) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write training log");
  for (const EpochLog& epoch : log) {
    ordered_json record;
    record["epoch"] = epoch.epoch;
    record["loss_original"] = epoch.loss_original;
    record["loss_denoising"] = epoch.loss_denoising;
    record["loss_joint"] = epoch.loss_joint;
    record["sigma"] = epoch.sigma;
    record["wall_time_s"] = epoch.wall_time_s;
    out << record.dump() << '\n';
  }
}

ordered_json metrics_to_json(const RankingMetrics& metrics) {
  ordered_json block;
  block["condition"] = metrics.condition;
  block["alpha"] = metrics.alpha;
  block["seed"] = metrics.seed;
  block["num_queries"] = metrics.num_queries;
  block["mrr"] = metrics.mrr;
  block["mr"] = metrics.mr;
  block["hits1"] = metrics.hits1;
  block["hits3"] = metrics.hits3;
  block["hits10"] = metrics.hits10;
  return block;
}

void append_metrics_tsv(std::ostream& out, const RankingMetrics& metrics) {
  const auto row = [&](const char* name, double value) {
    out << metrics.condition << '\t' << name << '\t' << format_double(value) << '\n';
  };
  row("mrr", metrics.mrr);
  row("mr", metrics.mr);
  row("hits1", metrics.hits1);
  row("hits3", metrics.hits3);
  row("hits10", metrics.hits10);
}

EmbeddingModel load_model_for(CommandContext& ctx, const LoadedData& data) {
  const fs::path checkpoint_path = ctx.resolved.require_string("checkpoint");
  ctx.add_input("checkpoint", checkpoint_path);
  EmbeddingModel model = load_checkpoint(checkpoint_path);
  if (model.num_entities != data.kg.num_entities() ||
      model.num_relations != data.kg.num_relations()) {
    throw ConfigError("checkpoint does not match the dataset: " +
                      std::to_string(model.num_entities) + "x" +
                      std::to_string(model.num_relations) + " vs " +
                      std::to_string(data.kg.num_entities()) + "x" +
                      std::to_string(data.kg.num_relations()));
  }
  return model;
}

std::vector<Query> split_queries(const CommandContext& ctx, const LoadedData& data) {
  const Split split = split_from_string(ctx.resolved.get_string("split", "test"));
  std::vector<Query> queries = queries_from_split(data.kg, split);
  if (queries.empty()) {
    throw ConfigError("no queries in split `" + std::string(split_name(split)) + "`");
  }
  return queries;
}

// Certification over (a deterministic subsample of) the split queries,
// reused by cmd_certify and cmd_grid.
struct CertOutcome {
  RobustnessReport report;
  std::vector<CertificationRecord> records;
  std::vector<double> radii;
  double sigma = 0.0;
};

CertOutcome run_certification(const KeyValueConfig& resolved,
                              const EmbeddingModel& model, const FilterIndex& filter,
                              std::vector<Query> queries) {
  CertOutcome outcome;
  outcome.sigma = resolved.get_string("cert.sigma", "auto") == "auto"
                      ? sigma_quantile(model.entity_table)
                      : resolved.get_double("cert.sigma", 0.0);

  const auto max_queries = resolved.get_int("cert.max_queries", 0);
  if (max_queries > 0 && static_cast<int64_t>(queries.size()) > max_queries) {
    Rng rng = purpose_stream(resolved.get_uint("seed", 0), RngPurpose::kQuerySampling);
    rng.shuffle(std::span<Query>(queries));
    queries.resize(max_queries);
  }

  CertConfig cert;
  cert.n0 = static_cast<int32_t>(resolved.get_int("n0", 1000));
  cert.confidence = resolved.get_double("confidence", 0.999);
  cert.sigma = outcome.sigma;
  cert.seed = resolved.get_uint("seed", 0);
  cert.threads = static_cast<int32_t>(resolved.get_int("threads", 1));
  cert.validate();

  const std::string radii_text = resolved.get_string("cert.radii", "auto");
  if (radii_text != "auto" && !radii_text.empty()) {
    outcome.radii = resolved.get_double_list("cert.radii", {});
  }
  if (outcome.radii.empty()) {
    // Default curve: 0 to 2*sigma in sigma/10 steps.
    for (int i = 0; i <= 20; ++i) outcome.radii.push_back(outcome.sigma * 0.1 * i);
  }

  outcome.report = robustness_report(model, queries, filter, cert, outcome.radii,
                                     &outcome.records);
  return outcome;
}

void write_certification_outputs(CommandContext& ctx, const CertOutcome& outcome,
                                 const KnowledgeGraph& kg) {
  {
    std::ofstream table(ctx.output("certification.tsv"), std::ios::trunc);
    table << "query_id\thead\trelation\ttarget\tcount\tp_lower\tcr\tcertified\n";
    for (const auto& record : outcome.records) {
      table << record.query_id << '\t' << kg.entity_names()[record.query.head] << '\t'
            << kg.relation_names()[record.query.relation] << '\t'
            << kg.entity_names()[record.query.target] << '\t' << record.count << '\t'
            << format_double(record.p_lower) << '\t' << format_double(record.cr)
            << '\t' << (record.certified ? 1 : 0) << '\n';
    }
  }
  {
    std::ofstream curve(ctx.output("ca_curve.tsv"), std::ios::trunc);
    curve << "radius\tcertified_accuracy\n";
    for (const auto& [radius, ca] : outcome.report.ca_curve) {
      curve << format_double(radius) << '\t' << format_double(ca) << '\n';
    }
  }
  ordered_json doc;
  doc["sigma"] = outcome.report.sigma;
  doc["num_queries"] = outcome.report.num_queries;
  doc["acr"] = outcome.report.acr;
  doc["acr_over_sigma"] = outcome.report.acr_over_sigma;
  doc["ca0"] = outcome.report.ca0;
  ordered_json curve = ordered_json::array();
  for (const auto& [radius, ca] : outcome.report.ca_curve) {
    curve.push_back(ordered_json{{"radius", radius}, {"ca", ca}});
  }
  doc["ca_curve"] = curve;
  std::ofstream report(ctx.output("robustness.json"), std::ios::trunc);
  report << doc.dump(2) << '\n';
}

}  // namespace

int cmd_train(KeyValueConfig config) {
  config.check_known_keys(with_data_keys(kTrainKeys));
  CommandContext ctx("train");
  const TrainConfig tc = train_config_from(config);
  resolve_data_keys(ctx.resolved, config);
  resolve_train_keys(ctx.resolved, tc);
  ctx.resolve_out_dir();
  ctx.echo_config();

  const LoadedData data = load_data(ctx);
  TrainResult result = train(data.kg, tc, [](const EpochLog& log) {
    std::cerr << "epoch " << log.epoch << " joint " << log.loss_joint << " original "
              << log.loss_original << " denoising " << log.loss_denoising << " sigma "
              << log.sigma << '\n';
  });

  save_checkpoint(result.model, ctx.output("checkpoint.bin"));
  write_train_log(ctx.output("train_log.jsonl"), result.log);
  ctx.finish();
  return 0;
}

int cmd_eval(KeyValueConfig config) {
  config.check_known_keys(with_data_keys(
      {"checkpoint", "split", "eval.alphas", "eval.seed"}));
  CommandContext ctx("eval");
  resolve_data_keys(ctx.resolved, config);
  ctx.resolved.set("checkpoint", config.require_string("checkpoint"));
  ctx.resolved.set("split", config.get_string("split", "test"));
  const std::vector<double> alphas = config.get_double_list("eval.alphas", {0.0, 2.0, 5.0});
  {
    std::string rendered;
    for (size_t i = 0; i < alphas.size(); ++i) {
      rendered += (i ? "," : "") + format_double(alphas[i]);
    }
    ctx.resolved.set("eval.alphas", rendered);
  }
  const uint64_t eval_seed = config.get_uint("eval.seed", config.get_uint("seed", 0));
  ctx.resolved.set("eval.seed", std::to_string(eval_seed));
  ctx.resolve_out_dir();
  ctx.echo_config();

  const LoadedData data = load_data(ctx);
  const EmbeddingModel model = load_model_for(ctx, data);
  const std::vector<Query> queries = split_queries(ctx, data);

  std::vector<RankingMetrics> blocks;
  if (alphas.empty()) {
    blocks.push_back(link_prediction(model, queries, data.filter, EvalCondition{}));
  } else {
    for (double alpha : alphas) {
      blocks.push_back(link_prediction(model, queries, data.filter,
                                       EvalCondition{alpha, eval_seed}));
    }
  }

  ordered_json doc;
  doc["split"] = ctx.resolved.get_string("split", "test");
  doc["num_queries"] = blocks.front().num_queries;
  ordered_json conditions = ordered_json::array();
  for (const RankingMetrics& metrics : blocks) conditions.push_back(metrics_to_json(metrics));
  doc["conditions"] = conditions;
  {
    std::ofstream report(ctx.output("metrics.json"), std::ios::trunc);
    report << doc.dump(2) << '\n';
  }
  {
    std::ofstream table(ctx.output("metrics.tsv"), std::ios::trunc);
    table << "condition\tmetric\tvalue\n";
    for (const RankingMetrics& metrics : blocks) append_metrics_tsv(table, metrics);
  }
  for (const RankingMetrics& metrics : blocks) {
    std::cout << metrics.condition << ": mrr " << metrics.mrr << " hits10 "
              << metrics.hits10 << '\n';
  }
  ctx.finish();
  return 0;
}

int cmd_certify(KeyValueConfig config) {
  config.check_known_keys(with_data_keys({"checkpoint", "split", "n0", "confidence",
                                          "cert.sigma", "cert.max_queries",
                                          "cert.radii"}));
  CommandContext ctx("certify");
  resolve_data_keys(ctx.resolved, config);
  ctx.resolved.set("checkpoint", config.require_string("checkpoint"));
  ctx.resolved.set("split", config.get_string("split", "test"));
  ctx.resolved.set("n0", std::to_string(config.get_int("n0", 1000)));
  ctx.resolved.set("confidence", format_double(config.get_double("confidence", 0.999)));
  ctx.resolved.set("cert.sigma", config.get_string("cert.sigma", "auto"));
  ctx.resolved.set("cert.max_queries",
                   std::to_string(config.get_int("cert.max_queries", 0)));
  ctx.resolved.set("cert.radii", config.get_string("cert.radii", "auto"));
  ctx.resolve_out_dir();
  ctx.echo_config();

  const LoadedData data = load_data(ctx);
  const EmbeddingModel model = load_model_for(ctx, data);
  const CertOutcome outcome =
      run_certification(ctx.resolved, model, data.filter, split_queries(ctx, data));
  write_certification_outputs(ctx, outcome, data.kg);

  std::cout << "sigma " << outcome.report.sigma << " acr " << outcome.report.acr
            << " acr/sigma " << outcome.report.acr_over_sigma << " ca "
            << outcome.report.ca0 << " over " << outcome.report.num_queries
            << " queries\n";
  ctx.finish();
  return 0;
}

int cmd_multihop(KeyValueConfig config) {
  config.check_known_keys(with_data_keys(
      {"checkpoint", "split", "beam", "multihop.cap", "multihop.hops"}));
  CommandContext ctx("multihop");
  resolve_data_keys(ctx.resolved, config);
  ctx.resolved.set("checkpoint", config.require_string("checkpoint"));
  ctx.resolved.set("split", config.get_string("split", "test"));
  const auto beam = static_cast<int32_t>(config.get_int("beam", 32));
  const int64_t cap = config.get_int("multihop.cap", 200);
  ctx.resolved.set("beam", std::to_string(beam));
  ctx.resolved.set("multihop.cap", std::to_string(cap));
  ctx.resolved.set("multihop.hops", config.get_string("multihop.hops", "1,2,3"));
  ctx.resolve_out_dir();
  ctx.echo_config();

  const LoadedData data = load_data(ctx);
  const EmbeddingModel model = load_model_for(ctx, data);
  const Split split = split_from_string(ctx.resolved.get_string("split", "test"));
  const uint64_t seed = ctx.resolved.get_uint("seed", 0);

  std::vector<PathQuery> queries;
  for (int32_t hops : parse_int_list(ctx.resolved.get_string("multihop.hops", "1,2,3"),
                                     "multihop.hops")) {
    auto sampled = enumerate_path_queries(data.kg, split, hops, cap, seed);
    queries.insert(queries.end(), sampled.begin(), sampled.end());
  }
  if (queries.empty()) throw Error("no path queries could be sampled");
  const auto metrics = multihop_metrics(model, queries, beam);

  ordered_json doc;
  doc["beam"] = beam;
  ordered_json per_hop = ordered_json::array();
  for (const auto& [hops, block] : metrics) {
    ordered_json entry = metrics_to_json(block);
    entry["hops"] = hops;
    per_hop.push_back(entry);
  }
  doc["per_hop"] = per_hop;
  {
    std::ofstream report(ctx.output("multihop.json"), std::ios::trunc);
    report << doc.dump(2) << '\n';
  }
  {
    std::ofstream table(ctx.output("multihop.tsv"), std::ios::trunc);
    table << "hops\tmetric\tvalue\n";
    for (const auto& [hops, block] : metrics) {
      const auto row = [&](const char* name, double value) {
        table << hops << '\t' << name << '\t' << format_double(value) << '\n';
      };
      row("mrr", block.mrr);
      row("mr", block.mr);
      row("hits1", block.hits1);
      row("hits3", block.hits3);
      row("hits10", block.hits10);
    }
  }
  for (const auto& [hops, block] : metrics) {
    std::cout << hops << "p: mrr " << block.mrr << " hits10 " << block.hits10 << '\n';
  }
  ctx.finish();
  return 0;
}

int cmd_grid(KeyValueConfig config) {
  auto known = with_data_keys(kTrainKeys);
  for (const char* key : {"grid.alphas", "grid.lambdas", "grid.eval_split", "n0",
                          "confidence", "cert.sigma", "cert.max_queries",
                          "cert.radii"}) {
    known.push_back(key);
  }
  config.check_known_keys(known);

  CommandContext ctx("grid");
  TrainConfig base = train_config_from(config);
  resolve_data_keys(ctx.resolved, config);
  resolve_train_keys(ctx.resolved, base);
  const std::vector<double> alphas =
      config.get_double_list("grid.alphas", {0.1, 0.2, 0.5, 1.0});
  const std::vector<double> lambdas =
      config.get_double_list("grid.lambdas", {0.1, 0.2, 0.5, 1.0});
  if (alphas.empty() || lambdas.empty()) {
    throw ConfigError("grid.alphas and grid.lambdas must be non-empty");
  }
  {
    std::string a, l;
    for (size_t i = 0; i < alphas.size(); ++i) a += (i ? "," : "") + format_double(alphas[i]);
    for (size_t i = 0; i < lambdas.size(); ++i) l += (i ? "," : "") + format_double(lambdas[i]);
    ctx.resolved.set("grid.alphas", a);
    ctx.resolved.set("grid.lambdas", l);
  }
  const std::string eval_split_name = config.get_string("grid.eval_split", "valid");
  ctx.resolved.set("grid.eval_split", eval_split_name);
  ctx.resolved.set("n0", std::to_string(config.get_int("n0", 1000)));
  ctx.resolved.set("confidence", format_double(config.get_double("confidence", 0.999)));
  ctx.resolved.set("cert.sigma", config.get_string("cert.sigma", "auto"));
  ctx.resolved.set("cert.max_queries",
                   std::to_string(config.get_int("cert.max_queries", 0)));
  ctx.resolved.set("cert.radii", config.get_string("cert.radii", "auto"));
  ctx.resolve_out_dir();
  ctx.echo_config();

  const LoadedData data = load_data(ctx);
  const Split eval_split = split_from_string(eval_split_name);
  const std::vector<Query> eval_queries = queries_from_split(data.kg, eval_split);
  if (eval_queries.empty()) {
    throw ConfigError("grid evaluation split `" + eval_split_name + "` is empty");
  }

  struct Row {
    double alpha, lambda;
    double mrr = 0.0, acr_over_sigma = 0.0;
    std::string error;
  };
  std::vector<Row> rows;
  bool any_error = false;
  for (double alpha : alphas) {
    for (double lambda : lambdas) {
      Row row{alpha, lambda};
      try {
        TrainConfig cell = base;
        cell.alpha = alpha;
        cell.lambda = lambda;
        TrainResult result = train(data.kg, cell);
        row.mrr = link_prediction(result.model, eval_queries, data.filter,
                                  EvalCondition{})
                      .mrr;
        const CertOutcome outcome = run_certification(ctx.resolved, result.model,
                                                      data.filter, eval_queries);
        row.acr_over_sigma = outcome.report.acr_over_sigma;
      } catch (const std::exception& e) {
        row.error = e.what();
        any_error = true;
      }
      std::cerr << "grid alpha " << row.alpha << " lambda " << row.lambda << ": "
                << (row.error.empty()
                        ? "mrr " + format_double(row.mrr) + " acr/sigma " +
                              format_double(row.acr_over_sigma)
                        : "error " + row.error)
                << '\n';
      rows.push_back(std::move(row));
    }
  }

  {
    std::ofstream table(ctx.output("grid.tsv"), std::ios::trunc);
    table << "alpha\tlambda\tval_mrr\tacr_over_sigma\terror\n";
    for (const Row& row : rows) {
      table << format_double(row.alpha) << '\t' << format_double(row.lambda) << '\t'
            << format_double(row.mrr) << '\t' << format_double(row.acr_over_sigma)
            << '\t' << row.error << '\n';
    }
  }
  {
    ordered_json doc = ordered_json::array();
    for (const Row& row : rows) {
      ordered_json entry;
      entry["alpha"] = row.alpha;
      entry["lambda"] = row.lambda;
      entry["val_mrr"] = row.mrr;
      entry["acr_over_sigma"] = row.acr_over_sigma;
      if (!row.error.empty()) entry["error"] = row.error;
      doc.push_back(entry);
    }
    std::ofstream report(ctx.output("grid.json"), std::ios::trunc);
    report << doc.dump(2) << '\n';
  }
  ctx.finish();
  return any_error ? 2 : 0;
}

int run_cli(const std::vector<std::string>& args) {
  try {
    if (args.empty()) {
      std::cerr << "usage: kgcert <train|eval|certify|multihop|grid> --config PATH"
                   " [key=value ...]\n";
      return 1;
    }
    const std::string& command = args[0];
    KeyValueConfig config;
    std::vector<std::string> overrides;
    for (size_t i = 1; i < args.size(); ++i) {
      if (args[i] == "--config") {
        if (i + 1 >= args.size()) throw ConfigError("--config requires a path");
        config = KeyValueConfig::parse_file(args[++i]);
      } else if (args[i] == "--help" || args[i] == "-h") {
        std::cout << "usage: kgcert <train|eval|certify|multihop|grid> --config PATH"
                     " [key=value ...]\n";
        return 0;
      } else {
        overrides.push_back(args[i]);
      }
    }
    for (const std::string& assignment : overrides) {
      config.apply_override(assignment);
    }

    if (command == "train") return cmd_train(std::move(config));
    if (command == "eval") return cmd_eval(std::move(config));
    if (command == "certify") return cmd_certify(std::move(config));
    if (command == "multihop") return cmd_multihop(std::move(config));
    if (command == "grid") return cmd_grid(std::move(config));
    throw ConfigError("unknown command: " + command);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace kgcert
