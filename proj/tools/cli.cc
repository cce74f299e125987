// Copyright 2026 The kgt Authors.
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

#include "cli.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "kgt/align.h"
#include "kgt/cycle.h"
#include "kgt/dataset_io.h"
#include "kgt/error.h"
#include "kgt/filter.h"
#include "kgt/gembed.h"
#include "kgt/kgtypes.h"
#include "kgt/lineariz.h"
#include "kgt/metrics.h"
#include "kgt/selftrain.h"
#include "kgt/text.h"

namespace kgt::cli {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string DumpJson(const Json& value, int indent = -1) {
  return value.dump(indent, ' ', false, Json::error_handler_t::replace);
}

std::string ReadWholeFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteWholeFile(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw UsageError("cannot write " + path.string());
}

// Flag values (strings) layered over a flat config object with dotted keys.
// Every value read is recorded for the manifest.
class Settings {
 public:
  void SetConfig(Json config) { config_ = std::move(config); }

  void Override(const std::string& key, std::string value) {
    flags_[key] = std::move(value);
  }

  std::optional<std::string> String(const std::string& key) {
    if (auto it = flags_.find(key); it != flags_.end()) {
      used_[key] = it->second;
      return it->second;
    }
    if (auto it = config_.find(key); it != config_.end() && !it->is_null()) {
      if (!it->is_string()) throw UsageError(key + " must be a string");
      used_[key] = *it;
      return it->get<std::string>();
    }
    return std::nullopt;
  }

  std::string String(const std::string& key, std::string fallback) {
    if (auto v = String(key)) return *v;
    used_[key] = fallback;
    return fallback;
  }

  std::string RequiredString(const std::string& key, std::string_view flag) {
    if (auto v = String(key)) return *v;
    throw UsageError("missing required " + std::string(flag) + " (or config " +
                     key + ")");
  }

  double Double(const std::string& key, double fallback) {
    return Number<double>(key, fallback, [](const std::string& s) {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    });
  }

  std::int64_t Int(const std::string& key, std::int64_t fallback) {
    return Number<std::int64_t>(key, fallback, [](const std::string& s) {
      std::size_t used = 0;
      const long long v = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return static_cast<std::int64_t>(v);
    });
  }

  std::size_t Count(const std::string& key, std::size_t fallback) {
    const std::int64_t v = Int(key, static_cast<std::int64_t>(fallback));
    if (v < 0) throw UsageError(key + " must be non-negative");
    return static_cast<std::size_t>(v);
  }

  std::uint64_t Seed(const std::string& key, std::uint64_t fallback) {
    return Number<std::uint64_t>(key, fallback, [](const std::string& s) {
      std::size_t used = 0;
      if (!s.empty() && s[0] == '-') throw std::invalid_argument(s);
      const unsigned long long v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return static_cast<std::uint64_t>(v);
    });
  }

  bool Bool(const std::string& key, bool fallback) {
    if (auto it = flags_.find(key); it != flags_.end()) {
      const std::string v = FoldCase(it->second);
      bool result;
      if (v == "true" || v == "1" || v == "yes") {
        result = true;
      } else if (v == "false" || v == "0" || v == "no") {
        result = false;
      } else {
        throw UsageError(key + " expects true or false, got \"" + it->second +
                         "\"");
      }
      used_[key] = result;
      return result;
    }
    if (auto it = config_.find(key); it != config_.end() && !it->is_null()) {
      if (!it->is_boolean()) throw UsageError(key + " must be a boolean");
      used_[key] = *it;
      return it->get<bool>();
    }
    used_[key] = fallback;
    return fallback;
  }

  const Json& used() const { return used_; }

 private:
  template <typename T, typename Parse>
  T Number(const std::string& key, T fallback, Parse parse) {
    if (auto it = flags_.find(key); it != flags_.end()) {
      T value;
      try {
        value = parse(it->second);
      } catch (const std::exception&) {
        throw UsageError(key + " expects a number, got \"" + it->second + "\"");
      }
      used_[key] = value;
      return value;
    }
    if (auto it = config_.find(key); it != config_.end() && !it->is_null()) {
      if (!it->is_number()) throw UsageError(key + " must be a number");
      const T value = it->get<T>();
      used_[key] = value;
      return value;
    }
    used_[key] = fallback;
    return fallback;
  }

  Json config_ = Json::object();
  std::map<std::string, std::string> flags_;
  Json used_ = Json::object();
};

struct Manifest {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::optional<std::uint64_t> seed;
  Json counts = Json::object();
};

void WriteManifest(const Manifest& manifest, const Settings& settings,
                   const std::string& primary_output) {
  Json doc = Json::object();
  doc["command"] = manifest.command;
  Json inputs = Json::array();
  for (const auto& path : manifest.inputs) {
    inputs.push_back({{"path", path}, {"fnv1a64", Fnv1aHex(ReadWholeFile(path))}});
  }
  doc["inputs"] = std::move(inputs);
  Json outputs = Json::array();
  for (const auto& path : manifest.outputs) {
    outputs.push_back(
        {{"path", path}, {"fnv1a64", Fnv1aHex(ReadWholeFile(path))}});
  }
  doc["outputs"] = std::move(outputs);
  doc["config"] = settings.used();
  doc["config_hash"] = Fnv1aHex(DumpJson(settings.used()));
  doc["seed"] = manifest.seed ? Json(*manifest.seed) : Json(nullptr);
  doc["counts"] = manifest.counts;
  WriteWholeFile(primary_output + ".manifest.json", DumpJson(doc, 2) + "\n");
}

// Per-run context shared by subcommands.
struct Context {
  Settings settings;
  unsigned threads = 0;
  std::ostream* out = nullptr;

  ClientOptions Client() {
    ClientOptions options;
    options.batch_size = settings.Count("endpoints.batch_size", 64);
    options.max_attempts =
        static_cast<int>(settings.Int("endpoints.max_attempts", 3));
    options.concurrency = threads;
    if (options.batch_size == 0) throw UsageError("endpoints.batch_size is 0");
    return options;
  }

  std::string Workdir() {
    return settings.String("paths.workdir", "");
  }
};

void SaveAndRecord(const Dataset& dataset, const std::string& path,
                   Manifest* manifest) {
  if (fs::path(path).has_parent_path()) {
    fs::create_directories(fs::path(path).parent_path());
  }
  SaveDataset(dataset, path);
  manifest->outputs.push_back(path);
  manifest->counts["examples"] = dataset.size();
  manifest->counts["triples"] = CountTriples(dataset);
}

Json TextScoresJson(const TextScores& s) {
  auto rouge = [](const RougeScore& r) {
    return Json{{"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1}};
  };
  return Json{{"bleu1", s.bleu1},
              {"bleu4", s.bleu4},
              {"rouge1", rouge(s.rouge1)},
              {"rouge4", rouge(s.rouge4)}};
}

Json GraphScoreJson(const GraphScore& s) {
  return Json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

Json MetricsJson(const BinaryMetrics& m) {
  return Json{{"precision", m.precision}, {"recall", m.recall},
              {"f1", m.f1},               {"accuracy", m.accuracy},
              {"tp", m.tp},               {"fp", m.fp},
              {"fn", m.fn},               {"tn", m.tn}};
}

std::string RowsToJsonl(const std::vector<ReportRow>& rows) {
  std::ostringstream buffer;
  WriteReportJsonl(rows, buffer);
  return buffer.str();
}

// --- subcommands ---------------------------------------------------------

Manifest Ingest(Context& ctx, const std::string& output) {
  Manifest m;
  m.command = "ingest";
  const std::string kg_path = ctx.settings.RequiredString("paths.kg", "--kg");
  const KnowledgeGraph kg = KnowledgeGraph::Load(kg_path);
  m.inputs.push_back(kg_path);
  std::ostringstream buffer;
  for (const Triple& t : kg.triples()) buffer << TripleToJson(t) << '\n';
  WriteWholeFile(output, buffer.str());
  m.outputs.push_back(output);
  m.counts["entities"] = kg.entity_count();
  m.counts["triples"] = kg.triple_count();
  if (auto corpus_path = ctx.settings.String("paths.corpus")) {
    m.inputs.push_back(*corpus_path);
    m.counts["sentences"] = LoadCorpus(*corpus_path).size();
  }
  return m;
}

Manifest Align(Context& ctx, const std::string& output) {
  Manifest m;
  m.command = "align";
  const std::string kg_path = ctx.settings.RequiredString("paths.kg", "--kg");
  const std::string corpus_path =
      ctx.settings.RequiredString("paths.corpus", "--corpus");
  AlignOptions options;
  options.second_hop = ctx.settings.Bool("align.second_hop", true);
  options.require_subject_mention =
      ctx.settings.Bool("align.require_subject", true);
  options.threads = ctx.threads;
  const KnowledgeGraph kg = KnowledgeGraph::Load(kg_path);
  const auto corpus = LoadCorpus(corpus_path);
  m.inputs = {kg_path, corpus_path};
  AlignStats stats;
  const Dataset dataset = AlignCorpus(kg, corpus, options, &stats);
  SaveAndRecord(dataset, output, &m);
  m.counts["sentences"] = stats.sentences;
  m.counts["unknown_page"] = stats.unknown_page;
  m.counts["no_match"] = stats.no_match;
  m.counts["first_hop_triples"] = stats.first_hop_triples;
  m.counts["second_hop_triples"] = stats.second_hop_triples;
  return m;
}

std::string ScorerSpec(Context& ctx) {
  if (auto flag = ctx.settings.String("endpoints.scorer.flag")) return *flag;
  if (const char* env = std::getenv("KGT_SCORER_URL"); env && *env) {
    return env;
  }
  return ctx.settings.RequiredString("endpoints.scorer", "--scorer");
}

Manifest FilterEntail(Context& ctx, const std::string& input,
                      const std::string& output) {
  Manifest m;
  m.command = "filter-entail";
  const Dataset dataset = LoadDataset(input);
  m.inputs.push_back(input);
  const double tau = ctx.settings.Double("filter.tau", 0.5);
  if (!(tau >= 0.0 && tau <= 1.0)) throw UsageError("filter.tau outside [0,1]");
  auto scorer = MakeScorer(ScorerSpec(ctx), ctx.Workdir());
  EntailmentReport report;
  const Dataset filtered =
      EntailmentFilter(dataset, *scorer, tau, ctx.Client(), &report);
  SaveAndRecord(filtered, output, &m);
  m.counts["scored"] = report.scored;
  m.counts["kept"] = report.kept;
  m.counts["removed"] = report.removed;
  m.counts["examples_dropped"] = report.examples_dropped;
  m.counts["removed_by_predicate"] = report.removed_by_predicate;
  return m;
}

Manifest FilterLength(Context& ctx, const std::string& input,
                      const std::string& output) {
  Manifest m;
  m.command = "filter-length";
  const Dataset dataset = LoadDataset(input);
  m.inputs.push_back(input);
  LengthPercentiles percentiles;
  percentiles.single_triple =
      static_cast<int>(ctx.settings.Int("length.single_percentile", 30));
  percentiles.multi_triple =
      static_cast<int>(ctx.settings.Int("length.multi_percentile", 90));
  Dataset reference_storage;
  const Dataset* reference = &dataset;
  if (auto ref_path = ctx.settings.String("length.reference")) {
    reference_storage = LoadDataset(*ref_path);
    reference = &reference_storage;
    m.inputs.push_back(*ref_path);
  }
  LengthThresholdTable table;
  try {
    table = LengthThresholds(*reference, percentiles);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("length percentiles: ") + e.what());
  }
  LengthFilterReport report;
  const Dataset filtered = LengthFilter(dataset, table, &report);
  SaveAndRecord(filtered, output, &m);
  Json thresholds = Json::object();
  for (const auto& [k, l] : table.threshold) thresholds[std::to_string(k)] = l;
  m.counts["thresholds"] = thresholds;
  Json removed = Json::object();
  for (const auto& [k, n] : report.removed_by_bucket) {
    removed[std::to_string(k)] = n;
  }
  m.counts["removed_by_bucket"] = removed;
  return m;
}

Manifest Augment(Context& ctx, const std::string& input,
                 const std::string& output) {
  Manifest m;
  m.command = "augment";
  const Dataset dataset = LoadDataset(input);
  m.inputs.push_back(input);
  const std::string spec =
      ctx.settings.RequiredString("endpoints.t2g", "--t2g");
  auto t2g = MakeGenerator(spec, /*g2t=*/false, ctx.Workdir());
  AugmentReport report;
  const Dataset augmented = AugmentTriples(dataset, *t2g, ctx.Client(), &report);
  SaveAndRecord(augmented, output, &m);
  m.counts["added"] = report.added;
  m.counts["parse_failures"] = report.parse_failures;
  return m;
}

Manifest SelfTrain(Context& ctx, const std::string& input,
                   const std::string& output) {
  Manifest m;
  m.command = "selftrain";
  const Dataset dataset = LoadDataset(input);
  const std::string annotated_path =
      ctx.settings.RequiredString("paths.annotated", "--annotated");
  const auto annotated = LoadAnnotated(annotated_path);
  m.inputs = {input, annotated_path};
  IterationConfig config;
  config.sample_size = ctx.settings.Count("selftrain.sample_size", 10000);
  config.theta_pos = ctx.settings.Double("selftrain.theta_pos", 0.9);
  config.theta_neg = ctx.settings.Double("selftrain.theta_neg", 0.1);
  config.cap = ctx.settings.Count("selftrain.cap", 10000);
  config.easy_hard_ratio = ctx.settings.Double("selftrain.easy_hard_ratio", 0.5);
  config.k_hard = static_cast<int>(ctx.settings.Int("selftrain.k_hard", 5));
  config.seed = ctx.settings.Seed("selftrain.seed", 0);
  config.trainer_batch_size =
      ctx.settings.Count("selftrain.trainer_batch_size", 2048);
  config.tau = ctx.settings.Double("selftrain.tau", 0.5);
  config.patience = static_cast<int>(ctx.settings.Int("selftrain.patience", 1));
  config.max_iterations =
      static_cast<int>(ctx.settings.Int("selftrain.max_iterations", 20));
  try {
    ValidateConfig(config);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("selftrain config: ") + e.what());
  }
  m.seed = config.seed;
  std::optional<EmbeddingTable> table;
  if (auto emb = ctx.settings.String("paths.embeddings")) {
    table = LoadEmbeddings(*emb);
    m.inputs.push_back(*emb);
  }
  const std::string workdir = ctx.settings.String(
      "paths.workdir", (fs::path(output).parent_path() / "selftrain").string());
  auto scorer = MakeScorer(ScorerSpec(ctx), workdir);
  auto trainer = MakeTrainer(
      ctx.settings.RequiredString("endpoints.trainer", "--trainer"), workdir);
  const auto pool = PoolFromDataset(dataset);
  const SelfTrainResult result =
      RunIterations(pool, *scorer, *trainer, annotated, config,
                    table ? &*table : nullptr, workdir, ctx.Client());

  Json doc = Json::object();
  doc["best_version"] =
      result.best_version ? Json(*result.best_version) : Json(nullptr);
  doc["best_f1"] = result.best_f1;
  doc["baseline"] = MetricsJson(result.baseline);
  doc["stop_reason"] = result.stop_reason;
  doc["error"] = result.error ? Json(*result.error) : Json(nullptr);
  Json iterations = Json::array();
  for (const auto& it : result.iterations) {
    iterations.push_back(
        {{"iteration", it.iteration},
         {"sampled", it.sampled},
         {"finetune_examples", it.finetune_examples},
         {"dataset_path", it.dataset_path},
         {"model_version",
          it.model_version ? Json(*it.model_version) : Json(nullptr)},
         {"by_origin", it.counts.by_origin},
         {"positives_by_predicate", it.counts.positives_by_predicate},
         {"negatives_by_predicate", it.counts.negatives_by_predicate},
         {"hard_fallbacks", it.counts.hard_fallbacks},
         {"capped_synthetic", it.counts.capped_synthetic},
         {"before", MetricsJson(it.before)},
         {"after", MetricsJson(it.after)},
         {"improved", it.improved}});
  }
  doc["iterations"] = std::move(iterations);
  WriteWholeFile(output, DumpJson(doc, 2) + "\n");
  m.outputs.push_back(output);
  m.counts["pool"] = pool.size();
  m.counts["iterations"] = result.iterations.size();
  m.counts["stop_reason"] = result.stop_reason;
  if (result.error) throw EndpointError(*result.error);
  return m;
}

Manifest Embed(Context& ctx, const std::string& output) {
  Manifest m;
  m.command = "embed";
  const std::string kg_path = ctx.settings.RequiredString("paths.kg", "--kg");
  const KnowledgeGraph kg = KnowledgeGraph::Load(kg_path);
  m.inputs.push_back(kg_path);
  TransEConfig config;
  config.dim = static_cast<int>(ctx.settings.Int("embed.dim", 50));
  config.margin = ctx.settings.Double("embed.margin", 1.0);
  config.learning_rate = ctx.settings.Double("embed.lr", 0.01);
  config.epochs = static_cast<int>(ctx.settings.Int("embed.epochs", 100));
  config.negatives = static_cast<int>(ctx.settings.Int("embed.negatives", 1));
  config.norm = static_cast<int>(ctx.settings.Int("embed.norm", 2));
  config.seed = ctx.settings.Seed("embed.seed", 0);
  try {
    ValidateConfig(config);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("embed config: ") + e.what());
  }
  m.seed = config.seed;
  const TransEResult result = TrainTransE(kg.triples(), config);
  if (fs::path(output).has_parent_path()) {
    fs::create_directories(fs::path(output).parent_path());
  }
  SaveEmbeddings(result.table, output);
  m.outputs.push_back(output);
  m.counts["entities"] = result.table.entities.size();
  m.counts["predicates"] = result.table.predicates.size();
  m.counts["epoch_loss"] = result.epoch_loss;
  return m;
}

Manifest Noise(Context& ctx, const std::string& input,
               const std::string& output) {
  Manifest m;
  m.command = "noise";
  const Dataset dataset = LoadDataset(input);
  m.inputs.push_back(input);
  NoiseOptions options;
  options.p = ctx.settings.Double("noise.p", 0.0);
  if (!(options.p >= 0.0 && options.p <= 1.0)) {
    throw UsageError("noise.p outside [0,1]");
  }
  options.seed = ctx.settings.Seed("noise.seed", 0);
  const std::string ops =
      ctx.settings.String("noise.ops", "delete,substitute,insert");
  options.allow_delete = options.allow_substitute = options.allow_insert = false;
  std::stringstream stream(ops);
  std::string op;
  while (std::getline(stream, op, ',')) {
    op = NormalizeSpace(op);
    if (op == "delete") {
      options.allow_delete = true;
    } else if (op == "substitute") {
      options.allow_substitute = true;
    } else if (op == "insert") {
      options.allow_insert = true;
    } else {
      throw UsageError("unknown noise op \"" + op + "\"");
    }
  }
  if (!options.allow_delete && !options.allow_substitute &&
      !options.allow_insert) {
    throw UsageError("noise.ops enables no operation");
  }
  m.seed = options.seed;
  NoiseReport report;
  const Dataset noisy = InjectNoise(dataset, options, &report);
  SaveAndRecord(noisy, output, &m);
  m.counts["selected"] = report.selected;
  m.counts["deleted"] = report.deleted;
  m.counts["substituted"] = report.substituted;
  m.counts["inserted"] = report.inserted;
  m.counts["floored"] = report.floored;
  return m;
}

void RecordEndpointInput(std::string_view spec, Manifest* m) {
  for (std::string_view scheme : {"mock:", "echo:"}) {
    if (StartsWith(spec, scheme)) {
      m->inputs.emplace_back(spec.substr(scheme.size()));
    }
  }
}

Manifest CycleEval(Context& ctx, const std::string& input,
                   const std::string& output) {
  Manifest m;
  m.command = "cycle-eval";
  const Dataset dataset = LoadDataset(input);
  m.inputs.push_back(input);
  const std::string g2t_spec =
      ctx.settings.RequiredString("endpoints.g2t", "--g2t");
  const std::string t2g_spec =
      ctx.settings.RequiredString("endpoints.t2g", "--t2g");
  RecordEndpointInput(g2t_spec, &m);
  RecordEndpointInput(t2g_spec, &m);
  auto g2t = MakeGenerator(g2t_spec, /*g2t=*/true, ctx.Workdir());
  auto t2g = MakeGenerator(t2g_spec, /*g2t=*/false, ctx.Workdir());
  const auto pairs = PairsFromDataset(dataset);
  const std::string name =
      ctx.settings.String("report.name", fs::path(input).stem().string());
  const CycleReport report =
      CycleEvaluate(*g2t, *t2g, pairs, name, ctx.Client());

  WriteWholeFile(output, RowsToJsonl(report.rows));
  m.outputs.push_back(output);
  const std::string table = FormatReportTable(report.rows);
  if (auto table_path = ctx.settings.String("report.table")) {
    WriteWholeFile(*table_path, table);
    m.outputs.push_back(*table_path);
  }
  if (auto per_example = ctx.settings.String("report.per_example")) {
    std::ostringstream buffer;
    for (std::size_t i = 0; i < report.per_example.size(); ++i) {
      Json row = {{"id", pairs[i].id},
                  {"gold_size", report.per_example[i].gold_size}};
      for (const auto& [k, v] : report.per_example[i].values) row[k] = v;
      buffer << DumpJson(row) << '\n';
    }
    WriteWholeFile(*per_example, buffer.str());
    m.outputs.push_back(*per_example);
  }
  *ctx.out << "dataset " << report.dataset << "\n" << table;
  m.counts["examples"] = report.examples;
  m.counts["gtg"] = GraphScoreJson(report.gtg);
  m.counts["tgt"] = TextScoresJson(report.tgt);
  m.counts["gtg_parse_failures"] = report.gtg_parse.failed_items;
  m.counts["tgt_parse_failures"] = report.tgt_parse.failed_items;
  return m;
}

Manifest UniEval(Context& ctx, const std::string& input,
                 const std::string& output) {
  Manifest m;
  m.command = "uni-eval";
  const Dataset dataset = LoadDataset(input);
  m.inputs.push_back(input);
  const std::string g2t_spec =
      ctx.settings.RequiredString("endpoints.g2t", "--g2t");
  const std::string t2g_spec =
      ctx.settings.RequiredString("endpoints.t2g", "--t2g");
  RecordEndpointInput(g2t_spec, &m);
  RecordEndpointInput(t2g_spec, &m);
  auto g2t = MakeGenerator(g2t_spec, /*g2t=*/true, ctx.Workdir());
  auto t2g = MakeGenerator(t2g_spec, /*g2t=*/false, ctx.Workdir());
  const auto pairs = PairsFromDataset(dataset);
  const UnidirectionalReport report =
      UnidirectionalEval(*g2t, *t2g, pairs, ctx.Client());
  const Json doc = {{"examples", report.examples},
                    {"g2t", TextScoresJson(report.forward)},
                    {"t2g", GraphScoreJson(report.reverse)},
                    {"t2g_parse_failures", report.parse.failed_items}};
  WriteWholeFile(output, DumpJson(doc) + "\n");
  m.outputs.push_back(output);
  *ctx.out << DumpJson(doc, 2) << "\n";
  m.counts["examples"] = report.examples;
  return m;
}

Manifest Report(Context& ctx, const std::string& input,
                const std::string& output) {
  Manifest m;
  m.command = "report";
  m.inputs.push_back(input);
  std::istringstream in(ReadWholeFile(input));
  std::vector<ExampleMetrics> examples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (NormalizeSpace(line).empty()) continue;
    Json obj;
    try {
      obj = Json::parse(line);
    } catch (const Json::exception& e) {
      throw SchemaError(input + ":" + std::to_string(line_no) + ": " + e.what());
    }
    auto size = obj.find("gold_size");
    if (!obj.is_object() || size == obj.end() || !size->is_number_unsigned()) {
      throw SchemaError(input + ":" + std::to_string(line_no) +
                        ": missing non-negative integer \"gold_size\"");
    }
    ExampleMetrics example;
    example.gold_size = size->get<std::size_t>();
    for (const auto& [key, value] : obj.items()) {
      if (key == "gold_size" || !value.is_number()) continue;
      example.values.emplace_back(key, value.get<double>());
    }
    examples.push_back(std::move(example));
  }
  std::vector<ReportRow> rows;
  try {
    rows = Aggregate(examples);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(input + ": " + e.what());
  }
  WriteWholeFile(output, RowsToJsonl(rows));
  m.outputs.push_back(output);
  const std::string table = FormatReportTable(rows);
  if (auto table_path = ctx.settings.String("report.table")) {
    WriteWholeFile(*table_path, table);
    m.outputs.push_back(*table_path);
  }
  *ctx.out << table;
  m.counts["examples"] = examples.size();
  m.counts["rows"] = rows.size();
  return m;
}

int Categorize(const std::exception& e, std::ostream& err) {
  if (const auto* kgt_error = dynamic_cast<const Error*>(&e)) {
    switch (kgt_error->kind()) {
      case ErrorKind::kUsage:
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
      case ErrorKind::kSchema:
        err << "input error: " << e.what() << "\n";
        return kExitSchema;
      case ErrorKind::kEndpoint:
        err << "endpoint error: " << e.what() << "\n";
        return kExitEndpoint;
      case ErrorKind::kInternal:
        break;
    }
  }
  err << "internal error: " << e.what() << "\n";
  return kExitInternal;
}

}  // namespace

std::string Fnv1aHex(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = kHex[hash & 0xf];
    hash >>= 4;
  }
  return out;
}

std::unique_ptr<EntailmentScorer> MakeScorer(std::string_view spec,
                                             const std::string& workdir) {
  if (StartsWith(spec, "http://")) {
    return std::make_unique<HttpScorer>(std::string(spec));
  }
  if (StartsWith(spec, "cmd:")) {
    return std::make_unique<CommandScorer>(std::string(spec.substr(4)), workdir);
  }
  if (StartsWith(spec, "const:")) {
    const std::string raw(spec.substr(6));
    double p = -1.0;
    try {
      std::size_t used = 0;
      p = std::stod(raw, &used);
      if (used != raw.size()) p = -1.0;
    } catch (const std::exception&) {
    }
    if (!(p >= 0.0 && p <= 1.0)) {
      throw UsageError("const scorer needs a probability, got \"" + raw + "\"");
    }
    return std::make_unique<FunctionScorer>(
        [p](const ScoreRequest&, const std::optional<std::string>&) {
          return p;
        });
  }
  throw UsageError("unknown scorer spec \"" + std::string(spec) + "\"");
}

std::unique_ptr<TextGenerator> MakeGenerator(std::string_view spec, bool g2t,
                                             const std::string& workdir) {
  if (StartsWith(spec, "http://")) {
    return std::make_unique<HttpGenerator>(std::string(spec));
  }
  if (StartsWith(spec, "cmd:")) {
    return std::make_unique<CommandGenerator>(std::string(spec.substr(4)),
                                              workdir);
  }
  if (StartsWith(spec, "mock:") || StartsWith(spec, "echo:")) {
    const bool mock = StartsWith(spec, "mock:");
    auto pairs = PairsFromDataset(LoadDataset(std::string(spec.substr(5))));
    if (pairs.empty()) {
      throw UsageError("generator dataset is empty: " + std::string(spec));
    }
    if (mock) {
      if (g2t) return std::make_unique<RetrievalG2T>(std::move(pairs));
      return std::make_unique<RetrievalT2G>(std::move(pairs));
    }
    if (g2t) return std::make_unique<EchoG2T>(pairs);
    return std::make_unique<EchoT2G>(pairs);
  }
  throw UsageError("unknown generator spec \"" + std::string(spec) + "\"");
}

std::unique_ptr<ScorerTrainer> MakeTrainer(std::string_view spec,
                                           const std::string& workdir) {
  if (StartsWith(spec, "http://")) {
    return std::make_unique<HttpTrainer>(std::string(spec));
  }
  if (StartsWith(spec, "cmd:")) {
    return std::make_unique<CommandTrainer>(std::string(spec.substr(4)),
                                            workdir);
  }
  throw UsageError("unknown trainer spec \"" + std::string(spec) + "\"");
}

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Knowledge-graph/text alignment and cyclic evaluation toolkit",
               "kgt"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "kgt 0.1.0");

  Context ctx;
  ctx.out = &out;
  std::string config_path;
  unsigned threads = 0;
  app.add_option("--config", config_path,
                 "JSON object with dotted keys; flags override it");
  app.add_option("--threads", threads,
                 "Worker threads for parallel stages (0 = all cores)");

  std::map<std::string, std::string> flag_values;
  std::string input;
  std::string output;
  // Binds --flag to a dotted config key.
  auto bind = [&](CLI::App* sub, const std::string& flag,
                  const std::string& key, const std::string& help) {
    sub->add_option_function<std::string>(
        flag, [&flag_values, key](const std::string& v) { flag_values[key] = v; },
        help + " [" + key + "]");
  };
  auto io = [&](CLI::App* sub, bool with_input) {
    if (with_input) {
      sub->add_option("--input,-i", input, "Input dataset JSONL")->required();
    }
    sub->add_option("--output,-o", output, "Output path")->required();
  };

  auto* ingest = app.add_subcommand("ingest", "Validate a KG dump and export its triples");
  io(ingest, false);
  bind(ingest, "--kg", "paths.kg", "KG dump JSONL");
  bind(ingest, "--corpus", "paths.corpus", "Sentence corpus JSONL to validate");

  auto* align = app.add_subcommand("align", "Align corpus sentences to KG triples");
  io(align, false);
  bind(align, "--kg", "paths.kg", "KG dump JSONL");
  bind(align, "--corpus", "paths.corpus", "Sentence corpus JSONL");
  bind(align, "--second-hop", "align.second_hop", "Match second-hop triples (true|false)");
  bind(align, "--require-subject", "align.require_subject",
       "Require a subject mention for first-hop matches (true|false)");

  auto* entail = app.add_subcommand("filter-entail", "Drop matches with low entailment scores");
  io(entail, true);
  bind(entail, "--scorer", "endpoints.scorer.flag", "Scorer endpoint spec");
  bind(entail, "--tau", "filter.tau", "Keep matches scoring >= tau");
  bind(entail, "--batch-size", "endpoints.batch_size", "Requests per batch");

  auto* length = app.add_subcommand("filter-length", "Drop over-long sentences per triple-count bucket");
  io(length, true);
  bind(length, "--reference", "length.reference", "Dataset to compute thresholds on");
  bind(length, "--single-percentile", "length.single_percentile", "Percentile for 1-triple examples");
  bind(length, "--multi-percentile", "length.multi_percentile", "Percentile for larger examples");

  auto* augment = app.add_subcommand("augment", "Add triples predicted by a text-to-graph model");
  io(augment, true);
  bind(augment, "--t2g", "endpoints.t2g", "Text-to-graph endpoint spec");
  bind(augment, "--batch-size", "endpoints.batch_size", "Requests per batch");

  auto* selftrain = app.add_subcommand("selftrain", "Iteratively fine-tune the entailment scorer");
  io(selftrain, true);
  bind(selftrain, "--annotated", "paths.annotated", "Annotated pairs JSONL");
  bind(selftrain, "--scorer", "endpoints.scorer.flag", "Scorer endpoint spec");
  bind(selftrain, "--trainer", "endpoints.trainer", "Trainer endpoint spec");
  bind(selftrain, "--embeddings", "paths.embeddings", "Predicate embeddings for hard negatives");
  bind(selftrain, "--workdir", "paths.workdir", "Directory for fine-tune sets");
  bind(selftrain, "--sample-size", "selftrain.sample_size", "Pairs sampled per iteration");
  bind(selftrain, "--theta-pos", "selftrain.theta_pos", "Positive score threshold");
  bind(selftrain, "--theta-neg", "selftrain.theta_neg", "Negative score threshold");
  bind(selftrain, "--cap", "selftrain.cap", "Per predicate and class limit");
  bind(selftrain, "--easy-hard-ratio", "selftrain.easy_hard_ratio", "Share of easy negatives");
  bind(selftrain, "--k-hard", "selftrain.k_hard", "Neighbours considered for hard negatives");
  bind(selftrain, "--seed", "selftrain.seed", "Random seed");
  bind(selftrain, "--trainer-batch-size", "selftrain.trainer_batch_size", "Trainer batch size");
  bind(selftrain, "--tau", "selftrain.tau", "Decision threshold on the annotated set");
  bind(selftrain, "--patience", "selftrain.patience", "Non-improving iterations tolerated");
  bind(selftrain, "--max-iterations", "selftrain.max_iterations", "Iteration limit");

  auto* embed = app.add_subcommand("embed", "Train TransE embeddings over KG triples");
  io(embed, false);
  bind(embed, "--kg", "paths.kg", "KG dump JSONL");
  bind(embed, "--dim", "embed.dim", "Embedding dimension");
  bind(embed, "--margin", "embed.margin", "Hinge margin");
  bind(embed, "--lr", "embed.lr", "SGD learning rate");
  bind(embed, "--epochs", "embed.epochs", "Training epochs");
  bind(embed, "--negatives", "embed.negatives", "Corrupted triples per positive");
  bind(embed, "--norm", "embed.norm", "Distance norm (1 or 2)");
  bind(embed, "--seed", "embed.seed", "Random seed");

  auto* noise = app.add_subcommand("noise", "Perturb dataset triples");
  io(noise, true);
  bind(noise, "--p", "noise.p", "Per-triple selection probability");
  bind(noise, "--seed", "noise.seed", "Random seed");
  bind(noise, "--ops", "noise.ops", "Comma list of delete,substitute,insert");

  auto* cycle = app.add_subcommand("cycle-eval", "Cyclic GTG/TGT evaluation");
  io(cycle, true);
  bind(cycle, "--g2t", "endpoints.g2t", "Graph-to-text endpoint spec");
  bind(cycle, "--t2g", "endpoints.t2g", "Text-to-graph endpoint spec");
  bind(cycle, "--name", "report.name", "Dataset name for the report");
  bind(cycle, "--table", "report.table", "Also write the text table here");
  bind(cycle, "--per-example", "report.per_example", "Per-example metrics JSONL");
  bind(cycle, "--batch-size", "endpoints.batch_size", "Requests per batch");

  auto* uni = app.add_subcommand("uni-eval", "Forward and reverse evaluation against gold pairs");
  io(uni, true);
  bind(uni, "--g2t", "endpoints.g2t", "Graph-to-text endpoint spec");
  bind(uni, "--t2g", "endpoints.t2g", "Text-to-graph endpoint spec");
  bind(uni, "--batch-size", "endpoints.batch_size", "Requests per batch");

  auto* report = app.add_subcommand("report", "Bucket per-example metrics by gold triple count");
  io(report, true);
  bind(report, "--table", "report.table", "Also write the text table here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!config_path.empty()) {
      Json config;
      try {
        config = Json::parse(ReadWholeFile(config_path));
      } catch (const Json::exception& e) {
        throw UsageError("config " + config_path + ": " + e.what());
      }
      if (!config.is_object()) {
        throw UsageError("config " + config_path + " is not a JSON object");
      }
      ctx.settings.SetConfig(std::move(config));
    }
    for (auto& [key, value] : flag_values) ctx.settings.Override(key, value);
    ctx.threads = threads != 0
                      ? threads
                      : std::max(1u, std::thread::hardware_concurrency());

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    Manifest manifest;
    if (name == "ingest") {
      manifest = Ingest(ctx, output);
    } else if (name == "align") {
      manifest = Align(ctx, output);
    } else if (name == "filter-entail") {
      manifest = FilterEntail(ctx, input, output);
    } else if (name == "filter-length") {
      manifest = FilterLength(ctx, input, output);
    } else if (name == "augment") {
      manifest = Augment(ctx, input, output);
    } else if (name == "selftrain") {
      manifest = SelfTrain(ctx, input, output);
    } else if (name == "embed") {
      manifest = Embed(ctx, output);
    } else if (name == "noise") {
      manifest = Noise(ctx, input, output);
    } else if (name == "cycle-eval") {
      manifest = CycleEval(ctx, input, output);
    } else if (name == "uni-eval") {
      manifest = UniEval(ctx, input, output);
    } else {
      manifest = Report(ctx, input, output);
    }
    WriteManifest(manifest, ctx.settings, output);
    err << name << ": " << DumpJson(manifest.counts) << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return Categorize(e, err);
  }
}

}  // namespace kgt::cli
