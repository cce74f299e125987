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

#include "kgt/selftrain.h"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "json_codec.h"
#include "kgt/error.h"
#include "kgt/filter.h"

namespace kgt {
namespace {

FinetuneExample Synthetic(const ScoredPair& pair, std::string predicate,
                          Origin origin) {
  FinetuneExample example;
  example.triple = pair.item.triple;
  example.triple.predicate = std::move(predicate);
  example.premise = PrependTitle(pair.item.sentence.page_title,
                                 pair.item.sentence.text);
  example.hypothesis = RenderHypothesis(example.triple);
  example.label = Label::kNegative;
  example.origin = origin;
  example.source = pair.item.triple;
  return example;
}

}  // namespace

std::vector<PoolItem> PoolFromDataset(const Dataset& dataset) {
  std::vector<PoolItem> pool;
  for (const auto& example : dataset) {
    for (std::size_t j = 0; j < example.matches.size(); ++j) {
      pool.push_back({example.id + "#" + std::to_string(j), example.sentence,
                      example.matches[j].triple});
    }
  }
  return pool;
}

std::vector<PoolItem> Subsample(std::span<const PoolItem> pool, std::size_t n,
                                std::uint64_t seed,
                                std::unordered_set<std::string>* used) {
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (used == nullptr || !used->contains(pool[i].id)) candidates.push_back(i);
  }
  if (n > candidates.size()) {
    throw std::out_of_range("pool exhausted: " + std::to_string(n) +
                            " requested, " + std::to_string(candidates.size()) +
                            " unused items left");
  }
  Rng rng(seed);
  std::vector<PoolItem> sample;
  sample.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.Uniform(candidates.size() - i);
    std::swap(candidates[i], candidates[j]);
    sample.push_back(pool[candidates[i]]);
    if (used != nullptr) used->insert(pool[candidates[i]].id);
  }
  return sample;
}

std::vector<ScoredPair> ScorePairs(std::span<const PoolItem> sample,
                                   EntailmentScorer& scorer,
                                   const ClientOptions& options) {
  std::vector<ScoreRequest> requests;
  requests.reserve(sample.size());
  for (const auto& item : sample) {
    requests.push_back(MakeScoreRequest(item.id, item.sentence, item.triple));
  }
  const std::vector<double> scores = ScoreAll(scorer, requests, options);
  std::vector<ScoredPair> out;
  out.reserve(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    out.push_back({sample[i], scores[i]});
  }
  return out;
}

std::string_view LabelName(Label label) {
  return label == Label::kPositive ? "positive" : "negative";
}

std::string_view OriginName(Origin origin) {
  switch (origin) {
    case Origin::kThresholdPositive:
      return "threshold-positive";
    case Origin::kThresholdNegative:
      return "threshold-negative";
    case Origin::kEasyNegative:
      return "easy-negative";
    case Origin::kHardNegative:
      return "hard-negative";
  }
  return "unknown";
}

void ValidateConfig(const IterationConfig& config) {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(config.theta_pos) || !unit(config.theta_neg) ||
      !(config.theta_neg < config.theta_pos)) {
    throw std::invalid_argument("need 0 <= theta_neg < theta_pos <= 1");
  }
  if (config.cap < 1) throw std::invalid_argument("cap must be >= 1");
  if (!unit(config.easy_hard_ratio)) {
    throw std::invalid_argument("easy_hard_ratio must lie in [0, 1]");
  }
  if (config.k_hard < 1) throw std::invalid_argument("k_hard must be >= 1");
  if (config.sample_size < 1) {
    throw std::invalid_argument("sample_size must be >= 1");
  }
  if (config.trainer_batch_size < 1) {
    throw std::invalid_argument("trainer_batch_size must be >= 1");
  }
  if (!unit(config.tau)) throw std::invalid_argument("tau must lie in [0, 1]");
  if (config.patience < 1) throw std::invalid_argument("patience must be >= 1");
  if (config.max_iterations < 1) {
    throw std::invalid_argument("max_iterations must be >= 1");
  }
}

Selection SelectAndBalance(std::span<const ScoredPair> scored,
                           const IterationConfig& config, Rng& rng) {
  std::vector<ScoredPair> shuffled(scored.begin(), scored.end());
  rng.Shuffle(std::span<ScoredPair>(shuffled));
  std::map<std::string, std::size_t> positives;
  std::map<std::string, std::size_t> negatives;
  Selection selection;
  for (auto& pair : shuffled) {
    const std::string& predicate = pair.item.triple.predicate;
    if (pair.score >= config.theta_pos) {
      if (positives[predicate]++ < config.cap) {
        selection.positives.push_back(std::move(pair));
      }
    } else if (pair.score <= config.theta_neg) {
      if (negatives[predicate]++ < config.cap) {
        selection.negatives.push_back(std::move(pair));
      }
    }
  }
  return selection;
}

FinetuneExample ThresholdExample(const ScoredPair& pair, Label label) {
  FinetuneExample example;
  example.triple = pair.item.triple;
  example.premise = PrependTitle(pair.item.sentence.page_title,
                                 pair.item.sentence.text);
  example.hypothesis = RenderHypothesis(example.triple);
  example.label = label;
  example.origin = label == Label::kPositive ? Origin::kThresholdPositive
                                             : Origin::kThresholdNegative;
  return example;
}

FinetuneExample EasyNegative(const ScoredPair& pair,
                             std::span<const std::string> vocabulary,
                             Rng& rng) {
  std::vector<std::string_view> alternatives;
  for (const auto& p : vocabulary) {
    if (p != pair.item.triple.predicate) alternatives.push_back(p);
  }
  if (alternatives.empty()) {
    throw std::invalid_argument(
        "easy negative needs a predicate vocabulary with an alternative to \"" +
        pair.item.triple.predicate + "\"");
  }
  return Synthetic(pair,
                   std::string(alternatives[rng.Uniform(alternatives.size())]),
                   Origin::kEasyNegative);
}

FinetuneExample HardNegative(const ScoredPair& pair,
                             const EmbeddingTable& table, int k,
                             std::span<const std::string> vocabulary, Rng& rng,
                             bool* fell_back) {
  if (fell_back != nullptr) *fell_back = false;
  if (table.predicates.contains(pair.item.triple.predicate)) {
    const auto neighbours =
        NearestPredicates(table, pair.item.triple.predicate, k);
    if (!neighbours.empty()) {
      return Synthetic(pair, neighbours[rng.Uniform(neighbours.size())].first,
                       Origin::kHardNegative);
    }
  }
  if (fell_back != nullptr) *fell_back = true;
  return EasyNegative(pair, vocabulary, rng);
}

std::vector<FinetuneExample> BuildFinetuneSet(
    const Selection& selection, const IterationConfig& config,
    const EmbeddingTable* table, std::span<const std::string> vocabulary,
    Rng& rng, FinetuneCounts* counts) {
  FinetuneCounts local;
  std::vector<FinetuneExample> out;
  auto emit = [&](FinetuneExample example) {
    ++local.by_origin[std::string(OriginName(example.origin))];
    auto& per_class = example.label == Label::kPositive
                          ? local.positives_by_predicate
                          : local.negatives_by_predicate;
    ++per_class[example.triple.predicate];
    out.push_back(std::move(example));
  };
  for (const auto& pair : selection.positives) {
    emit(ThresholdExample(pair, Label::kPositive));
  }
  for (const auto& pair : selection.negatives) {
    emit(ThresholdExample(pair, Label::kNegative));
  }
  for (const auto& pair : selection.positives) {
    const bool easy = rng.Bernoulli(config.easy_hard_ratio) || table == nullptr;
    FinetuneExample negative;
    if (easy) {
      negative = EasyNegative(pair, vocabulary, rng);
    } else {
      bool fell_back = false;
      negative = HardNegative(pair, *table, config.k_hard, vocabulary, rng,
                              &fell_back);
      if (fell_back) ++local.hard_fallbacks;
    }
    if (local.negatives_by_predicate[negative.triple.predicate] >= config.cap) {
      ++local.capped_synthetic;
      continue;
    }
    emit(std::move(negative));
  }
  if (counts != nullptr) *counts = std::move(local);
  return out;
}

void WriteFinetuneSet(std::span<const FinetuneExample> examples,
                      std::ostream& out) {
  for (const auto& example : examples) {
    out << internal::Dump(internal::Json{
               {"premise", example.premise},
               {"hypothesis", example.hypothesis},
               {"label", std::string(LabelName(example.label))}})
        << '\n';
  }
}

BinaryMetrics ConfusionMetrics(std::size_t tp, std::size_t fp, std::size_t fn,
                               std::size_t tn) {
  BinaryMetrics m{tp, fp, fn, tn};
  const double dtp = static_cast<double>(tp);
  m.precision = tp + fp > 0 ? dtp / static_cast<double>(tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? dtp / static_cast<double>(tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  const std::size_t total = tp + fp + fn + tn;
  m.accuracy = total > 0 ? static_cast<double>(tp + tn) / total : 0.0;
  return m;
}

BinaryMetrics EvaluateScorer(EntailmentScorer& scorer,
                             std::span<const AnnotatedPair> annotated,
                             double tau, const ClientOptions& options) {
  if (annotated.empty()) throw std::invalid_argument("empty annotated set");
  std::vector<ScoreRequest> requests;
  requests.reserve(annotated.size());
  for (std::size_t i = 0; i < annotated.size(); ++i) {
    requests.push_back({"a" + std::to_string(i),
                        PrependTitle(annotated[i].title, annotated[i].text),
                        RenderHypothesis(annotated[i].triple)});
  }
  const std::vector<double> scores = ScoreAll(scorer, requests, options);
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < annotated.size(); ++i) {
    const bool predicted = scores[i] >= tau;
    const bool actual = annotated[i].entailed;
    tp += predicted && actual;
    fp += predicted && !actual;
    fn += !predicted && actual;
    tn += !predicted && !actual;
  }
  return ConfusionMetrics(tp, fp, fn, tn);
}

SelfTrainResult RunIterations(std::span<const PoolItem> pool,
                              EntailmentScorer& scorer, ScorerTrainer& trainer,
                              std::span<const AnnotatedPair> annotated,
                              const IterationConfig& config,
                              const EmbeddingTable* table,
                              const std::filesystem::path& workdir,
                              const ClientOptions& options) {
  ValidateConfig(config);
  std::set<std::string> vocab_set;
  for (const auto& item : pool) vocab_set.insert(item.triple.predicate);
  const std::vector<std::string> vocabulary(vocab_set.begin(), vocab_set.end());
  std::filesystem::create_directories(workdir);

  SelfTrainResult result;
  const std::optional<std::string> initial = scorer.model_version();
  result.baseline = EvaluateScorer(scorer, annotated, config.tau, options);
  BinaryMetrics previous = result.baseline;
  std::unordered_set<std::string> used;
  int stale = 0;
  result.stop_reason = "reached max_iterations";

  for (int it = 1; it <= config.max_iterations; ++it) {
    const std::size_t remaining = pool.size() - used.size();
    if (remaining == 0) {
      result.stop_reason = "pool exhausted";
      break;
    }
    IterationReport report;
    report.iteration = it;
    report.before = previous;
    const auto sample =
        Subsample(pool, std::min(config.sample_size, remaining),
                  DeriveSeed(config.seed, 2 * it), &used);
    report.sampled = sample.size();

    std::vector<FinetuneExample> examples;
    try {
      const auto scored = ScorePairs(sample, scorer, options);
      Rng rng(DeriveSeed(config.seed, 2 * it + 1));
      const Selection selection = SelectAndBalance(scored, config, rng);
      examples = BuildFinetuneSet(selection, config, table, vocabulary, rng,
                                  &report.counts);
    } catch (const EndpointError& e) {
      result.error = e.what();
      result.stop_reason = "scorer failure";
      break;
    }
    report.finetune_examples = examples.size();
    if (examples.empty()) {
      result.stop_reason = "no confident pairs to fine-tune on";
      result.iterations.push_back(std::move(report));
      break;
    }
    const auto path = workdir / ("finetune-" + std::to_string(it) + ".jsonl");
    {
      std::ofstream out(path, std::ios::binary);
      if (!out) throw UsageError("cannot write " + path.string());
      WriteFinetuneSet(examples, out);
    }
    report.dataset_path = path.string();

    try {
      const std::string version = trainer.Finetune(
          {path.string(), config.trainer_batch_size, /*head_only=*/true});
      report.model_version = version;
      scorer.PinModelVersion(version);
      report.after = EvaluateScorer(scorer, annotated, config.tau, options);
    } catch (const EndpointError& e) {
      result.error = e.what();
      result.stop_reason = "trainer failure";
      result.iterations.push_back(std::move(report));
      break;
    }

    report.improved =
        !result.best_version || report.after.f1 > result.best_f1;
    if (report.improved) {
      result.best_version = report.model_version;
      result.best_f1 = report.after.f1;
      stale = 0;
    } else {
      ++stale;
    }
    previous = report.after;
    result.iterations.push_back(std::move(report));
    if (stale >= config.patience) {
      result.stop_reason = "no F1 improvement for " +
                           std::to_string(config.patience) + " iteration(s)";
      break;
    }
  }
  scorer.PinModelVersion(result.best_version ? result.best_version : initial);
  return result;
}

}  // namespace kgt
