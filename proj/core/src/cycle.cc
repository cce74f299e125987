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

#include "kgt/cycle.h"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_set>

#include "kgt/lineariz.h"
#include "kgt/random.h"
#include "kgt/text.h"

namespace kgt {
namespace {

std::vector<std::string> SortedUnique(std::vector<std::string> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

std::vector<std::string> GraphKeys(std::span<const Triple> graph) {
  std::vector<std::string> keys;
  keys.reserve(graph.size());
  for (const Triple& t : graph) keys.push_back(TripleKey(t));
  return SortedUnique(std::move(keys));
}

// |a ∩ b| / |a ∪ b| over sorted unique vectors; 0 when both are empty.
double Jaccard(const std::vector<std::string>& a,
               const std::vector<std::string>& b) {
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  const std::size_t total = a.size() + b.size() - common;
  return total == 0 ? 0.0 : static_cast<double>(common) / total;
}

std::size_t BestMatch(const std::vector<std::vector<std::string>>& candidates,
                      const std::vector<std::string>& query) {
  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double score = Jaccard(candidates[i], query);
    if (score > best_score) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

std::vector<std::string> GraphInputs(std::span<const std::vector<Triple>> graphs) {
  std::vector<std::string> inputs;
  inputs.reserve(graphs.size());
  for (const auto& g : graphs) {
    inputs.push_back(WithPrefix(Task::kGraphToText, SerializeGraph(g)));
  }
  return inputs;
}

std::vector<std::string> TextInputs(std::span<const std::string> texts) {
  std::vector<std::string> inputs;
  inputs.reserve(texts.size());
  for (const auto& t : texts) inputs.push_back(WithPrefix(Task::kTextToGraph, t));
  return inputs;
}

std::vector<std::vector<Triple>> ParseAll(std::span<const std::string> outputs,
                                          ParseCounts* counts) {
  std::vector<std::vector<Triple>> graphs;
  graphs.reserve(outputs.size());
  for (const auto& output : outputs) {
    ParsedGraph parsed = ParseGraph(output);
    if (parsed.diagnostics.malformed_segments > 0) {
      ++counts->failed_items;
      counts->malformed_segments += parsed.diagnostics.malformed_segments;
    }
    graphs.push_back(std::move(parsed.triples));
  }
  return graphs;
}

template <typename T>
std::vector<T> Pick(std::span<const T> items,
                    const std::vector<std::size_t>& indices) {
  std::vector<T> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(items[i]);
  return out;
}

ReportRow CycleRow(std::string bucket, const std::vector<std::size_t>& members,
                   std::span<const GraphScore> gtg,
                   std::span<const std::string> candidates,
                   std::span<const std::string> references) {
  ReportRow row;
  row.bucket = std::move(bucket);
  row.examples = members.size();
  const GraphScore macro = MacroAverage(Pick(gtg, members));
  const auto cand = Pick(candidates, members);
  const auto ref = Pick(references, members);
  const TextScores text = ScoreTexts(cand, ref);
  row.values = {{"gtg_p", macro.precision}, {"gtg_r", macro.recall},
                {"gtg_f1", macro.f1},       {"bleu1", text.bleu1},
                {"bleu4", text.bleu4},      {"rouge1", text.rouge1.f1},
                {"rouge4", text.rouge4.f1}};
  return row;
}

template <typename Gen>
std::vector<GenerateResponse> AnswerEach(const Gen& gen,
                                         std::span<const GenerateRequest> batch) {
  std::vector<GenerateResponse> out;
  out.reserve(batch.size());
  for (const auto& r : batch) out.push_back({r.id, gen.Generate(r.input)});
  return out;
}

}  // namespace

std::vector<GraphTextPair> PairsFromDataset(const Dataset& dataset) {
  std::vector<GraphTextPair> pairs;
  pairs.reserve(dataset.size());
  for (const auto& example : dataset) {
    GraphTextPair pair;
    pair.id = example.id;
    pair.text = example.sentence.text;
    for (const auto& m : example.matches) pair.graph.push_back(m.triple);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

GtgResult GtgEval(TextGenerator& g2t, TextGenerator& t2g,
                  std::span<const std::vector<Triple>> graphs,
                  const ClientOptions& options) {
  GtgResult result;
  const auto texts = GenerateTexts(g2t, GraphInputs(graphs), options);
  const auto outputs = GenerateTexts(t2g, TextInputs(texts), options);
  result.reconstructed = ParseAll(outputs, &result.parse);
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    result.scores.push_back(TriplePrf(result.reconstructed[i], graphs[i]));
  }
  result.macro = MacroAverage(result.scores);
  return result;
}

TextScores ScoreTexts(std::span<const std::string> candidates,
                      std::span<const std::string> references) {
  TextScores scores;
  scores.bleu1 = CorpusBleu(candidates, references, 1);
  scores.bleu4 = CorpusBleu(candidates, references, 4);
  scores.rouge1 = CorpusRougeN(candidates, references, 1);
  scores.rouge4 = CorpusRougeN(candidates, references, 4);
  return scores;
}

TgtResult TgtEval(TextGenerator& t2g, TextGenerator& g2t,
                  std::span<const std::string> texts,
                  const ClientOptions& options) {
  TgtResult result;
  const auto outputs = GenerateTexts(t2g, TextInputs(texts), options);
  const auto graphs = ParseAll(outputs, &result.parse);
  result.reconstructed = GenerateTexts(g2t, GraphInputs(graphs), options);
  result.scores = ScoreTexts(result.reconstructed, texts);
  return result;
}

CycleReport CycleEvaluate(TextGenerator& g2t, TextGenerator& t2g,
                          std::span<const GraphTextPair> pairs,
                          std::string dataset_name,
                          const ClientOptions& options) {
  std::vector<std::vector<Triple>> graphs;
  std::vector<std::string> texts;
  for (const auto& p : pairs) {
    graphs.push_back(p.graph);
    texts.push_back(p.text);
  }
  const GtgResult gtg = GtgEval(g2t, t2g, graphs, options);
  const TgtResult tgt = TgtEval(t2g, g2t, texts, options);

  CycleReport report;
  report.dataset = std::move(dataset_name);
  report.examples = pairs.size();
  report.gtg = gtg.macro;
  report.tgt = tgt.scores;
  report.gtg_parse = gtg.parse;
  report.tgt_parse = tgt.parse;
  if (pairs.empty()) return report;

  std::map<std::size_t, std::vector<std::size_t>> buckets;
  std::vector<std::size_t> all;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    buckets[GraphKeys(pairs[i].graph).size()].push_back(i);
    all.push_back(i);
    ExampleMetrics metrics;
    metrics.gold_size = GraphKeys(pairs[i].graph).size();
    metrics.values = {
        {"gtg_p", gtg.scores[i].precision},
        {"gtg_r", gtg.scores[i].recall},
        {"gtg_f1", gtg.scores[i].f1},
        {"rouge1", RougeN(tgt.reconstructed[i], texts[i], 1).f1},
        {"rouge4", RougeN(tgt.reconstructed[i], texts[i], 4).f1}};
    report.per_example.push_back(std::move(metrics));
  }
  for (const auto& [size, members] : buckets) {
    report.rows.push_back(CycleRow(std::to_string(size), members, gtg.scores,
                                   tgt.reconstructed, texts));
  }
  report.rows.push_back(
      CycleRow("all", all, gtg.scores, tgt.reconstructed, texts));
  return report;
}

UnidirectionalReport UnidirectionalEval(TextGenerator& g2t, TextGenerator& t2g,
                                        std::span<const GraphTextPair> pairs,
                                        const ClientOptions& options) {
  UnidirectionalReport report;
  report.examples = pairs.size();
  if (pairs.empty()) return report;
  std::vector<std::vector<Triple>> graphs;
  std::vector<std::string> texts;
  for (const auto& p : pairs) {
    graphs.push_back(p.graph);
    texts.push_back(p.text);
  }
  const auto generated = GenerateTexts(g2t, GraphInputs(graphs), options);
  report.forward = ScoreTexts(generated, texts);
  const auto outputs = GenerateTexts(t2g, TextInputs(texts), options);
  const auto parsed = ParseAll(outputs, &report.parse);
  std::vector<GraphScore> scores;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    scores.push_back(TriplePrf(parsed[i], graphs[i]));
  }
  report.reverse = MacroAverage(scores);
  return report;
}

Dataset InjectNoise(const Dataset& dataset, const NoiseOptions& options,
                    NoiseReport* report) {
  if (!(options.p >= 0.0 && options.p <= 1.0)) {
    throw std::invalid_argument("noise probability must lie in [0, 1]");
  }
  enum class Op { kDelete, kSubstitute, kInsert };
  std::vector<Op> ops;
  if (options.allow_delete) ops.push_back(Op::kDelete);
  if (options.allow_substitute) ops.push_back(Op::kSubstitute);
  if (options.allow_insert) ops.push_back(Op::kInsert);
  if (ops.empty()) throw std::invalid_argument("no noise operation enabled");

  std::vector<const TripleMatch*> triple_pool;
  for (const auto& example : dataset) {
    for (const auto& m : example.matches) triple_pool.push_back(&m);
  }

  NoiseReport local;
  Rng rng(options.seed);
  Dataset out;
  out.reserve(dataset.size());
  for (const auto& example : dataset) {
    AlignedExample noisy = example;
    noisy.matches.clear();
    const std::size_t n = example.matches.size();
    for (std::size_t j = 0; j < n; ++j) {
      const TripleMatch& match = example.matches[j];
      ++local.triples;
      if (!rng.Bernoulli(options.p)) {
        noisy.matches.push_back(match);
        continue;
      }
      ++local.selected;
      Op op = ops[rng.Uniform(ops.size())];
      if (op == Op::kDelete && noisy.matches.empty() && j + 1 == n) {
        op = Op::kSubstitute;
        ++local.floored;
      }
      switch (op) {
        case Op::kDelete:
          ++local.deleted;
          break;
        case Op::kSubstitute: {
          TripleMatch changed = match;
          changed.triple.object =
              triple_pool[rng.Uniform(triple_pool.size())]->triple.object;
          changed.entail_score.reset();
          noisy.matches.push_back(std::move(changed));
          ++local.substituted;
          break;
        }
        case Op::kInsert: {
          noisy.matches.push_back(match);
          TripleMatch added = *triple_pool[rng.Uniform(triple_pool.size())];
          added.entail_score.reset();
          noisy.matches.push_back(std::move(added));
          ++local.inserted;
          break;
        }
      }
    }
    out.push_back(std::move(noisy));
  }
  if (report != nullptr) *report = local;
  return out;
}

RetrievalG2T::RetrievalG2T(std::vector<GraphTextPair> training)
    : training_(std::move(training)) {
  if (training_.empty()) throw std::invalid_argument("no training pairs");
  for (const auto& p : training_) keys_.push_back(GraphKeys(p.graph));
}

std::string RetrievalG2T::Generate(std::string_view input) const {
  const ParsedGraph parsed =
      ParseGraph(StripPrefix(Task::kGraphToText, input));
  return training_[BestMatch(keys_, GraphKeys(parsed.triples))].text;
}

std::vector<GenerateResponse> RetrievalG2T::GenerateBatch(
    std::span<const GenerateRequest> batch) {
  return AnswerEach(*this, batch);
}

RetrievalT2G::RetrievalT2G(std::vector<GraphTextPair> training) {
  if (training.empty()) throw std::invalid_argument("no training pairs");
  for (const auto& p : training) {
    serialized_.push_back(SerializeGraph(p.graph));
    tokens_.push_back(SortedUnique(MetricTokens(p.text)));
  }
}

std::string RetrievalT2G::Generate(std::string_view input) const {
  const auto query =
      SortedUnique(MetricTokens(StripPrefix(Task::kTextToGraph, input)));
  return serialized_[BestMatch(tokens_, query)];
}

std::vector<GenerateResponse> RetrievalT2G::GenerateBatch(
    std::span<const GenerateRequest> batch) {
  return AnswerEach(*this, batch);
}

namespace {

std::string CanonicalGraph(std::string_view serialized) {
  return SerializeGraph(ParseGraph(serialized).triples);
}

}  // namespace

EchoG2T::EchoG2T(std::span<const GraphTextPair> pairs) {
  for (const auto& p : pairs) {
    table_.emplace(CanonicalGraph(SerializeGraph(p.graph)), p.text);
  }
}

std::string EchoG2T::Generate(std::string_view input) const {
  auto it = table_.find(CanonicalGraph(StripPrefix(Task::kGraphToText, input)));
  return it == table_.end() ? std::string() : it->second;
}

std::vector<GenerateResponse> EchoG2T::GenerateBatch(
    std::span<const GenerateRequest> batch) {
  return AnswerEach(*this, batch);
}

EchoT2G::EchoT2G(std::span<const GraphTextPair> pairs) {
  for (const auto& p : pairs) {
    table_.emplace(NormalizeSpace(p.text), SerializeGraph(p.graph));
  }
}

std::string EchoT2G::Generate(std::string_view input) const {
  auto it = table_.find(NormalizeSpace(StripPrefix(Task::kTextToGraph, input)));
  return it == table_.end() ? std::string() : it->second;
}

std::vector<GenerateResponse> EchoT2G::GenerateBatch(
    std::span<const GenerateRequest> batch) {
  return AnswerEach(*this, batch);
}

Dataset AugmentTriples(const Dataset& dataset, TextGenerator& t2g,
                       const ClientOptions& options, AugmentReport* report) {
  std::vector<std::string> texts;
  texts.reserve(dataset.size());
  for (const auto& example : dataset) texts.push_back(example.sentence.text);
  const auto outputs = GenerateTexts(t2g, TextInputs(texts), options);

  AugmentReport local;
  local.examples = dataset.size();
  Dataset out = dataset;
  for (std::size_t i = 0; i < out.size(); ++i) {
    ParsedGraph parsed = ParseGraph(outputs[i]);
    if (parsed.diagnostics.malformed_segments > 0) {
      ++local.parse_failures;
      continue;
    }
    std::unordered_set<std::string> present;
    for (const auto& m : out[i].matches) present.insert(TripleKey(m.triple));
    for (auto& triple : parsed.triples) {
      if (!present.insert(TripleKey(triple)).second) continue;
      out[i].matches.push_back({std::move(triple), Hop::kAugmented, {}});
      ++local.added;
    }
  }
  if (report != nullptr) *report = local;
  return out;
}

}  // namespace kgt
