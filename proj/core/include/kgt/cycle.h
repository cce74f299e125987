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

// Cyclic evaluation of a graph-text dataset through external generators:
//
//   GTG: G -> g2t -> text -> t2g -> G'   scored by triple P/R/F1 against G
//   TGT: T -> t2g -> graph -> g2t -> T'  scored by BLEU/ROUGE against T
//
// plus unidirectional evaluation, noise injection, retrieval-based mock
// generators and one-pass triple augmentation.

#ifndef KGT_CYCLE_H_
#define KGT_CYCLE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgt/endpoints.h"
#include "kgt/kgtypes.h"
#include "kgt/metrics.h"

namespace kgt {

struct GraphTextPair {
  std::string id;
  std::vector<Triple> graph;
  std::string text;
};

std::vector<GraphTextPair> PairsFromDataset(const Dataset& dataset);

struct ParseCounts {
  // Model outputs with at least one malformed segment.
  std::size_t failed_items = 0;
  std::size_t malformed_segments = 0;
};

struct GtgResult {
  std::vector<std::vector<Triple>> reconstructed;
  std::vector<GraphScore> scores;
  GraphScore macro;
  ParseCounts parse;
};

// Malformed output segments are skipped; an item whose output does not
// parse at all is scored against an empty graph.
GtgResult GtgEval(TextGenerator& g2t, TextGenerator& t2g,
                  std::span<const std::vector<Triple>> graphs,
                  const ClientOptions& options = {});

struct TextScores {
  double bleu1 = 0.0;
  double bleu4 = 0.0;
  RougeScore rouge1;
  RougeScore rouge4;
};

TextScores ScoreTexts(std::span<const std::string> candidates,
                      std::span<const std::string> references);

struct TgtResult {
  std::vector<std::string> reconstructed;
  TextScores scores;
  ParseCounts parse;
};

// Accepts any text list, so models trained on one corpus can be evaluated
// on another.
TgtResult TgtEval(TextGenerator& t2g, TextGenerator& g2t,
                  std::span<const std::string> texts,
                  const ClientOptions& options = {});

struct CycleReport {
  std::string dataset;
  std::size_t examples = 0;
  GraphScore gtg;
  TextScores tgt;
  ParseCounts gtg_parse;
  ParseCounts tgt_parse;
  // One row per gold triple count plus "all". Metrics: gtg_p, gtg_r, gtg_f1,
  // bleu1, bleu4, rouge1, rouge4 (ROUGE as F1; BLEU per bucket corpus).
  std::vector<ReportRow> rows;
  // Per-example values, usable with Aggregate().
  std::vector<ExampleMetrics> per_example;
};

CycleReport CycleEvaluate(TextGenerator& g2t, TextGenerator& t2g,
                          std::span<const GraphTextPair> pairs,
                          std::string dataset_name,
                          const ClientOptions& options = {});

struct UnidirectionalReport {
  std::size_t examples = 0;
  // g2t output against the gold text.
  TextScores forward;
  // Parsed t2g output against the gold graph.
  GraphScore reverse;
  ParseCounts parse;
};

UnidirectionalReport UnidirectionalEval(TextGenerator& g2t, TextGenerator& t2g,
                                        std::span<const GraphTextPair> pairs,
                                        const ClientOptions& options = {});

struct NoiseOptions {
  double p = 0.0;
  std::uint64_t seed = 0;
  bool allow_delete = true;
  bool allow_substitute = true;
  bool allow_insert = true;
};

struct NoiseReport {
  std::size_t triples = 0;
  std::size_t selected = 0;
  std::size_t deleted = 0;
  std::size_t substituted = 0;
  std::size_t inserted = 0;
  // Deletions turned into substitutions to keep an example non-empty; also
  // counted in `substituted`.
  std::size_t floored = 0;
};

// Selects each triple independently with probability p and applies one
// enabled operation chosen uniformly: delete it, replace its object with a
// random object from the dataset, or keep it and add a random triple from
// the dataset. Examples never become empty. Modified and inserted matches
// lose their entailment score. Throws std::invalid_argument when p is
// outside [0, 1] or every operation is disabled.
Dataset InjectNoise(const Dataset& dataset, const NoiseOptions& options,
                    NoiseReport* report = nullptr);

// Returns the text of the training pair whose normalized triple set has the
// highest Jaccard similarity with the input graph (lowest index on ties).
// Input may carry the graph_to_text prefix.
class RetrievalG2T : public TextGenerator {
 public:
  // Throws std::invalid_argument when `training` is empty.
  explicit RetrievalG2T(std::vector<GraphTextPair> training);
  std::string Generate(std::string_view input) const;
  std::vector<GenerateResponse> GenerateBatch(
      std::span<const GenerateRequest> batch) override;

 private:
  std::vector<GraphTextPair> training_;
  std::vector<std::vector<std::string>> keys_;
};

// Returns the serialized graph of the training pair whose token set has the
// highest Jaccard similarity with the input text (lowest index on ties).
class RetrievalT2G : public TextGenerator {
 public:
  explicit RetrievalT2G(std::vector<GraphTextPair> training);
  std::string Generate(std::string_view input) const;
  std::vector<GenerateResponse> GenerateBatch(
      std::span<const GenerateRequest> batch) override;

 private:
  std::vector<std::string> serialized_;
  std::vector<std::vector<std::string>> tokens_;
};

// Echo oracles: g2t answers a graph with the text it is paired with, t2g
// answers a text with its paired serialized graph. Graphs are compared after
// a parse/serialize round trip and texts after whitespace normalization; the
// first pair wins on duplicates and unknown inputs yield "".
class EchoG2T : public TextGenerator {
 public:
  explicit EchoG2T(std::span<const GraphTextPair> pairs);
  std::string Generate(std::string_view input) const;
  std::vector<GenerateResponse> GenerateBatch(
      std::span<const GenerateRequest> batch) override;

 private:
  std::unordered_map<std::string, std::string> table_;
};

class EchoT2G : public TextGenerator {
 public:
  explicit EchoT2G(std::span<const GraphTextPair> pairs);
  std::string Generate(std::string_view input) const;
  std::vector<GenerateResponse> GenerateBatch(
      std::span<const GenerateRequest> batch) override;

 private:
  std::unordered_map<std::string, std::string> table_;
};

struct AugmentReport {
  std::size_t examples = 0;
  std::size_t added = 0;
  std::size_t parse_failures = 0;
};

// One pass: appends t2g triples not already present (by TripleKey) with
// hop=augmented. Examples whose output has a malformed segment stay as is.
Dataset AugmentTriples(const Dataset& dataset, TextGenerator& t2g,
                       const ClientOptions& options = {},
                       AugmentReport* report = nullptr);

}  // namespace kgt

#endif  // KGT_CYCLE_H_
