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

// Deterministic evaluation metrics. Text is case-folded and split on
// whitespace; there is no stemming and no smoothing.

#ifndef KGT_METRICS_H_
#define KGT_METRICS_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgt/kgtypes.h"

namespace kgt {

std::vector<std::string> MetricTokens(std::string_view text);

struct GraphScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Set-based triple overlap under TripleKey normalization. Both graphs empty
// scores 1/1/1; exactly one empty scores 0/0/0.
GraphScore TriplePrf(std::span<const Triple> predicted,
                     std::span<const Triple> gold);

// Mean of per-example scores.
GraphScore MacroAverage(std::span<const GraphScore> scores);

// Corpus BLEU with pooled clipped n-gram counts for n = 1..max_order, equal
// weights, and brevity penalty min(1, exp(1 - r/c)). Any zero pooled
// precision gives 0. Throws std::invalid_argument on a length mismatch or
// max_order < 1.
double CorpusBleu(std::span<const std::string> candidates,
                  std::span<const std::string> references, int max_order);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Sentence-level ROUGE-N with clipped counts. A side with fewer than n
// tokens has no n-grams and scores all zeros.
RougeScore RougeN(std::string_view candidate, std::string_view reference,
                  int n);

// Mean of RougeN over aligned pairs.
RougeScore CorpusRougeN(std::span<const std::string> candidates,
                        std::span<const std::string> references, int n);

// Per-example metric values plus the bucket key (gold triple count).
struct ExampleMetrics {
  std::size_t gold_size = 0;
  std::vector<std::pair<std::string, double>> values;
};

struct ReportRow {
  // Triple count as decimal, or "all" for the overall row.
  std::string bucket;
  std::size_t examples = 0;
  std::vector<std::pair<std::string, double>> values;
};

// Macro means per bucket (ascending triple count) followed by the overall
// row. Metric names come from the first example; every example must carry
// the same names in the same order. Empty input gives an empty report.
std::vector<ReportRow> Aggregate(std::span<const ExampleMetrics> examples);

// One JSON object per row: {"bucket":..,"examples":..,<metric>:..}.
void WriteReportJsonl(std::span<const ReportRow> rows, std::ostream& out);

// Fixed-width text table, values scaled to percentages with two decimals.
std::string FormatReportTable(std::span<const ReportRow> rows);

}  // namespace kgt

#endif  // KGT_METRICS_H_
