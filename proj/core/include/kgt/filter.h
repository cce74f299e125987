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

// Dataset filters: entailment scoring of every match against its
// title-prepended sentence, and per-bucket sentence length thresholds.

#ifndef KGT_FILTER_H_
#define KGT_FILTER_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgt/endpoints.h"
#include "kgt/kgtypes.h"

namespace kgt {

// title + ". " + sentence, or `sentence` unchanged when it already starts
// with `title`.
std::string PrependTitle(std::string_view title, std::string_view sentence);

// "s p o" (plus " q t" for compound triples), whitespace-normalized.
std::string RenderHypothesis(const Triple& triple);

// Request for one (example, match) pair.
ScoreRequest MakeScoreRequest(std::string id, const Sentence& sentence,
                              const Triple& triple);

struct EntailmentReport {
  std::size_t scored = 0;
  std::size_t kept = 0;
  std::size_t removed = 0;
  std::size_t examples_dropped = 0;
  std::map<std::string, std::size_t> removed_by_predicate;
};

// Scores every match, keeps those with score >= tau (scores attached) and
// drops examples left without matches. Throws std::invalid_argument when tau
// is outside [0, 1], EndpointError when a batch keeps failing.
Dataset EntailmentFilter(const Dataset& dataset, EntailmentScorer& scorer,
                         double tau = 0.5, const ClientOptions& options = {},
                         EntailmentReport* report = nullptr);

// ceil(percent * n / 100)-th smallest value (1-based, at least the first).
// Throws std::invalid_argument on empty input or percent outside (0, 100].
std::size_t NearestRank(std::vector<std::size_t> values, int percent);

struct LengthThresholdTable {
  // Triple count k -> maximum word count L_k.
  std::map<std::size_t, std::size_t> threshold;
  // Triple count k -> percentile used for that bucket.
  std::map<std::size_t, int> percentile;
};

struct LengthPercentiles {
  int single_triple = 30;
  int multi_triple = 90;
};

// Buckets examples by match count and takes the nearest-rank percentile of
// each bucket's whitespace word counts.
LengthThresholdTable LengthThresholds(const Dataset& dataset,
                                      LengthPercentiles percentiles = {});

struct LengthFilterReport {
  std::map<std::size_t, std::size_t> kept_by_bucket;
  std::map<std::size_t, std::size_t> removed_by_bucket;
};

// Keeps an example with k matches and w words iff w <= L_k. Buckets absent
// from the table pass through.
Dataset LengthFilter(const Dataset& dataset, const LengthThresholdTable& table,
                     LengthFilterReport* report = nullptr);

}  // namespace kgt

#endif  // KGT_FILTER_H_
