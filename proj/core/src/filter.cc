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

#include "kgt/filter.h"

#include <algorithm>
#include <stdexcept>

#include "kgt/text.h"

namespace kgt {

std::string PrependTitle(std::string_view title, std::string_view sentence) {
  if (StartsWith(sentence, title)) return std::string(sentence);
  std::string out(title);
  out += ". ";
  out += sentence;
  return out;
}

std::string RenderHypothesis(const Triple& triple) {
  std::string out = triple.subject + " " + triple.predicate + " " +
                    triple.object.surface;
  if (triple.qualifier) {
    out += " " + *triple.qualifier;
    out += " " + (triple.qvalue ? triple.qvalue->surface : std::string());
  }
  return NormalizeSpace(out);
}

ScoreRequest MakeScoreRequest(std::string id, const Sentence& sentence,
                              const Triple& triple) {
  return ScoreRequest{std::move(id),
                      PrependTitle(sentence.page_title, sentence.text),
                      RenderHypothesis(triple)};
}

Dataset EntailmentFilter(const Dataset& dataset, EntailmentScorer& scorer,
                         double tau, const ClientOptions& options,
                         EntailmentReport* report) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("tau must lie in [0, 1]");
  }
  std::vector<ScoreRequest> requests;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& example = dataset[i];
    for (std::size_t j = 0; j < example.matches.size(); ++j) {
      requests.push_back(MakeScoreRequest(
          std::to_string(i) + "." + std::to_string(j), example.sentence,
          example.matches[j].triple));
    }
  }
  const std::vector<double> scores = ScoreAll(scorer, requests, options);

  EntailmentReport local;
  local.scored = scores.size();
  Dataset out;
  std::size_t next = 0;
  for (const auto& example : dataset) {
    AlignedExample kept = example;
    kept.matches.clear();
    for (const auto& match : example.matches) {
      const double score = scores[next++];
      if (score >= tau) {
        TripleMatch scored = match;
        scored.entail_score = score;
        kept.matches.push_back(std::move(scored));
        ++local.kept;
      } else {
        ++local.removed;
        ++local.removed_by_predicate[match.triple.predicate];
      }
    }
    if (kept.matches.empty()) {
      ++local.examples_dropped;
    } else {
      out.push_back(std::move(kept));
    }
  }
  if (report != nullptr) *report = std::move(local);
  return out;
}

std::size_t NearestRank(std::vector<std::size_t> values, int percent) {
  if (values.empty()) throw std::invalid_argument("NearestRank: no values");
  if (percent <= 0 || percent > 100) {
    throw std::invalid_argument("NearestRank: percent outside (0, 100]");
  }
  const std::size_t n = values.size();
  const std::size_t rank =
      std::max<std::size_t>(1, (static_cast<std::size_t>(percent) * n + 99) / 100);
  std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
  return values[rank - 1];
}

LengthThresholdTable LengthThresholds(const Dataset& dataset,
                                      LengthPercentiles percentiles) {
  std::map<std::size_t, std::vector<std::size_t>> buckets;
  for (const auto& example : dataset) {
    buckets[example.matches.size()].push_back(WordCount(example.sentence.text));
  }
  LengthThresholdTable table;
  for (auto& [k, counts] : buckets) {
    const int percent =
        k == 1 ? percentiles.single_triple : percentiles.multi_triple;
    table.percentile[k] = percent;
    table.threshold[k] = NearestRank(std::move(counts), percent);
  }
  return table;
}

Dataset LengthFilter(const Dataset& dataset, const LengthThresholdTable& table,
                     LengthFilterReport* report) {
  LengthFilterReport local;
  Dataset out;
  for (const auto& example : dataset) {
    const std::size_t k = example.matches.size();
    auto it = table.threshold.find(k);
    if (it == table.threshold.end() ||
        WordCount(example.sentence.text) <= it->second) {
      ++local.kept_by_bucket[k];
      out.push_back(example);
    } else {
      ++local.removed_by_bucket[k];
    }
  }
  if (report != nullptr) *report = std::move(local);
  return out;
}

}  // namespace kgt
