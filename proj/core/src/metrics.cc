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

#include "kgt/metrics.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "json_codec.h"
#include "kgt/text.h"

namespace kgt {
namespace {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

NgramCounts CountNgrams(const std::vector<std::string>& tokens, int n) {
  NgramCounts counts;
  const auto order = static_cast<std::size_t>(n);
  if (tokens.size() < order) return counts;
  for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t j = 1; j < order; ++j) {
      key.push_back('\x1f');
      key += tokens[i + j];
    }
    ++counts[key];
  }
  return counts;
}

std::size_t ClippedOverlap(const NgramCounts& candidate,
                           const NgramCounts& reference) {
  std::size_t overlap = 0;
  for (const auto& [gram, count] : candidate) {
    auto it = reference.find(gram);
    if (it != reference.end()) overlap += std::min(count, it->second);
  }
  return overlap;
}

double Harmonic(double p, double r) {
  return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

}  // namespace

std::vector<std::string> MetricTokens(std::string_view text) {
  return SplitWhitespace(FoldCase(text));
}

GraphScore TriplePrf(std::span<const Triple> predicted,
                     std::span<const Triple> gold) {
  std::unordered_set<std::string> pred_keys;
  for (const Triple& t : predicted) pred_keys.insert(TripleKey(t));
  std::unordered_set<std::string> gold_keys;
  for (const Triple& t : gold) gold_keys.insert(TripleKey(t));

  if (pred_keys.empty() && gold_keys.empty()) return {1.0, 1.0, 1.0};
  if (pred_keys.empty() || gold_keys.empty()) return {0.0, 0.0, 0.0};

  std::size_t overlap = 0;
  for (const auto& key : pred_keys) overlap += gold_keys.count(key);
  GraphScore score;
  score.precision = static_cast<double>(overlap) / pred_keys.size();
  score.recall = static_cast<double>(overlap) / gold_keys.size();
  score.f1 = Harmonic(score.precision, score.recall);
  return score;
}

GraphScore MacroAverage(std::span<const GraphScore> scores) {
  GraphScore mean;
  if (scores.empty()) return mean;
  for (const auto& s : scores) {
    mean.precision += s.precision;
    mean.recall += s.recall;
    mean.f1 += s.f1;
  }
  const double n = static_cast<double>(scores.size());
  mean.precision /= n;
  mean.recall /= n;
  mean.f1 /= n;
  return mean;
}

double CorpusBleu(std::span<const std::string> candidates,
                  std::span<const std::string> references, int max_order) {
  if (candidates.size() != references.size()) {
    throw std::invalid_argument("CorpusBleu: " +
                                std::to_string(candidates.size()) +
                                " candidates vs " +
                                std::to_string(references.size()) +
                                " references");
  }
  if (max_order < 1) throw std::invalid_argument("CorpusBleu: max_order < 1");

  std::vector<std::size_t> matches(max_order, 0);
  std::vector<std::size_t> totals(max_order, 0);
  std::size_t cand_len = 0;
  std::size_t ref_len = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto cand = MetricTokens(candidates[i]);
    const auto ref = MetricTokens(references[i]);
    cand_len += cand.size();
    ref_len += ref.size();
    for (int n = 1; n <= max_order; ++n) {
      const auto cand_counts = CountNgrams(cand, n);
      matches[n - 1] += ClippedOverlap(cand_counts, CountNgrams(ref, n));
      if (cand.size() >= static_cast<std::size_t>(n)) {
        totals[n - 1] += cand.size() - n + 1;
      }
    }
  }
  if (cand_len == 0) return 0.0;
  double log_sum = 0.0;
  for (int n = 0; n < max_order; ++n) {
    if (matches[n] == 0 || totals[n] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matches[n]) / totals[n]);
  }
  const double brevity =
      cand_len > ref_len
          ? 1.0
          : std::exp(1.0 - static_cast<double>(ref_len) / cand_len);
  return brevity * std::exp(log_sum / max_order);
}

RougeScore RougeN(std::string_view candidate, std::string_view reference,
                  int n) {
  if (n < 1) throw std::invalid_argument("RougeN: n < 1");
  const auto cand = CountNgrams(MetricTokens(candidate), n);
  const auto ref = CountNgrams(MetricTokens(reference), n);
  std::size_t cand_total = 0;
  for (const auto& [g, c] : cand) cand_total += c;
  std::size_t ref_total = 0;
  for (const auto& [g, c] : ref) ref_total += c;
  RougeScore score;
  if (cand_total == 0 || ref_total == 0) return score;
  const std::size_t overlap = ClippedOverlap(cand, ref);
  score.precision = static_cast<double>(overlap) / cand_total;
  score.recall = static_cast<double>(overlap) / ref_total;
  score.f1 = Harmonic(score.precision, score.recall);
  return score;
}

RougeScore CorpusRougeN(std::span<const std::string> candidates,
                        std::span<const std::string> references, int n) {
  if (candidates.size() != references.size()) {
    throw std::invalid_argument("CorpusRougeN: length mismatch");
  }
  RougeScore mean;
  if (candidates.empty()) return mean;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const RougeScore s = RougeN(candidates[i], references[i], n);
    mean.precision += s.precision;
    mean.recall += s.recall;
    mean.f1 += s.f1;
  }
  const double count = static_cast<double>(candidates.size());
  mean.precision /= count;
  mean.recall /= count;
  mean.f1 /= count;
  return mean;
}

std::vector<ReportRow> Aggregate(std::span<const ExampleMetrics> examples) {
  std::vector<ReportRow> rows;
  if (examples.empty()) return rows;
  const auto& names = examples.front().values;

  auto accumulate = [&](ReportRow* row, const ExampleMetrics& example) {
    if (example.values.size() != names.size()) {
      throw std::invalid_argument("Aggregate: inconsistent metric names");
    }
    for (std::size_t m = 0; m < names.size(); ++m) {
      if (example.values[m].first != names[m].first) {
        throw std::invalid_argument("Aggregate: inconsistent metric names");
      }
      row->values[m].second += example.values[m].second;
    }
    ++row->examples;
  };
  auto fresh_row = [&](std::string bucket) {
    ReportRow row;
    row.bucket = std::move(bucket);
    for (const auto& [name, value] : names) row.values.emplace_back(name, 0.0);
    return row;
  };

  std::map<std::size_t, ReportRow> buckets;
  ReportRow overall = fresh_row("all");
  for (const auto& example : examples) {
    auto it = buckets.find(example.gold_size);
    if (it == buckets.end()) {
      it = buckets
               .emplace(example.gold_size,
                        fresh_row(std::to_string(example.gold_size)))
               .first;
    }
    accumulate(&it->second, example);
    accumulate(&overall, example);
  }
  auto finish = [](ReportRow* row) {
    for (auto& [name, value] : row->values) value /= row->examples;
  };
  for (auto& [size, row] : buckets) {
    finish(&row);
    rows.push_back(std::move(row));
  }
  finish(&overall);
  rows.push_back(std::move(overall));
  return rows;
}

void WriteReportJsonl(std::span<const ReportRow> rows, std::ostream& out) {
  for (const auto& row : rows) {
    internal::Json obj = internal::Json::object();
    obj["bucket"] = row.bucket;
    obj["examples"] = row.examples;
    for (const auto& [name, value] : row.values) obj[name] = value;
    out << internal::Dump(obj) << '\n';
  }
}

std::string FormatReportTable(std::span<const ReportRow> rows) {
  std::ostringstream out;
  if (rows.empty()) return out.str();
  out << std::left << std::setw(8) << "bucket" << std::right << std::setw(10)
      << "examples";
  for (const auto& [name, value] : rows.front().values) {
    out << std::setw(std::max<int>(10, static_cast<int>(name.size()) + 2))
        << name;
  }
  out << '\n';
  out << std::fixed << std::setprecision(2);
  for (const auto& row : rows) {
    out << std::left << std::setw(8) << row.bucket << std::right
        << std::setw(10) << row.examples;
    for (const auto& [name, value] : row.values) {
      out << std::setw(std::max<int>(10, static_cast<int>(name.size()) + 2))
          << value * 100.0;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace kgt
