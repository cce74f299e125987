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

// Pseudo-labeling loop for the entailment scorer. Each iteration samples
// unseen (sentence, triple) pairs, scores them, keeps confident positives
// and negatives under a per-predicate cap, adds one synthetic negative per
// positive, and asks the trainer for a new scorer version. The loop stops
// once F1 on an annotated set stops improving.

#ifndef KGT_SELFTRAIN_H_
#define KGT_SELFTRAIN_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "kgt/endpoints.h"
#include "kgt/gembed.h"
#include "kgt/kgtypes.h"
#include "kgt/random.h"

namespace kgt {

struct PoolItem {
  std::string id;
  Sentence sentence;
  Triple triple;
};

// One item per match; ids are "<example id>#<match index>".
std::vector<PoolItem> PoolFromDataset(const Dataset& dataset);

// Uniform sample of n items not in `used`, without replacement, in sampled
// order. Sampled ids are added to `used`. Throws std::out_of_range when
// fewer than n unused items remain.
std::vector<PoolItem> Subsample(std::span<const PoolItem> pool, std::size_t n,
                                std::uint64_t seed,
                                std::unordered_set<std::string>* used);

struct ScoredPair {
  PoolItem item;
  double score = 0.0;
};

std::vector<ScoredPair> ScorePairs(std::span<const PoolItem> sample,
                                   EntailmentScorer& scorer,
                                   const ClientOptions& options = {});

enum class Label { kPositive, kNegative };

enum class Origin {
  kThresholdPositive,
  kThresholdNegative,
  kEasyNegative,
  kHardNegative,
};

std::string_view LabelName(Label label);
std::string_view OriginName(Origin origin);

struct FinetuneExample {
  std::string premise;
  std::string hypothesis;
  Label label = Label::kPositive;
  Origin origin = Origin::kThresholdPositive;
  // The triple the hypothesis renders.
  Triple triple;
  // For synthetic negatives, the positive pair it was derived from.
  std::optional<Triple> source;
};

struct IterationConfig {
  std::size_t sample_size = 10000;
  double theta_pos = 0.9;
  double theta_neg = 0.1;
  // Per (predicate, class) limit.
  std::size_t cap = 10000;
  // Probability that a synthetic negative is easy rather than hard.
  double easy_hard_ratio = 0.5;
  int k_hard = 5;
  std::uint64_t seed = 0;
  std::size_t trainer_batch_size = 2048;
  // Decision threshold used on the annotated set.
  double tau = 0.5;
  // Consecutive non-improving iterations tolerated before stopping.
  int patience = 1;
  // Hard upper bound on iterations.
  int max_iterations = 20;
};

// Throws std::invalid_argument when an invariant is broken.
void ValidateConfig(const IterationConfig& config);

struct Selection {
  std::vector<ScoredPair> positives;
  std::vector<ScoredPair> negatives;
};

// Shuffles all candidates with `rng`, then keeps score >= theta_pos as
// positives and score <= theta_neg as negatives, at most `cap` per
// predicate and class.
Selection SelectAndBalance(std::span<const ScoredPair> scored,
                           const IterationConfig& config, Rng& rng);

FinetuneExample ThresholdExample(const ScoredPair& pair, Label label);

// Replaces the predicate with a uniformly drawn different one from
// `vocabulary`. Throws std::invalid_argument when no alternative exists.
FinetuneExample EasyNegative(const ScoredPair& pair,
                             std::span<const std::string> vocabulary,
                             Rng& rng);

// Replaces the predicate with one of its k nearest predicates, uniformly.
// Falls back to EasyNegative (and sets *fell_back) when the predicate has no
// neighbours in `table`.
FinetuneExample HardNegative(const ScoredPair& pair,
                             const EmbeddingTable& table, int k,
                             std::span<const std::string> vocabulary, Rng& rng,
                             bool* fell_back = nullptr);

struct FinetuneCounts {
  std::map<std::string, std::size_t> by_origin;
  // predicate -> count, per class.
  std::map<std::string, std::size_t> positives_by_predicate;
  std::map<std::string, std::size_t> negatives_by_predicate;
  std::size_t hard_fallbacks = 0;
  std::size_t capped_synthetic = 0;
};

// Threshold positives, threshold negatives, then one synthetic negative per
// positive (easy with probability easy_hard_ratio, hard otherwise, easy when
// `table` is null). Synthetic negatives count toward the negative cap of
// their replacement predicate and are skipped once it is full.
std::vector<FinetuneExample> BuildFinetuneSet(
    const Selection& selection, const IterationConfig& config,
    const EmbeddingTable* table, std::span<const std::string> vocabulary,
    Rng& rng, FinetuneCounts* counts = nullptr);

// {"premise","hypothesis","label":"positive"|"negative"} per line.
void WriteFinetuneSet(std::span<const FinetuneExample> examples,
                      std::ostream& out);

struct BinaryMetrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
};

BinaryMetrics ConfusionMetrics(std::size_t tp, std::size_t fp, std::size_t fn,
                               std::size_t tn);

// Predicts entailed iff score >= tau. Throws std::invalid_argument on an
// empty annotated set.
BinaryMetrics EvaluateScorer(EntailmentScorer& scorer,
                             std::span<const AnnotatedPair> annotated,
                             double tau, const ClientOptions& options = {});

struct IterationReport {
  int iteration = 0;
  std::size_t sampled = 0;
  FinetuneCounts counts;
  std::size_t finetune_examples = 0;
  std::string dataset_path;
  BinaryMetrics before;
  BinaryMetrics after;
  std::optional<std::string> model_version;
  bool improved = false;
};

struct SelfTrainResult {
  // Best-F1 version; nullopt when no iteration produced one.
  std::optional<std::string> best_version;
  double best_f1 = 0.0;
  BinaryMetrics baseline;
  std::vector<IterationReport> iterations;
  std::string stop_reason;
  // Set when the loop ended on a trainer or scorer failure.
  std::optional<std::string> error;
};

// Runs iterations until F1 fails to improve for `patience` consecutive
// iterations, the pool runs dry, or max_iterations is reached. The first
// iteration always becomes the best so far. Fine-tune sets are written to
// `workdir`/finetune-<i>.jsonl. The scorer is left pinned to the best
// version.
SelfTrainResult RunIterations(std::span<const PoolItem> pool,
                              EntailmentScorer& scorer, ScorerTrainer& trainer,
                              std::span<const AnnotatedPair> annotated,
                              const IterationConfig& config,
                              const EmbeddingTable* table,
                              const std::filesystem::path& workdir,
                              const ClientOptions& options = {});

}  // namespace kgt

#endif  // KGT_SELFTRAIN_H_
