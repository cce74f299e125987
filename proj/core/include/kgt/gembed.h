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

// TransE embeddings of KG entities and predicates, used to find predicates
// similar to a given one.
//
// Score of a triple: d(h + r, t) with d the L1 or (non-squared) L2 norm.
// Loss per (positive, corrupted) pair: max(0, margin + d_pos - d_neg).

#ifndef KGT_GEMBED_H_
#define KGT_GEMBED_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kgt/kgtypes.h"

namespace kgt {

struct TransEConfig {
  int dim = 50;
  double margin = 1.0;
  double learning_rate = 0.01;
  int epochs = 100;
  int negatives = 1;
  // Distance norm, 1 or 2.
  int norm = 2;
  std::uint64_t seed = 0;

  friend bool operator==(const TransEConfig&, const TransEConfig&) = default;
};

// Throws std::invalid_argument when a field is out of range.
void ValidateConfig(const TransEConfig& config);

using Vector = std::vector<double>;

struct EmbeddingTable {
  TransEConfig config;
  // Keyed by entity id, or "literal:<surface>" for literal objects and
  // subjects without an id.
  std::map<std::string, Vector> entities;
  // Keyed by predicate label.
  std::map<std::string, Vector> predicates;

  int dim() const { return config.dim; }

  friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) =
      default;
};

std::string SubjectKey(const Triple& triple);
std::string ObjectKey(const Triple& triple);

struct TransEResult {
  EmbeddingTable table;
  // Mean hinge loss over all (positive, corrupted) pairs of each epoch.
  std::vector<double> epoch_loss;
};

// Trains on the bare (3-slot) triples only. Deterministic for a fixed
// config. Throws SchemaError when no bare triple is given.
TransEResult TrainTransE(std::span<const Triple> triples,
                         const TransEConfig& config);

// One (positive, corrupted) pair sharing the relation vector.
struct MarginPair {
  Vector head;
  Vector relation;
  Vector tail;
  Vector corrupt_head;
  Vector corrupt_tail;
};

double Distance(const Vector& head, const Vector& relation,
                const Vector& tail, int norm);
double MarginLoss(const MarginPair& pair, double margin, int norm);
// Subgradient of MarginLoss with respect to each slot; zero when the hinge
// is inactive. At a zero L2 distance the subgradient 0 is used.
MarginPair MarginLossGradient(const MarginPair& pair, double margin, int norm);

double CosineSimilarity(const Vector& a, const Vector& b);

// Top-k predicates other than `predicate` by cosine similarity, descending,
// ties broken by label. Throws std::invalid_argument for an unknown
// predicate or k < 1.
std::vector<std::pair<std::string, double>> NearestPredicates(
    const EmbeddingTable& table, const std::string& predicate, int k);

// JSONL: a header {"dim","entities","predicates","seed","config"} followed by
// {"kind":"entity"|"predicate","key","vec"} records. Round-trips exactly.
void WriteEmbeddings(const EmbeddingTable& table, std::ostream& out);
void SaveEmbeddings(const EmbeddingTable& table,
                    const std::filesystem::path& path);
EmbeddingTable ReadEmbeddings(std::istream& in, std::string_view source);
EmbeddingTable LoadEmbeddings(const std::filesystem::path& path);

}  // namespace kgt

#endif  // KGT_GEMBED_H_
