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

#include "kgt/gembed.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "json_codec.h"
#include "kgt/error.h"
#include "kgt/random.h"

namespace kgt {
namespace {

using internal::Json;

// d(h + r, t) gradient with respect to x = h + r - t.
Vector DistanceGradient(const Vector& head, const Vector& relation,
                        const Vector& tail, int norm) {
  const std::size_t n = head.size();
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = head[i] + relation[i] - tail[i];
  if (norm == 1) {
    for (double& v : x) v = (v > 0.0) - (v < 0.0);
    return x;
  }
  double length = 0.0;
  for (double v : x) length += v * v;
  length = std::sqrt(length);
  if (length == 0.0) return Vector(n, 0.0);
  for (double& v : x) v /= length;
  return x;
}

void Normalize(Vector* v) {
  double length = 0.0;
  for (double x : *v) length += x * x;
  length = std::sqrt(length);
  if (length == 0.0) return;
  for (double& x : *v) x /= length;
}

void Axpy(double a, const Vector& x, Vector* y) {
  for (std::size_t i = 0; i < x.size(); ++i) (*y)[i] += a * x[i];
}

Json ConfigToJson(const TransEConfig& c) {
  return Json{{"dim", c.dim},           {"margin", c.margin},
              {"learning_rate", c.learning_rate}, {"epochs", c.epochs},
              {"negatives", c.negatives}, {"norm", c.norm},
              {"seed", c.seed}};
}

TransEConfig ConfigFromJson(const Json& obj) {
  TransEConfig c;
  c.dim = internal::Require(obj, "dim").get<int>();
  c.margin = internal::Require(obj, "margin").get<double>();
  c.learning_rate = internal::Require(obj, "learning_rate").get<double>();
  c.epochs = internal::Require(obj, "epochs").get<int>();
  c.negatives = internal::Require(obj, "negatives").get<int>();
  c.norm = internal::Require(obj, "norm").get<int>();
  c.seed = internal::Require(obj, "seed").get<std::uint64_t>();
  return c;
}

}  // namespace

void ValidateConfig(const TransEConfig& config) {
  if (config.dim < 1) throw std::invalid_argument("dim must be positive");
  if (!(config.margin > 0.0)) {
    throw std::invalid_argument("margin must be positive");
  }
  if (!(config.learning_rate > 0.0)) {
    throw std::invalid_argument("learning rate must be positive");
  }
  if (config.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (config.negatives < 1) {
    throw std::invalid_argument("negatives must be positive");
  }
  if (config.norm != 1 && config.norm != 2) {
    throw std::invalid_argument("norm must be 1 or 2");
  }
}

std::string SubjectKey(const Triple& triple) {
  return triple.subject_id ? triple.subject_id->str()
                           : "literal:" + triple.subject;
}

std::string ObjectKey(const Triple& triple) {
  return triple.object.entity ? triple.object.entity->str()
                              : "literal:" + triple.object.surface;
}

double Distance(const Vector& head, const Vector& relation,
                const Vector& tail, int norm) {
  double sum = 0.0;
  for (std::size_t i = 0; i < head.size(); ++i) {
    const double x = head[i] + relation[i] - tail[i];
    sum += norm == 1 ? std::abs(x) : x * x;
  }
  return norm == 1 ? sum : std::sqrt(sum);
}

double MarginLoss(const MarginPair& pair, double margin, int norm) {
  const double pos = Distance(pair.head, pair.relation, pair.tail, norm);
  const double neg =
      Distance(pair.corrupt_head, pair.relation, pair.corrupt_tail, norm);
  return std::max(0.0, margin + pos - neg);
}

MarginPair MarginLossGradient(const MarginPair& pair, double margin,
                              int norm) {
  const std::size_t n = pair.head.size();
  MarginPair grad{Vector(n, 0.0), Vector(n, 0.0), Vector(n, 0.0),
                  Vector(n, 0.0), Vector(n, 0.0)};
  if (MarginLoss(pair, margin, norm) <= 0.0) return grad;
  const Vector g_pos =
      DistanceGradient(pair.head, pair.relation, pair.tail, norm);
  const Vector g_neg = DistanceGradient(pair.corrupt_head, pair.relation,
                                        pair.corrupt_tail, norm);
  for (std::size_t i = 0; i < n; ++i) {
    grad.head[i] = g_pos[i];
    grad.tail[i] = -g_pos[i];
    grad.relation[i] = g_pos[i] - g_neg[i];
    grad.corrupt_head[i] = -g_neg[i];
    grad.corrupt_tail[i] = g_neg[i];
  }
  return grad;
}

TransEResult TrainTransE(std::span<const Triple> triples,
                         const TransEConfig& config) {
  ValidateConfig(config);
  std::map<std::string, std::size_t> entity_index;
  std::map<std::string, std::size_t> predicate_index;
  struct Encoded {
    std::size_t head, relation, tail;
  };
  std::vector<const Triple*> bare;
  for (const Triple& t : triples) {
    if (t.is_compound()) continue;
    bare.push_back(&t);
    entity_index.emplace(SubjectKey(t), 0);
    entity_index.emplace(ObjectKey(t), 0);
    predicate_index.emplace(t.predicate, 0);
  }
  if (bare.empty()) throw SchemaError("no bare triples to embed");

  Rng rng(config.seed);
  const double bound = 6.0 / std::sqrt(static_cast<double>(config.dim));
  std::vector<Vector> entities;
  for (auto& [key, index] : entity_index) {
    index = entities.size();
    Vector v(config.dim);
    for (double& x : v) x = rng.UniformDouble(-bound, bound);
    Normalize(&v);
    entities.push_back(std::move(v));
  }
  std::vector<Vector> predicates;
  for (auto& [key, index] : predicate_index) {
    index = predicates.size();
    Vector v(config.dim);
    for (double& x : v) x = rng.UniformDouble(-bound, bound);
    predicates.push_back(std::move(v));
  }
  std::vector<Encoded> encoded;
  encoded.reserve(bare.size());
  for (const Triple* t : bare) {
    encoded.push_back({entity_index.at(SubjectKey(*t)),
                       predicate_index.at(t->predicate),
                       entity_index.at(ObjectKey(*t))});
  }

  TransEResult result;
  const std::size_t entity_count = entities.size();
  const double lr = config.learning_rate;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.Shuffle(std::span<Encoded>(encoded));
    double loss_sum = 0.0;
    for (const Encoded& e : encoded) {
      for (int n = 0; n < config.negatives; ++n) {
        const bool corrupt_head = rng.Bernoulli(0.5);
        const std::size_t original = corrupt_head ? e.head : e.tail;
        std::size_t replacement = rng.Uniform(entity_count);
        while (entity_count > 1 && replacement == original) {
          replacement = rng.Uniform(entity_count);
        }
        const std::size_t neg_head = corrupt_head ? replacement : e.head;
        const std::size_t neg_tail = corrupt_head ? e.tail : replacement;
        MarginPair pair{entities[e.head], predicates[e.relation],
                        entities[e.tail], entities[neg_head],
                        entities[neg_tail]};
        const double loss = MarginLoss(pair, config.margin, config.norm);
        loss_sum += loss;
        if (loss <= 0.0) continue;
        const MarginPair grad =
            MarginLossGradient(pair, config.margin, config.norm);
        Axpy(-lr, grad.head, &entities[e.head]);
        Axpy(-lr, grad.tail, &entities[e.tail]);
        Axpy(-lr, grad.corrupt_head, &entities[neg_head]);
        Axpy(-lr, grad.corrupt_tail, &entities[neg_tail]);
        Axpy(-lr, grad.relation, &predicates[e.relation]);
        for (std::size_t touched : {e.head, e.tail, neg_head, neg_tail}) {
          Normalize(&entities[touched]);
        }
      }
    }
    result.epoch_loss.push_back(
        loss_sum / static_cast<double>(encoded.size() * config.negatives));
  }

  result.table.config = config;
  for (const auto& [key, index] : entity_index) {
    result.table.entities.emplace(key, std::move(entities[index]));
  }
  for (const auto& [key, index] : predicate_index) {
    result.table.predicates.emplace(key, std::move(predicates[index]));
  }
  return result;
}

double CosineSimilarity(const Vector& a, const Vector& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::pair<std::string, double>> NearestPredicates(
    const EmbeddingTable& table, const std::string& predicate, int k) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  auto query = table.predicates.find(predicate);
  if (query == table.predicates.end()) {
    throw std::invalid_argument("unknown predicate \"" + predicate + "\"");
  }
  std::vector<std::pair<std::string, double>> ranked;
  for (const auto& [label, vec] : table.predicates) {
    if (label == predicate) continue;
    ranked.emplace_back(label, CosineSimilarity(query->second, vec));
  }
  const std::size_t keep = std::min<std::size_t>(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + keep, ranked.end(),
                    [](const auto& a, const auto& b) {
                      if (a.second != b.second) return a.second > b.second;
                      return a.first < b.first;
                    });
  ranked.resize(keep);
  return ranked;
}

void WriteEmbeddings(const EmbeddingTable& table, std::ostream& out) {
  out << internal::Dump(Json{{"dim", table.dim()},
                             {"entities", table.entities.size()},
                             {"predicates", table.predicates.size()},
                             {"seed", table.config.seed},
                             {"config", ConfigToJson(table.config)}})
      << '\n';
  auto write = [&](std::string_view kind, const auto& vectors) {
    for (const auto& [key, vec] : vectors) {
      out << internal::Dump(Json{{"kind", kind}, {"key", key}, {"vec", vec}})
          << '\n';
    }
  };
  write("entity", table.entities);
  write("predicate", table.predicates);
}

void SaveEmbeddings(const EmbeddingTable& table,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  WriteEmbeddings(table, out);
}

EmbeddingTable ReadEmbeddings(std::istream& in, std::string_view source) {
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  std::size_t expected_entities = 0;
  std::size_t expected_predicates = 0;
  bool header = false;
  auto fail = [&](const std::string& message) {
    return SchemaError(std::string(source) + ":" + std::to_string(line_no) +
                       ": " + message);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const Json obj = internal::ParseJsonLine(line);
      if (!header) {
        table.config = ConfigFromJson(internal::Require(obj, "config"));
        expected_entities =
            internal::Require(obj, "entities").get<std::size_t>();
        expected_predicates =
            internal::Require(obj, "predicates").get<std::size_t>();
        header = true;
        continue;
      }
      const std::string kind = internal::RequireString(obj, "kind");
      Vector vec = internal::Require(obj, "vec").get<Vector>();
      if (static_cast<int>(vec.size()) != table.dim()) {
        throw SchemaError("vector has dimension " + std::to_string(vec.size()));
      }
      auto& target = kind == "entity"      ? table.entities
                     : kind == "predicate" ? table.predicates
                                           : throw SchemaError(
                                                 "unknown kind \"" + kind + "\"");
      if (!target.emplace(internal::RequireString(obj, "key"), std::move(vec))
               .second) {
        throw SchemaError("duplicate key");
      }
    } catch (const SchemaError& e) {
      throw fail(e.what());
    } catch (const Json::exception& e) {
      throw fail(e.what());
    }
  }
  if (!header) throw fail("missing header");
  if (table.entities.size() != expected_entities ||
      table.predicates.size() != expected_predicates) {
    throw fail("record counts do not match the header");
  }
  return table;
}

EmbeddingTable LoadEmbeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path.string());
  return ReadEmbeddings(in, path.string());
}

}  // namespace kgt
