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

// Core domain model: entities, 5-slot triples, sentences, aligned examples,
// and the in-memory knowledge graph built from a KG dump.

#ifndef KGT_KGTYPES_H_
#define KGT_KGTYPES_H_

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgt {

// Wikidata-style identifier such as "Q937". Non-empty, no whitespace.
class EntityId {
 public:
  // Throws SchemaError on an empty id or one containing whitespace.
  explicit EntityId(std::string raw);

  const std::string& str() const { return raw_; }

  friend bool operator==(const EntityId&, const EntityId&) = default;
  friend auto operator<=>(const EntityId&, const EntityId&) = default;

 private:
  std::string raw_;
};

struct EntityIdHash {
  std::size_t operator()(const EntityId& id) const {
    return std::hash<std::string>()(id.str());
  }
};

struct Entity {
  EntityId id;
  std::string title;
  // Deduplicated, never contains `title`, never contains an empty string.
  std::vector<std::string> aliases;
};

enum class ObjectKind {
  kEntity,
  kString,
  kDate,
  kQuantity,
};

std::string_view ObjectKindName(ObjectKind kind);
// Accepts "entity", "string", "date", "quantity". Throws SchemaError.
ObjectKind ParseObjectKind(std::string_view name);

struct ObjectValue {
  ObjectKind kind = ObjectKind::kString;
  std::string surface;
  // Present iff kind == kEntity.
  std::optional<EntityId> entity;

  static ObjectValue String(std::string surface);
  static ObjectValue EntityRef(EntityId id, std::string surface);
  // Canonicalizes Wikidata timestamps ("+1879-03-14T00:00:00Z") to
  // "1879-03-14", "1879-03" or "1879" depending on precision. Values that do
  // not parse are kept verbatim.
  static ObjectValue Date(std::string_view raw);
  // Strips a leading '+' from Wikidata amounts.
  static ObjectValue Quantity(std::string_view raw);

  friend bool operator==(const ObjectValue&, const ObjectValue&) = default;
};

struct Triple {
  std::string subject;
  std::optional<EntityId> subject_id;
  std::string predicate;
  ObjectValue object;
  // The qualifier and its value are either both present or both absent.
  std::optional<std::string> qualifier;
  std::optional<ObjectValue> qvalue;

  bool is_compound() const { return qualifier.has_value(); }

  // Plain-string triple; mostly for tests and parsed model output.
  static Triple Simple(std::string subject, std::string predicate,
                       std::string object);
  static Triple Compound(std::string subject, std::string predicate,
                         std::string object, std::string qualifier,
                         std::string qvalue);

  friend bool operator==(const Triple&, const Triple&) = default;
};

inline constexpr std::array<std::string_view, 6> kReservedTokens = {
    "<S>", "<P>", "<O>", "<Q>", "<T>", "<sep>"};

// Returns the first reserved token occurring in `text`, if any.
std::optional<std::string_view> FindReservedToken(std::string_view text);

// Throws SchemaError naming the offending field when a triple breaks an
// invariant (empty subject/predicate, unpaired qualifier, reserved token).
void ValidateTriple(const Triple& triple);

// Normalized, case-folded (s, p, o, q, t) key used for deduplication and
// triple comparison. An absent qualifier differs from any present one.
std::string TripleKey(const Triple& triple);

// "predicate1 object1 predicate2" rendering of a compound triple's predicate;
// the plain predicate for simple triples.
std::string FlattenedPredicate(const Triple& triple);

// (s, p1 o1 p2, o2) view of a compound triple; simple triples are returned
// unchanged.
Triple Flatten(const Triple& triple);

struct Sentence {
  EntityId page_id;
  std::string page_title;
  std::string text;
  std::int64_t index = 0;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

enum class Hop {
  kFirst,
  kSecond,
  kAugmented,
};

std::string_view HopName(Hop hop);
Hop ParseHop(std::string_view name);

struct TripleMatch {
  Triple triple;
  Hop hop = Hop::kFirst;
  // Entailment probability in [0, 1] once scored.
  std::optional<double> entail_score;

  friend bool operator==(const TripleMatch&, const TripleMatch&) = default;
};

struct AlignedExample {
  std::string id;
  Sentence sentence;
  std::vector<TripleMatch> matches;

  friend bool operator==(const AlignedExample&, const AlignedExample&) =
      default;
};

using Dataset = std::vector<AlignedExample>;

std::size_t CountTriples(const Dataset& dataset);

// Human judgment of whether `text` (from the page titled `title`) entails
// `triple`.
struct AnnotatedPair {
  std::string title;
  std::string text;
  Triple triple;
  bool entailed = false;
};

// Surface strings under which a literal can appear in text. Always contains
// the canonical surface first. Dates expand to English renderings, quantities
// to thousands-separated forms. Entity references return only the canonical
// surface. If a date surface fails to parse, `diagnostic` (when given)
// receives a message and only the canonical surface is returned.
std::vector<std::string> LiteralAliases(const ObjectValue& value,
                                        std::string* diagnostic = nullptr);

// One claim of a KG dump record, before expansion into triples.
struct Qualifier {
  std::string label;
  ObjectValue value;
};

struct Claim {
  std::string pid;
  std::string label;
  ObjectValue object;
  std::vector<Qualifier> qualifiers;
};

struct EntityRecord {
  Entity entity;
  std::vector<Claim> claims;
};

// Immutable entity map plus per-subject adjacency. Every claim yields its bare
// triple, and each qualifier adds a 5-slot triple sharing s/p/o.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  // Throws SchemaError on duplicate ids or invariant violations.
  static KnowledgeGraph Build(std::vector<EntityRecord> records);
  // Reads KG dump JSONL. Errors carry `source:line`.
  static KnowledgeGraph Read(std::istream& in, std::string_view source);
  static KnowledgeGraph Load(const std::filesystem::path& path);

  const Entity* FindEntity(const EntityId& id) const;
  // Outgoing triples of `id`, empty when unknown.
  std::span<const Triple> Outgoing(const EntityId& id) const;

  std::span<const Entity> entities() const { return entities_; }
  std::span<const Triple> triples() const { return triples_; }
  std::size_t entity_count() const { return entities_.size(); }
  std::size_t triple_count() const { return triples_.size(); }

 private:
  struct Range {
    std::size_t begin = 0;
    std::size_t end = 0;
  };

  std::vector<Entity> entities_;
  std::unordered_map<EntityId, std::size_t, EntityIdHash> entity_index_;
  // Grouped by subject in record order.
  std::vector<Triple> triples_;
  std::unordered_map<EntityId, Range, EntityIdHash> adjacency_;
};

}  // namespace kgt

#endif  // KGT_KGTYPES_H_
