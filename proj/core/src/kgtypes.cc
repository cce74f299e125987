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

#include "kgt/kgtypes.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <unordered_set>
#include <utility>

#include "json_codec.h"
#include "kgt/error.h"
#include "kgt/text.h"

namespace kgt {
namespace {

constexpr std::array<std::string_view, 12> kMonths = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December"};

constexpr std::array<std::string_view, 12> kMonthAbbrev = {
    "Jan", "Feb", "Mar", "Apr", "May", "Jun",
    "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

struct ParsedDate {
  int year = 0;
  int month = 0;  // 0 when unknown
  int day = 0;    // 0 when unknown
};

bool ParseInt(std::string_view text, int* out) {
  if (text.empty()) return false;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, *out);
  return ec == std::errc() && ptr == end;
}

// Accepts "+YYYY-MM-DDThh:mm:ssZ", "YYYY-MM-DD", "YYYY-MM" and "YYYY". Zero
// month or day fields mean lower precision, as in Wikidata dumps. Negative
// (BCE) years are rejected.
std::optional<ParsedDate> ParseDate(std::string_view raw) {
  std::string_view text = raw;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (!text.empty() && text.front() == '-') return std::nullopt;
  if (auto t = text.find('T'); t != std::string_view::npos) {
    text = text.substr(0, t);
  }
  ParsedDate date;
  const auto first = text.find('-');
  if (!ParseInt(text.substr(0, first), &date.year)) return std::nullopt;
  if (first != std::string_view::npos) {
    std::string_view rest = text.substr(first + 1);
    const auto second = rest.find('-');
    if (!ParseInt(rest.substr(0, second), &date.month)) return std::nullopt;
    if (second != std::string_view::npos &&
        !ParseInt(rest.substr(second + 1), &date.day)) {
      return std::nullopt;
    }
  }
  if (date.month < 0 || date.month > 12 || date.day < 0 || date.day > 31) {
    return std::nullopt;
  }
  if (date.month == 0) date.day = 0;
  return date;
}

std::string Pad(int value, int width) {
  std::string digits = std::to_string(value);
  if (static_cast<int>(digits.size()) < width) {
    digits.insert(0, width - digits.size(), '0');
  }
  return digits;
}

std::string CanonicalDate(const ParsedDate& d) {
  std::string out = Pad(d.year, 4);
  if (d.month > 0) out += "-" + Pad(d.month, 2);
  if (d.day > 0) out += "-" + Pad(d.day, 2);
  return out;
}

std::string Ordinal(int day) {
  const int mod100 = day % 100;
  const char* suffix = "th";
  if (mod100 < 11 || mod100 > 13) {
    switch (day % 10) {
      case 1: suffix = "st"; break;
      case 2: suffix = "nd"; break;
      case 3: suffix = "rd"; break;
      default: break;
    }
  }
  return std::to_string(day) + suffix;
}

void AddUnique(std::vector<std::string>* out, std::string value) {
  if (std::find(out->begin(), out->end(), value) == out->end()) {
    out->push_back(std::move(value));
  }
}

std::string GroupThousands(std::string_view digits) {
  std::string out;
  const std::size_t n = digits.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && (n - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

bool AllDigits(std::string_view text) {
  return !text.empty() && std::all_of(text.begin(), text.end(), [](char c) {
    return c >= '0' && c <= '9';
  });
}

void CheckReserved(std::string_view text, std::string_view what) {
  if (auto token = FindReservedToken(text)) {
    throw SchemaError(std::string(what) + " contains reserved token " +
                      std::string(*token) + ": \"" + std::string(text) + "\"");
  }
}

}  // namespace

EntityId::EntityId(std::string raw) : raw_(std::move(raw)) {
  if (raw_.empty()) throw SchemaError("entity id is empty");
  for (char c : raw_) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
        c == '\v') {
      throw SchemaError("entity id contains whitespace: \"" + raw_ + "\"");
    }
  }
}

std::string_view ObjectKindName(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::kEntity: return "entity";
    case ObjectKind::kString: return "string";
    case ObjectKind::kDate: return "date";
    case ObjectKind::kQuantity: return "quantity";
  }
  return "string";
}

ObjectKind ParseObjectKind(std::string_view name) {
  if (name == "entity") return ObjectKind::kEntity;
  if (name == "string") return ObjectKind::kString;
  if (name == "date") return ObjectKind::kDate;
  if (name == "quantity") return ObjectKind::kQuantity;
  throw SchemaError("unknown object kind \"" + std::string(name) + "\"");
}

ObjectValue ObjectValue::String(std::string surface) {
  return ObjectValue{ObjectKind::kString, std::move(surface), std::nullopt};
}

ObjectValue ObjectValue::EntityRef(EntityId id, std::string surface) {
  return ObjectValue{ObjectKind::kEntity, std::move(surface), std::move(id)};
}

ObjectValue ObjectValue::Date(std::string_view raw) {
  const auto parsed = ParseDate(raw);
  return ObjectValue{ObjectKind::kDate,
                     parsed ? CanonicalDate(*parsed) : std::string(raw),
                     std::nullopt};
}

ObjectValue ObjectValue::Quantity(std::string_view raw) {
  std::string_view text = raw;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  return ObjectValue{ObjectKind::kQuantity, std::string(text), std::nullopt};
}

Triple Triple::Simple(std::string subject, std::string predicate,
                      std::string object) {
  Triple t;
  t.subject = std::move(subject);
  t.predicate = std::move(predicate);
  t.object = ObjectValue::String(std::move(object));
  return t;
}

Triple Triple::Compound(std::string subject, std::string predicate,
                        std::string object, std::string qualifier,
                        std::string qvalue) {
  Triple t = Simple(std::move(subject), std::move(predicate),
                    std::move(object));
  t.qualifier = std::move(qualifier);
  t.qvalue = ObjectValue::String(std::move(qvalue));
  return t;
}

std::optional<std::string_view> FindReservedToken(std::string_view text) {
  for (std::string_view token : kReservedTokens) {
    if (text.find(token) != std::string_view::npos) return token;
  }
  return std::nullopt;
}

void ValidateTriple(const Triple& triple) {
  if (NormalizeSpace(triple.subject).empty()) {
    throw SchemaError("triple subject is empty");
  }
  if (NormalizeSpace(triple.predicate).empty()) {
    throw SchemaError("triple predicate is empty (subject \"" +
                      triple.subject + "\")");
  }
  if (triple.qualifier.has_value() != triple.qvalue.has_value()) {
    throw SchemaError("triple qualifier and qualifier value must be paired");
  }
  if (triple.object.kind == ObjectKind::kEntity) {
    if (!triple.object.entity) {
      throw SchemaError("entity object without id");
    }
  } else if (triple.object.entity) {
    throw SchemaError("literal object carries an entity id");
  }
  CheckReserved(triple.subject, "subject");
  CheckReserved(triple.predicate, "predicate");
  CheckReserved(triple.object.surface, "object");
  if (triple.qualifier) CheckReserved(*triple.qualifier, "qualifier");
  if (triple.qvalue) CheckReserved(triple.qvalue->surface, "qualifier value");
}

std::string TripleKey(const Triple& triple) {
  // \x1f separates slots; \x1e marks an absent qualifier so that it never
  // collides with an empty present one.
  std::string key = NormalizeKey(triple.subject);
  key.push_back('\x1f');
  key += NormalizeKey(triple.predicate);
  key.push_back('\x1f');
  key += NormalizeKey(triple.object.surface);
  key.push_back('\x1f');
  if (triple.qualifier) {
    key += NormalizeKey(*triple.qualifier);
    key.push_back('\x1f');
    key += NormalizeKey(triple.qvalue ? triple.qvalue->surface : "");
  } else {
    key.push_back('\x1e');
  }
  return key;
}

std::string FlattenedPredicate(const Triple& triple) {
  if (!triple.is_compound()) return triple.predicate;
  return NormalizeSpace(triple.predicate + " " + triple.object.surface + " " +
                        *triple.qualifier);
}

Triple Flatten(const Triple& triple) {
  if (!triple.is_compound()) return triple;
  Triple flat;
  flat.subject = triple.subject;
  flat.subject_id = triple.subject_id;
  flat.predicate = FlattenedPredicate(triple);
  flat.object = triple.qvalue.value_or(ObjectValue{});
  return flat;
}

std::string_view HopName(Hop hop) {
  switch (hop) {
    case Hop::kFirst: return "first";
    case Hop::kSecond: return "second";
    case Hop::kAugmented: return "augmented";
  }
  return "first";
}

Hop ParseHop(std::string_view name) {
  if (name == "first") return Hop::kFirst;
  if (name == "second") return Hop::kSecond;
  if (name == "augmented") return Hop::kAugmented;
  throw SchemaError("unknown hop \"" + std::string(name) + "\"");
}

std::size_t CountTriples(const Dataset& dataset) {
  std::size_t total = 0;
  for (const auto& example : dataset) total += example.matches.size();
  return total;
}

std::vector<std::string> LiteralAliases(const ObjectValue& value,
                                        std::string* diagnostic) {
  std::vector<std::string> aliases = {value.surface};
  switch (value.kind) {
    case ObjectKind::kEntity:
    case ObjectKind::kString:
      break;
    case ObjectKind::kDate: {
      const auto date = ParseDate(value.surface);
      if (!date) {
        if (diagnostic) {
          *diagnostic = "unparseable date \"" + value.surface + "\"";
        }
        break;
      }
      const std::string year = std::to_string(date->year);
      if (date->month > 0) {
        const std::string month(kMonths[date->month - 1]);
        const std::string abbrev(kMonthAbbrev[date->month - 1]);
        if (date->day > 0) {
          const std::string day = std::to_string(date->day);
          AddUnique(&aliases, month + " " + day + ", " + year);
          AddUnique(&aliases, month + " " + Ordinal(date->day) + ", " + year);
          AddUnique(&aliases, day + " " + month + " " + year);
          AddUnique(&aliases, abbrev + " " + day + ", " + year);
          AddUnique(&aliases, CanonicalDate(*date));
        } else {
          AddUnique(&aliases, month + " " + year);
          AddUnique(&aliases, CanonicalDate(*date));
        }
      }
      AddUnique(&aliases, year);
      break;
    }
    case ObjectKind::kQuantity: {
      std::string_view text = value.surface;
      if (!text.empty() && text.front() == '+') text.remove_prefix(1);
      std::string sign;
      if (!text.empty() && text.front() == '-') {
        sign = "-";
        text.remove_prefix(1);
      }
      const auto dot = text.find('.');
      const std::string_view integer = text.substr(0, dot);
      const std::string_view fraction =
          dot == std::string_view::npos ? std::string_view() : text.substr(dot);
      if (!AllDigits(integer) ||
          (!fraction.empty() && !AllDigits(fraction.substr(1)))) {
        break;
      }
      AddUnique(&aliases, sign + std::string(integer) + std::string(fraction));
      AddUnique(&aliases,
                sign + GroupThousands(integer) + std::string(fraction));
      break;
    }
  }
  return aliases;
}

KnowledgeGraph KnowledgeGraph::Build(std::vector<EntityRecord> records) {
  KnowledgeGraph kg;
  kg.entities_.reserve(records.size());
  for (auto& record : records) {
    Entity& entity = record.entity;
    entity.title = NormalizeSpace(entity.title);
    if (entity.title.empty()) {
      throw SchemaError("entity " + entity.id.str() + " has an empty title");
    }
    CheckReserved(entity.title, "title of " + entity.id.str());
    std::vector<std::string> aliases;
    for (const auto& alias : entity.aliases) {
      std::string a = NormalizeSpace(alias);
      if (a.empty() || a == entity.title) continue;
      CheckReserved(a, "alias of " + entity.id.str());
      AddUnique(&aliases, std::move(a));
    }
    entity.aliases = std::move(aliases);
    if (!kg.entity_index_.emplace(entity.id, kg.entities_.size()).second) {
      throw SchemaError("duplicate entity id " + entity.id.str());
    }
    kg.entities_.push_back(entity);

    const std::size_t begin = kg.triples_.size();
    for (auto& claim : record.claims) {
      Triple bare;
      bare.subject = entity.title;
      bare.subject_id = entity.id;
      bare.predicate = NormalizeSpace(claim.label);
      bare.object = claim.object;
      bare.object.surface = NormalizeSpace(bare.object.surface);
      ValidateTriple(bare);
      kg.triples_.push_back(bare);
      for (auto& qualifier : claim.qualifiers) {
        Triple compound = bare;
        compound.qualifier = NormalizeSpace(qualifier.label);
        compound.qvalue = qualifier.value;
        compound.qvalue->surface = NormalizeSpace(compound.qvalue->surface);
        if (compound.qualifier->empty()) {
          throw SchemaError("empty qualifier label on " + entity.id.str());
        }
        ValidateTriple(compound);
        kg.triples_.push_back(std::move(compound));
      }
    }
    kg.adjacency_.emplace(entity.id, Range{begin, kg.triples_.size()});
  }
  return kg;
}

KnowledgeGraph KnowledgeGraph::Read(std::istream& in,
                                    std::string_view source) {
  std::vector<EntityRecord> records;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (NormalizeSpace(line).empty()) continue;
    try {
      records.push_back(internal::ParseEntityRecord(line));
      // Build() repeats this check; doing it here keeps the line number.
      if (!seen.insert(records.back().entity.id.str()).second) {
        throw SchemaError("duplicate entity id " +
                          records.back().entity.id.str());
      }
      // Surface invariant violations early, also with the line number.
      CheckReserved(records.back().entity.title, "title");
    } catch (const Error& e) {
      throw SchemaError(std::string(source) + ":" + std::to_string(line_no) +
                        ": " + e.what());
    }
  }
  try {
    return Build(std::move(records));
  } catch (const Error& e) {
    throw SchemaError(std::string(source) + ": " + e.what());
  }
}

KnowledgeGraph KnowledgeGraph::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open KG dump " + path.string());
  return Read(in, path.string());
}

const Entity* KnowledgeGraph::FindEntity(const EntityId& id) const {
  auto it = entity_index_.find(id);
  return it == entity_index_.end() ? nullptr : &entities_[it->second];
}

std::span<const Triple> KnowledgeGraph::Outgoing(const EntityId& id) const {
  auto it = adjacency_.find(id);
  if (it == adjacency_.end()) return {};
  return std::span<const Triple>(triples_).subspan(
      it->second.begin, it->second.end - it->second.begin);
}

}  // namespace kgt
