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

#include "kgt/dataset_io.h"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "json_codec.h"
#include "kgt/error.h"
#include "kgt/text.h"

namespace kgt {
namespace internal {

Json ParseJsonLine(std::string_view line) {
  try {
    Json value = Json::parse(line);
    if (!value.is_object()) throw SchemaError("record is not a JSON object");
    return value;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
}

const Json& Require(const Json& obj, std::string_view key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError("missing key \"" + std::string(key) + "\"");
  }
  return *it;
}

std::string RequireString(const Json& obj, std::string_view key) {
  const Json& value = Require(obj, key);
  if (!value.is_string()) {
    throw SchemaError("key \"" + std::string(key) + "\" must be a string");
  }
  return value.get<std::string>();
}

std::string OptionalString(const Json& obj, std::string_view key,
                           std::string fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_string()) {
    throw SchemaError("key \"" + std::string(key) + "\" must be a string");
  }
  return it->get<std::string>();
}

namespace {

ObjectValue ObjectFromDump(const Json& obj) {
  if (!obj.is_object()) throw SchemaError("object value must be an object");
  const ObjectKind kind = ParseObjectKind(RequireString(obj, "kind"));
  const std::string value = RequireString(obj, "value");
  switch (kind) {
    case ObjectKind::kEntity:
      return ObjectValue::EntityRef(EntityId(RequireString(obj, "qid")),
                                    value);
    case ObjectKind::kDate:
      return ObjectValue::Date(value);
    case ObjectKind::kQuantity:
      return ObjectValue::Quantity(value);
    case ObjectKind::kString:
      break;
  }
  return ObjectValue::String(value);
}

ObjectValue ObjectFromDataset(std::string surface, const std::string& kind,
                              const std::string& qid) {
  ObjectValue value;
  value.kind = kind.empty() ? ObjectKind::kString : ParseObjectKind(kind);
  value.surface = std::move(surface);
  if (value.kind == ObjectKind::kEntity) {
    if (qid.empty()) throw SchemaError("entity object without qid");
    value.entity = EntityId(qid);
  }
  return value;
}

void PutObjectExtras(Json* out, const ObjectValue& value,
                     std::string_view kind_key, std::string_view qid_key) {
  if (value.kind != ObjectKind::kString) {
    (*out)[std::string(kind_key)] = std::string(ObjectKindName(value.kind));
  }
  if (value.entity) (*out)[std::string(qid_key)] = value.entity->str();
}

}  // namespace

EntityRecord ParseEntityRecord(std::string_view line) {
  const Json obj = ParseJsonLine(line);
  EntityRecord record{Entity{EntityId(RequireString(obj, "qid")),
                             RequireString(obj, "title"),
                             {}},
                      {}};
  if (auto it = obj.find("aliases"); it != obj.end()) {
    if (!it->is_array()) throw SchemaError("\"aliases\" must be an array");
    for (const auto& alias : *it) {
      if (!alias.is_string()) throw SchemaError("alias must be a string");
      record.entity.aliases.push_back(alias.get<std::string>());
    }
  }
  if (auto it = obj.find("claims"); it != obj.end()) {
    if (!it->is_array()) throw SchemaError("\"claims\" must be an array");
    for (const auto& c : *it) {
      Claim claim;
      claim.pid = OptionalString(c, "pid");
      claim.label = RequireString(c, "plabel");
      claim.object = ObjectFromDump(Require(c, "object"));
      if (auto q = c.find("qualifiers"); q != c.end()) {
        if (!q->is_array()) {
          throw SchemaError("\"qualifiers\" must be an array");
        }
        for (const auto& qual : *q) {
          claim.qualifiers.push_back(Qualifier{
              RequireString(qual, "plabel"), ObjectFromDump(Require(qual, "value"))});
        }
      }
      record.claims.push_back(std::move(claim));
    }
  }
  return record;
}

Json TripleToJson(const Triple& triple) {
  Json out = Json::object();
  out["s"] = triple.subject;
  out["p"] = triple.predicate;
  out["o"] = triple.object.surface;
  if (triple.qualifier) {
    out["q"] = *triple.qualifier;
    out["t"] = triple.qvalue ? triple.qvalue->surface : std::string();
  }
  return out;
}

namespace {

void AppendExtras(Json* out, const Triple& triple) {
  if (triple.subject_id) (*out)["s_qid"] = triple.subject_id->str();
  PutObjectExtras(out, triple.object, "o_kind", "o_qid");
  if (triple.qvalue) PutObjectExtras(out, *triple.qvalue, "t_kind", "t_qid");
}

}  // namespace

Triple TripleFromJson(const Json& obj) {
  if (!obj.is_object()) throw SchemaError("triple must be an object");
  Triple triple;
  triple.subject = RequireString(obj, "s");
  triple.predicate = RequireString(obj, "p");
  triple.object = ObjectFromDataset(RequireString(obj, "o"),
                                    OptionalString(obj, "o_kind"),
                                    OptionalString(obj, "o_qid"));
  if (const std::string sid = OptionalString(obj, "s_qid"); !sid.empty()) {
    triple.subject_id = EntityId(sid);
  }
  const bool has_q = obj.contains("q") && !obj["q"].is_null();
  const bool has_t = obj.contains("t") && !obj["t"].is_null();
  if (has_q != has_t) {
    throw SchemaError("triple has \"q\" without \"t\" or vice versa");
  }
  if (has_q) {
    triple.qualifier = RequireString(obj, "q");
    triple.qvalue = ObjectFromDataset(RequireString(obj, "t"),
                                      OptionalString(obj, "t_kind"),
                                      OptionalString(obj, "t_qid"));
  }
  ValidateTriple(triple);
  return triple;
}

std::string Dump(const Json& value) {
  return value.dump(-1, ' ', false, Json::error_handler_t::replace);
}

}  // namespace internal

namespace {

using internal::Json;

template <typename Fn>
void ForEachLine(std::istream& in, std::string_view source, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (NormalizeSpace(line).empty()) continue;
    try {
      fn(internal::ParseJsonLine(line));
    } catch (const SchemaError& e) {
      throw SchemaError(std::string(source) + ":" + std::to_string(line_no) +
                        ": " + e.what());
    }
  }
}

std::int64_t OptionalInt(const Json& obj, std::string_view key) {
  auto it = obj.find(key);
  if (it == obj.end()) return 0;
  if (!it->is_number_integer()) {
    throw SchemaError("key \"" + std::string(key) + "\" must be an integer");
  }
  return it->get<std::int64_t>();
}

std::ifstream OpenInput(const std::filesystem::path& path,
                        std::string_view what) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot open " + std::string(what) + " " + path.string());
  }
  return in;
}

std::ofstream OpenOutput(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  return out;
}

Sentence SentenceFrom(const Json& obj, std::string_view idx_key) {
  Sentence sentence{EntityId(internal::RequireString(obj, "qid")),
                    internal::RequireString(obj, "title"),
                    internal::RequireString(obj, "text"),
                    OptionalInt(obj, idx_key)};
  if (sentence.index < 0) throw SchemaError("sentence index is negative");
  if (NormalizeSpace(sentence.text).empty()) {
    throw SchemaError("sentence text is empty");
  }
  return sentence;
}

}  // namespace

void WriteDataset(const Dataset& dataset, std::ostream& out) {
  for (const auto& example : dataset) {
    Json record = Json::object();
    record["schema_version"] = std::string(kSchemaVersion);
    record["id"] = example.id;
    record["qid"] = example.sentence.page_id.str();
    record["title"] = example.sentence.page_title;
    record["text"] = example.sentence.text;
    Json triples = Json::array();
    for (const auto& match : example.matches) {
      Json t = internal::TripleToJson(match.triple);
      t["hop"] = std::string(HopName(match.hop));
      if (match.entail_score) t["score"] = *match.entail_score;
      internal::AppendExtras(&t, match.triple);
      triples.push_back(std::move(t));
    }
    record["triples"] = std::move(triples);
    if (example.sentence.index != 0) record["idx"] = example.sentence.index;
    out << internal::Dump(record) << '\n';
  }
}

void SaveDataset(const Dataset& dataset, const std::filesystem::path& path) {
  auto out = OpenOutput(path);
  WriteDataset(dataset, out);
  if (!out) throw Error(ErrorKind::kInternal, "write failed: " + path.string());
}

Dataset ReadDataset(std::istream& in, std::string_view source) {
  Dataset dataset;
  std::unordered_set<std::string> ids;
  ForEachLine(in, source, [&](const Json& obj) {
    const std::string version = internal::RequireString(obj, "schema_version");
    if (version != kSchemaVersion) {
      throw SchemaError("schema_version \"" + version + "\" not supported; "
                        "expected \"" + std::string(kSchemaVersion) + "\"");
    }
    AlignedExample example{internal::RequireString(obj, "id"),
                           SentenceFrom(obj, "idx"),
                           {}};
    if (!ids.insert(example.id).second) {
      throw SchemaError("duplicate example id \"" + example.id + "\"");
    }
    const Json& triples = internal::Require(obj, "triples");
    if (!triples.is_array()) throw SchemaError("\"triples\" must be an array");
    for (const auto& t : triples) {
      TripleMatch match;
      match.triple = internal::TripleFromJson(t);
      match.hop = ParseHop(internal::OptionalString(t, "hop", "first"));
      if (auto s = t.find("score"); s != t.end() && !s->is_null()) {
        if (!s->is_number()) throw SchemaError("\"score\" must be a number");
        match.entail_score = s->get<double>();
      }
      example.matches.push_back(std::move(match));
    }
    dataset.push_back(std::move(example));
  });
  return dataset;
}

Dataset LoadDataset(const std::filesystem::path& path) {
  auto in = OpenInput(path, "dataset");
  return ReadDataset(in, path.string());
}

std::vector<Sentence> ReadCorpus(std::istream& in, std::string_view source) {
  std::vector<Sentence> corpus;
  ForEachLine(in, source, [&](const Json& obj) {
    corpus.push_back(SentenceFrom(obj, "idx"));
  });
  return corpus;
}

std::vector<Sentence> LoadCorpus(const std::filesystem::path& path) {
  auto in = OpenInput(path, "corpus");
  return ReadCorpus(in, path.string());
}

void WriteCorpus(const std::vector<Sentence>& corpus, std::ostream& out) {
  for (const auto& sentence : corpus) {
    Json record = Json::object();
    record["qid"] = sentence.page_id.str();
    record["title"] = sentence.page_title;
    record["idx"] = sentence.index;
    record["text"] = sentence.text;
    out << internal::Dump(record) << '\n';
  }
}

std::vector<AnnotatedPair> ReadAnnotated(std::istream& in,
                                         std::string_view source) {
  std::vector<AnnotatedPair> pairs;
  ForEachLine(in, source, [&](const Json& obj) {
    AnnotatedPair pair;
    pair.text = internal::RequireString(obj, "text");
    pair.title = internal::RequireString(obj, "title");
    pair.triple = internal::TripleFromJson(internal::Require(obj, "triple"));
    const std::string label = internal::RequireString(obj, "label");
    if (label == "entailed") {
      pair.entailed = true;
    } else if (label == "not") {
      pair.entailed = false;
    } else {
      throw SchemaError("label must be \"entailed\" or \"not\", got \"" +
                        label + "\"");
    }
    pairs.push_back(std::move(pair));
  });
  return pairs;
}

std::vector<AnnotatedPair> LoadAnnotated(const std::filesystem::path& path) {
  auto in = OpenInput(path, "annotated pairs");
  return ReadAnnotated(in, path.string());
}

void WriteAnnotated(const std::vector<AnnotatedPair>& pairs,
                    std::ostream& out) {
  for (const auto& pair : pairs) {
    Json record = Json::object();
    record["text"] = pair.text;
    record["title"] = pair.title;
    record["triple"] = internal::TripleToJson(pair.triple);
    record["label"] = pair.entailed ? "entailed" : "not";
    out << internal::Dump(record) << '\n';
  }
}

std::string TripleToJson(const Triple& triple) {
  return internal::Dump(internal::TripleToJson(triple));
}

}  // namespace kgt
