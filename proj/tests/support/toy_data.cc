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

#include "toy_data.h"

#include <unistd.h>

#include <array>
#include <atomic>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#ifndef KGT_FIXTURE_DIR
#error "KGT_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace kgt::testing {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr std::array<const char*, 24> kWords = {
    "amber", "basin", "cedar", "delta", "ember", "fjord", "grove", "heron",
    "inlet", "jade",  "kelp",  "lumen", "maple", "north", "onyx",  "prism",
    "quill", "river", "slate", "tidal", "umber", "vale",  "willow", "zephyr"};

template <typename T, std::size_t N>
const T& Pick(Rng& rng, const std::array<T, N>& items) {
  return items[rng.Uniform(N)];
}

template <typename T>
const T& Pick(Rng& rng, const std::vector<T>& items) {
  return items[rng.Uniform(items.size())];
}

constexpr std::array<const char*, 12> kMonths = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December"};

std::string Pad2(int v) { return (v < 10 ? "0" : "") + std::to_string(v); }

std::string WikidataDate(int y, int m, int d) {
  return "+" + std::to_string(y) + "-" + Pad2(m) + "-" + Pad2(d) +
         "T00:00:00Z";
}

Json ObjectJson(const ObjectValue& v, const std::string& raw) {
  Json o = {{"kind", std::string(ObjectKindName(v.kind))}, {"value", raw}};
  if (v.entity) o["qid"] = v.entity->str();
  return o;
}

}  // namespace

fs::path Fixture(const std::string& name) {
  return fs::path(KGT_FIXTURE_DIR) / name;
}

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("kgt-test-" + std::to_string(::getpid()) + "-" +
           std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ignored;
  fs::remove_all(path_, ignored);
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
}

std::string RandomPhrase(Rng& rng, int max_words) {
  const int n = 1 + static_cast<int>(rng.Uniform(max_words));
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i > 0) out += ' ';
    out += Pick(rng, kWords);
  }
  return out;
}

std::vector<Triple> RandomGraph(Rng& rng, int max_triples) {
  const int n = static_cast<int>(rng.Uniform(max_triples + 1));
  std::vector<Triple> graph;
  for (int i = 0; i < n; ++i) {
    if (rng.Bernoulli(0.3)) {
      graph.push_back(Triple::Compound(RandomPhrase(rng), RandomPhrase(rng),
                                       RandomPhrase(rng), RandomPhrase(rng),
                                       RandomPhrase(rng)));
    } else {
      graph.push_back(Triple::Simple(RandomPhrase(rng), RandomPhrase(rng),
                                     RandomPhrase(rng)));
    }
  }
  return graph;
}

std::string RandomText(Rng& rng, int min_words, int max_words, int vocab) {
  const int n = min_words +
                static_cast<int>(rng.Uniform(max_words - min_words + 1));
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i > 0) out += ' ';
    out += "w" + std::to_string(rng.Uniform(vocab));
  }
  return out;
}

Dataset ToyPairs(std::size_t n, std::uint64_t seed) {
  static constexpr std::array<const char*, 10> kPredicates = {
      "born in",   "works for", "lives in",    "member of", "studied at",
      "plays for", "leads",     "founded in",  "married to", "known for"};
  static constexpr std::array<const char*, 10> kObjects = {
      "Aldmoor", "Brightwater", "Coldspring", "Dawnridge", "Eastvale",
      "Frostholm", "Goldcrest", "Highmere",   "Ironwood",  "Juniper Bay"};
  Rng rng(seed);
  Dataset dataset;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string subject = "Person " + std::to_string(i);
    const int k = 1 + static_cast<int>(rng.Uniform(4));
    AlignedExample example{"toy" + std::to_string(i),
                           Sentence{EntityId("T" + std::to_string(i)), subject,
                                    "", 0},
                           {}};
    std::set<std::string> used;
    std::string text = subject;
    for (int j = 0; j < k; ++j) {
      std::string p = Pick(rng, kPredicates);
      std::string o = Pick(rng, kObjects);
      if (!used.insert(p + "|" + o).second) continue;
      text += (example.matches.empty() ? " " : " and ") + p + " " + o;
      example.matches.push_back(
          TripleMatch{Triple::Simple(subject, p, o), Hop::kFirst, std::nullopt});
    }
    example.sentence.text = text + " .";
    dataset.push_back(std::move(example));
  }
  return dataset;
}

ToyWorld MakeToyWorld(std::size_t people, std::uint64_t seed) {
  static constexpr std::array<const char*, 16> kFirst = {
      "Ada",  "Bruno", "Clara", "Dmitri", "Elena", "Felix", "Greta", "Hugo",
      "Iris", "Jonas", "Karin", "Lukas",  "Mira",  "Nils",  "Olga",  "Pavel"};
  static constexpr std::array<const char*, 16> kLast = {
      "Arden",  "Brask",  "Corvin", "Dahl",   "Ekberg", "Falk",
      "Gessner", "Holm",  "Ivers",  "Jansen", "Krantz", "Lind",
      "Moberg", "Norden", "Ostrom", "Persson"};
  struct Named {
    const char* qid;
    const char* title;
  };
  static constexpr std::array<Named, 6> kOccupations = {{{"QO1", "Physicist"},
                                                         {"QO2", "Chemist"},
                                                         {"QO3", "Painter"},
                                                         {"QO4", "Lawyer"},
                                                         {"QO5", "Engineer"},
                                                         {"QO6", "Poet"}}};
  static constexpr std::array<Named, 6> kFields = {{{"QF1", "Physics"},
                                                    {"QF2", "Chemistry"},
                                                    {"QF3", "Art"},
                                                    {"QF4", "Law"},
                                                    {"QF5", "Engineering"},
                                                    {"QF6", "Poetry"}}};
  static constexpr std::array<Named, 6> kCities = {{{"QC1", "Ulmara"},
                                                    {"QC2", "Brenton"},
                                                    {"QC3", "Castor"},
                                                    {"QC4", "Dunmore"},
                                                    {"QC5", "Elwick"},
                                                    {"QC6", "Farrow"}}};
  static constexpr std::array<Named, 3> kCountries = {
      {{"QN1", "Norland"}, {"QN2", "Sudovia"}, {"QN3", "Westmark"}}};
  static constexpr std::array<Named, 4> kEmployers = {
      {{"QE1", "Acme Works"},
       {"QE2", "Borealis Labs"},
       {"QE3", "Cobalt Institute"},
       {"QE4", "Delta Studio"}}};
  static constexpr std::array<const char*, 12> kFiller = {
      "quietly", "often",  "together", "with",  "great", "care",
      "during",  "many",   "long",     "years", "and",   "friends"};

  Rng rng(seed);
  ToyWorld world;
  auto entity_value = [](const Named& n) {
    return ObjectValue::EntityRef(EntityId(n.qid), n.title);
  };
  auto add_record = [&](const Named& n, std::vector<Claim> claims) {
    world.records.push_back(
        EntityRecord{Entity{EntityId(n.qid), n.title, {}}, std::move(claims)});
  };
  for (std::size_t i = 0; i < kOccupations.size(); ++i) {
    add_record(kOccupations[i],
               {Claim{"P101", "Field of Work", entity_value(kFields[i]), {}}});
  }
  for (const auto& f : kFields) add_record(f, {});
  for (std::size_t i = 0; i < kCities.size(); ++i) {
    add_record(kCities[i], {Claim{"P17", "Country",
                                  entity_value(kCountries[i % 3]), {}}});
  }
  for (std::size_t i = 0; i < kCountries.size(); ++i) {
    add_record(kCountries[i],
               {Claim{"P36", "Capital", entity_value(kCities[i]), {}}});
  }
  for (std::size_t i = 0; i < kEmployers.size(); ++i) {
    add_record(kEmployers[i], {Claim{"P159", "Headquarters Location",
                                     entity_value(kCities[(i + 2) % 6]), {}}});
  }

  auto filler = [&](int max_words) {
    std::string out;
    const int n = static_cast<int>(rng.Uniform(max_words + 1));
    for (int i = 0; i < n; ++i) out += std::string(" ") + Pick(rng, kFiller);
    return out;
  };

  for (std::size_t i = 0; i < people; ++i) {
    const std::string first = kFirst[i % kFirst.size()];
    const std::string last = kLast[(i / kFirst.size()) % kLast.size()];
    const std::string name = first + " " + last;
    const std::string qid = "QP" + std::to_string(i);
    const std::size_t occ = rng.Uniform(kOccupations.size());
    const std::size_t city = rng.Uniform(kCities.size());
    const std::size_t emp = rng.Uniform(kEmployers.size());
    const int year = 1900 + static_cast<int>(rng.Uniform(90));
    const int month = 1 + static_cast<int>(rng.Uniform(12));
    const int day = 1 + static_cast<int>(rng.Uniform(28));
    const int start = year + 20 + static_cast<int>(rng.Uniform(10));

    std::vector<Claim> claims;
    claims.push_back(
        Claim{"P106", "Occupation", entity_value(kOccupations[occ]), {}});
    claims.push_back(
        Claim{"P19", "Place of Birth", entity_value(kCities[city]), {}});
    claims.push_back(Claim{
        "P108",
        "Employer",
        entity_value(kEmployers[emp]),
        {Qualifier{"Start Time",
                   ObjectValue::Date("+" + std::to_string(start) +
                                     "-00-00T00:00:00Z")}}});
    claims.push_back(Claim{"P569", "Date of Birth",
                           ObjectValue::Date(WikidataDate(year, month, day)),
                           {}});
    world.records.push_back(EntityRecord{
        Entity{EntityId(qid), name, {last}}, std::move(claims)});

    std::string occ_word = kOccupations[occ].title;
    for (char& c : occ_word) c = static_cast<char>(std::tolower(c));
    const std::string city_name = kCities[city].title;
    const std::string country = kCountries[city % 3].title;
    std::vector<std::string> texts = {
        name + " was a " + occ_word + filler(12) + " born in " + city_name +
            ", " + country + ".",
        last + " joined " + kEmployers[emp].title + " in " +
            std::to_string(start) + filler(20) + " near " +
            kCities[(emp + 2) % 6].title + ".",
        name + " was born on " + kMonths[month - 1] + " " +
            std::to_string(day) + ", " + std::to_string(year) + filler(6) +
            ".",
        name + ", a " + occ_word + "," + filler(25) + " studied " +
            kFields[occ].title + ".",
        "In " + std::to_string(start) + " the family moved to " +
            Pick(rng, kCities).title + ".",
    };
    for (std::size_t j = 0; j < texts.size(); ++j) {
      world.corpus.push_back(Sentence{EntityId(qid), name, texts[j],
                                      static_cast<std::int64_t>(j)});
    }
  }
  return world;
}

std::string KgDumpJsonl(const std::vector<EntityRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    Json claims = Json::array();
    for (const auto& c : r.claims) {
      Json qualifiers = Json::array();
      for (const auto& q : c.qualifiers) {
        const std::string raw = q.value.kind == ObjectKind::kDate
                                    ? "+" + q.value.surface
                                    : q.value.surface;
        qualifiers.push_back(
            {{"plabel", q.label}, {"value", ObjectJson(q.value, raw)}});
      }
      const std::string raw = c.object.kind == ObjectKind::kDate
                                  ? "+" + c.object.surface
                                  : c.object.surface;
      claims.push_back({{"pid", c.pid},
                        {"plabel", c.label},
                        {"object", ObjectJson(c.object, raw)},
                        {"qualifiers", qualifiers}});
    }
    Json rec = {{"qid", r.entity.id.str()},
                {"title", r.entity.title},
                {"aliases", r.entity.aliases},
                {"claims", claims}};
    out += rec.dump() + "\n";
  }
  return out;
}

std::string CorpusJsonl(const std::vector<Sentence>& corpus) {
  std::string out;
  for (const auto& s : corpus) {
    Json rec = {{"qid", s.page_id.str()},
                {"title", s.page_title},
                {"idx", s.index},
                {"text", s.text}};
    out += rec.dump() + "\n";
  }
  return out;
}

AlignWorld MakeAlignWorld(std::size_t sentences, std::uint64_t seed) {
  Rng rng(seed);
  constexpr std::size_t kEntities = 40;
  std::vector<std::string> titles;
  for (std::size_t i = 0; i < kEntities; ++i) {
    // Every fourth title extends an earlier one, so longest-match matters.
    if (i >= 4 && i % 4 == 0) {
      titles.push_back(titles[rng.Uniform(i)] + " " + Pick(rng, kWords));
    } else {
      titles.push_back(RandomPhrase(rng, 2));
    }
  }
  auto qid = [](std::size_t i) { return EntityId("Q" + std::to_string(i)); };
  std::vector<EntityRecord> records;
  for (std::size_t i = 0; i < kEntities; ++i) {
    Entity entity{qid(i), titles[i], {}};
    if (rng.Bernoulli(0.3)) entity.aliases.push_back(RandomPhrase(rng, 2));
    std::vector<Claim> claims;
    const int n = 2 + static_cast<int>(rng.Uniform(5));
    for (int c = 0; c < n; ++c) {
      const std::string label = "rel " + std::to_string(rng.Uniform(8));
      const double kind = rng.UniformDouble();
      ObjectValue object;
      if (kind < 0.6) {
        const std::size_t j = rng.Uniform(kEntities);
        object = ObjectValue::EntityRef(qid(j), titles[j]);
      } else if (kind < 0.75) {
        object = ObjectValue::String(RandomPhrase(rng, 2));
      } else if (kind < 0.9) {
        object = ObjectValue::Date(WikidataDate(
            1900 + static_cast<int>(rng.Uniform(100)),
            1 + static_cast<int>(rng.Uniform(12)),
            1 + static_cast<int>(rng.Uniform(28))));
      } else {
        object = ObjectValue::Quantity(std::to_string(rng.Uniform(5000)));
      }
      Claim claim{"P" + std::to_string(c), label, object, {}};
      if (rng.Bernoulli(0.2)) {
        claim.qualifiers.push_back(Qualifier{
            "point in time",
            ObjectValue::Date("+" + std::to_string(1950 + rng.Uniform(70)) +
                              "-00-00T00:00:00Z")});
      }
      claims.push_back(std::move(claim));
    }
    records.push_back(EntityRecord{std::move(entity), std::move(claims)});
  }

  AlignWorld world;
  world.kg = KnowledgeGraph::Build(records);
  for (std::size_t s = 0; s < sentences; ++s) {
    const std::size_t page = rng.Uniform(kEntities);
    const Entity& entity = *world.kg.FindEntity(qid(page));
    // Candidate surfaces: the page, its objects, and their objects.
    std::vector<std::string> pool = {entity.title};
    for (const auto& a : entity.aliases) pool.push_back(a);
    for (const Triple& t : world.kg.Outgoing(entity.id)) {
      const auto aliases = LiteralAliases(t.object);
      pool.push_back(Pick(rng, aliases));
      if (t.qvalue) pool.push_back(Pick(rng, LiteralAliases(*t.qvalue)));
      if (t.object.entity) {
        for (const Triple& u : world.kg.Outgoing(*t.object.entity)) {
          pool.push_back(Pick(rng, LiteralAliases(u.object)));
        }
      }
    }
    const int n = 3 + static_cast<int>(rng.Uniform(10));
    std::string text;
    for (int i = 0; i < n; ++i) {
      if (i > 0) text += rng.Bernoulli(0.2) ? ", " : " ";
      text += rng.Bernoulli(0.6) ? Pick(rng, pool) : Pick(rng, kWords);
    }
    world.sentences.push_back(
        Sentence{entity.id, entity.title, text, static_cast<std::int64_t>(s)});
  }
  return world;
}

double LexicalEntailment(const ScoreRequest& request) {
  auto tokens = [](const std::string& text) {
    std::set<std::string> out;
    std::string current;
    for (char c : text + " ") {
      if (std::isalnum(static_cast<unsigned char>(c))) {
        current.push_back(static_cast<char>(std::tolower(c)));
      } else if (!current.empty()) {
        out.insert(current);
        current.clear();
      }
    }
    return out;
  };
  const auto premise = tokens(request.premise);
  const auto hypothesis = tokens(request.hypothesis);
  if (hypothesis.empty()) return 0.0;
  std::size_t found = 0;
  for (const auto& t : hypothesis) found += premise.count(t);
  return static_cast<double>(found) / hypothesis.size();
}

}  // namespace kgt::testing
