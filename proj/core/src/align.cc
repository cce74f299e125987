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

#include "kgt/align.h"

#include <algorithm>
#include <atomic>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include "kgt/error.h"
#include "kgt/mention_index.h"
#include "kgt/text.h"

namespace kgt {
namespace {

// Groups the surfaces of one KG node (entity or literal) under a node id.
class NodeTable {
 public:
  NodeTable(const KnowledgeGraph& kg, MentionIndex* index)
      : kg_(kg), index_(index) {}

  std::uint32_t ForEntity(const EntityId& id, std::string_view fallback) {
    auto [node, fresh] = Intern("E\x1f" + id.str());
    if (fresh) {
      if (const Entity* entity = kg_.FindEntity(id)) {
        index_->Add(entity->title, node);
        for (const auto& alias : entity->aliases) index_->Add(alias, node);
      }
      index_->Add(fallback, node);
    }
    return node;
  }

  std::uint32_t ForValue(const ObjectValue& value) {
    if (value.entity) return ForEntity(*value.entity, value.surface);
    auto [node, fresh] = Intern("L\x1f" +
                                std::string(ObjectKindName(value.kind)) +
                                "\x1f" + value.surface);
    if (fresh) {
      for (const auto& alias : LiteralAliases(value)) index_->Add(alias, node);
    }
    return node;
  }

  std::size_t size() const { return keys_.size(); }

 private:
  std::pair<std::uint32_t, bool> Intern(std::string key) {
    auto [it, inserted] =
        keys_.emplace(std::move(key), static_cast<std::uint32_t>(keys_.size()));
    return {it->second, inserted};
  }

  const KnowledgeGraph& kg_;
  MentionIndex* index_;
  std::unordered_map<std::string, std::uint32_t> keys_;
};

using SpanList = std::vector<std::size_t>;

// node id -> indices into `spans` that mention it.
std::vector<SpanList> SpansByNode(const MentionIndex& index,
                                  const std::vector<MatchSpan>& spans,
                                  std::size_t node_count) {
  std::vector<SpanList> by_node(node_count);
  for (std::size_t s = 0; s < spans.size(); ++s) {
    for (std::uint32_t node : index.targets(spans[s].pattern)) {
      by_node[node].push_back(s);
    }
  }
  return by_node;
}

// Whether some element of `a` differs from some element of `b`; both are
// sets of span indices into one span list.
bool ExistsDistinctPair(const SpanList& a, const SpanList& b) {
  if (a.empty() || b.empty()) return false;
  if (a.size() > 1 || b.size() > 1) return true;
  return a.front() != b.front();
}

struct TripleNodes {
  std::uint32_t object = 0;
  std::optional<std::uint32_t> qvalue;
};

// Mention index over one page's subject and first-hop objects. Built once per
// page and reused for every sentence of that page.
class PageAligner {
 public:
  PageAligner(const KnowledgeGraph& kg, const Entity& page)
      : page_(page), triples_(kg.Outgoing(page.id)) {
    NodeTable nodes(kg, &index_);
    subject_node_ = nodes.ForEntity(page.id, page.title);
    triple_nodes_.reserve(triples_.size());
    for (const Triple& t : triples_) {
      TripleNodes tn;
      tn.object = nodes.ForValue(t.object);
      if (t.qvalue) tn.qvalue = nodes.ForValue(*t.qvalue);
      triple_nodes_.push_back(tn);
    }
    node_count_ = nodes.size();
    index_.Finalize();
  }

  const EntityId& page_id() const { return page_.id; }

  struct FirstHop {
    std::vector<Triple> triples;
    // Span positions of each matched entity object, keyed by entity id.
    std::unordered_map<std::string, std::vector<std::pair<std::size_t,
                                                          std::size_t>>>
        object_positions;
  };

  FirstHop Align(std::string_view text, bool require_subject) const {
    FirstHop result;
    const auto spans = index_.FindMentions(text);
    if (spans.empty()) return result;
    const auto by_node = SpansByNode(index_, spans, node_count_);
    const SpanList& subject_spans = by_node[subject_node_];
    if (require_subject && subject_spans.empty()) return result;

    for (std::size_t i = 0; i < triples_.size(); ++i) {
      const TripleNodes& tn = triple_nodes_[i];
      const SpanList& object_spans = by_node[tn.object];
      if (object_spans.empty()) continue;
      if (require_subject && !ExistsDistinctPair(subject_spans, object_spans)) {
        continue;
      }
      if (tn.qvalue && by_node[*tn.qvalue].empty()) continue;
      result.triples.push_back(triples_[i]);
      if (const auto& id = triples_[i].object.entity) {
        auto& positions = result.object_positions[id->str()];
        if (positions.empty()) {
          for (std::size_t s : object_spans) {
            positions.emplace_back(spans[s].start, spans[s].end);
          }
        }
      }
    }
    return result;
  }

 private:
  const Entity& page_;
  std::span<const Triple> triples_;
  MentionIndex index_;
  std::uint32_t subject_node_ = 0;
  std::vector<TripleNodes> triple_nodes_;
  std::size_t node_count_ = 0;
};

// Entity-ref objects of `first_hop` in first-appearance order.
std::vector<EntityId> FirstHopEntities(std::span<const Triple> first_hop) {
  std::vector<EntityId> ids;
  std::unordered_set<std::string> seen;
  for (const Triple& t : first_hop) {
    if (t.object.kind == ObjectKind::kEntity && t.object.entity &&
        seen.insert(t.object.entity->str()).second) {
      ids.push_back(*t.object.entity);
    }
  }
  return ids;
}

using Positions = std::vector<std::pair<std::size_t, std::size_t>>;

std::vector<Triple> SecondHop(
    std::string_view text, std::span<const Triple> first_hop,
    const KnowledgeGraph& kg,
    const std::unordered_map<std::string, Positions>* subject_positions) {
  std::vector<Triple> result;
  const auto hubs = FirstHopEntities(first_hop);
  if (hubs.empty()) return result;

  MentionIndex index;
  NodeTable nodes(kg, &index);
  struct Candidate {
    const Triple* triple;
    const EntityId* hub;
    TripleNodes nodes;
  };
  std::vector<Candidate> candidates;
  for (const EntityId& hub : hubs) {
    for (const Triple& t : kg.Outgoing(hub)) {
      TripleNodes tn;
      tn.object = nodes.ForValue(t.object);
      if (t.qvalue) tn.qvalue = nodes.ForValue(*t.qvalue);
      candidates.push_back(Candidate{&t, &hub, tn});
    }
  }
  if (candidates.empty()) return result;
  index.Finalize();
  const auto spans = index.FindMentions(text);
  if (spans.empty()) return result;
  const auto by_node = SpansByNode(index, spans, nodes.size());

  for (const Candidate& c : candidates) {
    const SpanList& object_spans = by_node[c.nodes.object];
    if (object_spans.empty()) continue;
    if (c.nodes.qvalue && by_node[*c.nodes.qvalue].empty()) continue;
    // The object must be mentioned somewhere other than where the hub itself
    // was mentioned.
    if (subject_positions != nullptr) {
      auto it = subject_positions->find(c.hub->str());
      if (it != subject_positions->end()) {
        const bool distinct = std::any_of(
            object_spans.begin(), object_spans.end(), [&](std::size_t s) {
              return std::find(it->second.begin(), it->second.end(),
                               std::make_pair(spans[s].start, spans[s].end)) ==
                     it->second.end();
            });
        if (!distinct) continue;
      }
    }
    result.push_back(*c.triple);
  }
  return result;
}

const Entity& RequirePage(const KnowledgeGraph& kg, const Sentence& sentence) {
  const Entity* page = kg.FindEntity(sentence.page_id);
  if (page == nullptr) {
    throw SchemaError("unknown page id " + sentence.page_id.str());
  }
  return *page;
}

void AppendUnique(std::vector<TripleMatch>* matches,
                  std::unordered_set<std::string>* keys,
                  const std::vector<Triple>& triples, Hop hop) {
  for (const Triple& t : triples) {
    if (keys->insert(TripleKey(t)).second) {
      matches->push_back(TripleMatch{t, hop, std::nullopt});
    }
  }
}

enum class Outcome { kEmitted, kNoMatch, kUnknownPage };

struct SlotResult {
  Outcome outcome = Outcome::kNoMatch;
  AlignedExample example{"", Sentence{EntityId("_"), "", "", 0}, {}};
  std::size_t first = 0;
  std::size_t second = 0;
};

}  // namespace

std::vector<Triple> FirstHopAlign(const Sentence& sentence,
                                  const KnowledgeGraph& kg,
                                  const AlignOptions& options) {
  const PageAligner aligner(kg, RequirePage(kg, sentence));
  return aligner.Align(NormalizeSpace(sentence.text),
                       options.require_subject_mention)
      .triples;
}

std::vector<Triple> SecondHopAlign(const Sentence& sentence,
                                   std::span<const Triple> first_hop,
                                   const KnowledgeGraph& kg) {
  const std::string text = NormalizeSpace(sentence.text);
  const PageAligner aligner(kg, RequirePage(kg, sentence));
  const auto positions = aligner.Align(text, false).object_positions;
  std::unordered_set<std::string> keys;
  for (const Triple& t : first_hop) keys.insert(TripleKey(t));
  std::vector<Triple> result;
  for (Triple& t : SecondHop(text, first_hop, kg, &positions)) {
    if (keys.insert(TripleKey(t)).second) result.push_back(std::move(t));
  }
  return result;
}

Dataset AlignCorpus(const KnowledgeGraph& kg, std::span<const Sentence> corpus,
                    const AlignOptions& options, AlignStats* stats) {
  std::vector<SlotResult> slots(corpus.size());

  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (corpus.size() + kChunk - 1) / kChunk;
  std::atomic<std::size_t> next_chunk{0};

  auto worker = [&]() {
    std::optional<PageAligner> cached;
    for (std::size_t chunk = next_chunk++; chunk < chunks;
         chunk = next_chunk++) {
      const std::size_t end = std::min(corpus.size(), (chunk + 1) * kChunk);
      for (std::size_t i = chunk * kChunk; i < end; ++i) {
        const Sentence& sentence = corpus[i];
        SlotResult& slot = slots[i];
        const Entity* page = kg.FindEntity(sentence.page_id);
        if (page == nullptr) {
          slot.outcome = Outcome::kUnknownPage;
          continue;
        }
        if (!cached || cached->page_id() != page->id) {
          cached.reset();
          cached.emplace(kg, *page);
        }
        const std::string text = NormalizeSpace(sentence.text);
        auto first =
            cached->Align(text, options.require_subject_mention);
        std::vector<TripleMatch> matches;
        std::unordered_set<std::string> keys;
        AppendUnique(&matches, &keys, first.triples, Hop::kFirst);
        slot.first = matches.size();
        if (options.second_hop) {
          AppendUnique(&matches, &keys,
                       SecondHop(text, first.triples, kg,
                                 &first.object_positions),
                       Hop::kSecond);
        }
        slot.second = matches.size() - slot.first;
        if (matches.empty()) {
          slot.outcome = Outcome::kNoMatch;
          continue;
        }
        slot.outcome = Outcome::kEmitted;
        Sentence normalized = sentence;
        normalized.text = text;
        slot.example = AlignedExample{"", std::move(normalized),
                                      std::move(matches)};
      }
    }
  };

  unsigned threads = options.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, std::max<std::size_t>(1, chunks)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  AlignStats local;
  local.sentences = corpus.size();
  Dataset dataset;
  std::unordered_map<std::string, std::size_t> id_uses;
  for (auto& slot : slots) {
    switch (slot.outcome) {
      case Outcome::kUnknownPage:
        ++local.unknown_page;
        continue;
      case Outcome::kNoMatch:
        ++local.no_match;
        continue;
      case Outcome::kEmitted:
        break;
    }
    ++local.emitted;
    local.first_hop_triples += slot.first;
    local.second_hop_triples += slot.second;
    std::string id = slot.example.sentence.page_id.str() + "_" +
                     std::to_string(slot.example.sentence.index);
    if (const std::size_t uses = id_uses[id]++; uses > 0) {
      id += "#" + std::to_string(uses);
    }
    slot.example.id = std::move(id);
    dataset.push_back(std::move(slot.example));
  }
  if (stats) *stats = local;
  return dataset;
}

}  // namespace kgt
