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

// String-matching alignment of sentences to KG triples.
//
// First hop: triples of the sentence's page entity whose subject (title or
// alias) and object (title, alias, or literal rendering) are both mentioned.
// Second hop: triples of entities that were first-hop objects, whose object is
// mentioned. No predicate check happens here; that is the entailment filter's
// job.

#ifndef KGT_ALIGN_H_
#define KGT_ALIGN_H_

#include <cstddef>
#include <span>
#include <vector>

#include "kgt/kgtypes.h"

namespace kgt {

struct AlignOptions {
  bool second_hop = true;
  // When false, first-hop matching only requires the object mention.
  bool require_subject_mention = true;
  // Worker threads for AlignCorpus; 0 means hardware concurrency.
  unsigned threads = 0;
};

// Throws SchemaError when the sentence's page is not in `kg`.
std::vector<Triple> FirstHopAlign(const Sentence& sentence,
                                  const KnowledgeGraph& kg,
                                  const AlignOptions& options = {});

// `first_hop` is the FirstHopAlign() result for the same sentence.
std::vector<Triple> SecondHopAlign(const Sentence& sentence,
                                   std::span<const Triple> first_hop,
                                   const KnowledgeGraph& kg);

struct AlignStats {
  std::size_t sentences = 0;
  std::size_t unknown_page = 0;
  std::size_t no_match = 0;
  std::size_t emitted = 0;
  std::size_t first_hop_triples = 0;
  std::size_t second_hop_triples = 0;

  std::size_t dropped() const { return unknown_page + no_match; }
};

// Aligns every sentence; sentences without matches (or with unknown pages)
// are dropped and counted. Output order follows corpus order and does not
// depend on the thread count.
Dataset AlignCorpus(const KnowledgeGraph& kg, std::span<const Sentence> corpus,
                    const AlignOptions& options = {},
                    AlignStats* stats = nullptr);

}  // namespace kgt

#endif  // KGT_ALIGN_H_
