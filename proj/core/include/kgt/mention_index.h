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

#ifndef KGT_MENTION_INDEX_H_
#define KGT_MENTION_INDEX_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgt {

struct MatchSpan {
  // Byte offsets into the whitespace-normalized text, end exclusive.
  std::size_t start = 0;
  std::size_t end = 0;
  std::uint32_t pattern = 0;

  friend bool operator==(const MatchSpan&, const MatchSpan&) = default;
};

// Multi-pattern matcher over normalized, case-folded surface strings. Each
// surface is stored once and maps to the caller-defined target ids added
// under it. Matching is an Aho-Corasick scan; results are the leftmost-longest
// non-overlapping occurrences that sit on word boundaries.
//
// Add() surfaces, then Finalize() once; the index is read-only (and safe to
// share across threads) afterwards.
class MentionIndex {
 public:
  MentionIndex() = default;

  // Empty (after normalization) surfaces are ignored. Adding the same target
  // twice under one surface is a no-op.
  void Add(std::string_view surface, std::uint32_t target);

  // Builds the automaton. Further Add() calls throw std::logic_error.
  void Finalize();

  // `text` must already be whitespace-normalized; case is folded here.
  // Results are ordered by start offset. Throws std::logic_error before
  // Finalize().
  std::vector<MatchSpan> FindMentions(std::string_view text) const;

  std::size_t pattern_count() const { return surfaces_.size(); }
  const std::string& surface(std::uint32_t pattern) const {
    return surfaces_[pattern];
  }
  std::span<const std::uint32_t> targets(std::uint32_t pattern) const {
    return targets_[pattern];
  }

 private:
  struct Node {
    // Sorted by byte.
    std::vector<std::pair<unsigned char, std::int32_t>> next;
    std::int32_t fail = 0;
    // Nearest proper suffix node that ends a pattern, -1 if none.
    std::int32_t output_link = -1;
    std::int32_t pattern = -1;
    std::uint32_t depth = 0;
  };

  std::int32_t Step(std::int32_t node, unsigned char c) const;
  std::int32_t Child(std::int32_t node, unsigned char c) const;

  std::vector<std::string> surfaces_;
  std::vector<std::vector<std::uint32_t>> targets_;
  std::unordered_map<std::string, std::uint32_t> by_surface_;
  std::vector<Node> nodes_;
  bool finalized_ = false;
};

}  // namespace kgt

#endif  // KGT_MENTION_INDEX_H_
