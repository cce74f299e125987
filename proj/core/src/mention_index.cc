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

#include "kgt/mention_index.h"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "kgt/text.h"

namespace kgt {

void MentionIndex::Add(std::string_view surface, std::uint32_t target) {
  if (finalized_) throw std::logic_error("MentionIndex::Add after Finalize");
  std::string key = NormalizeKey(surface);
  if (key.empty()) return;
  auto [it, inserted] =
      by_surface_.emplace(key, static_cast<std::uint32_t>(surfaces_.size()));
  if (inserted) {
    surfaces_.push_back(std::move(key));
    targets_.emplace_back();
  }
  auto& targets = targets_[it->second];
  if (std::find(targets.begin(), targets.end(), target) == targets.end()) {
    targets.push_back(target);
  }
}

std::int32_t MentionIndex::Child(std::int32_t node, unsigned char c) const {
  const auto& next = nodes_[node].next;
  auto it = std::lower_bound(
      next.begin(), next.end(), c,
      [](const auto& edge, unsigned char key) { return edge.first < key; });
  if (it != next.end() && it->first == c) return it->second;
  return -1;
}

std::int32_t MentionIndex::Step(std::int32_t node, unsigned char c) const {
  while (true) {
    const std::int32_t child = Child(node, c);
    if (child >= 0) return child;
    if (node == 0) return 0;
    node = nodes_[node].fail;
  }
}

void MentionIndex::Finalize() {
  if (finalized_) return;
  finalized_ = true;
  nodes_.assign(1, Node{});

  for (std::uint32_t p = 0; p < surfaces_.size(); ++p) {
    std::int32_t node = 0;
    for (char ch : surfaces_[p]) {
      const auto c = static_cast<unsigned char>(ch);
      std::int32_t child = Child(node, c);
      if (child < 0) {
        child = static_cast<std::int32_t>(nodes_.size());
        Node fresh;
        fresh.depth = nodes_[node].depth + 1;
        nodes_.push_back(std::move(fresh));
        auto& next = nodes_[node].next;
        next.insert(std::upper_bound(next.begin(), next.end(),
                                     std::make_pair(c, child),
                                     [](const auto& a, const auto& b) {
                                       return a.first < b.first;
                                     }),
                    std::make_pair(c, child));
      }
      node = child;
    }
    nodes_[node].pattern = static_cast<std::int32_t>(p);
  }

  // Breadth-first failure links.
  std::deque<std::int32_t> queue;
  for (const auto& [c, child] : nodes_[0].next) {
    nodes_[child].fail = 0;
    queue.push_back(child);
  }
  while (!queue.empty()) {
    const std::int32_t node = queue.front();
    queue.pop_front();
    for (const auto& [c, child] : nodes_[node].next) {
      std::int32_t f = nodes_[node].fail;
      std::int32_t target = Child(f, c);
      while (target < 0 && f != 0) {
        f = nodes_[f].fail;
        target = Child(f, c);
      }
      nodes_[child].fail = target < 0 ? 0 : target;
      const auto& fail_node = nodes_[nodes_[child].fail];
      nodes_[child].output_link =
          fail_node.pattern >= 0 ? nodes_[child].fail : fail_node.output_link;
      queue.push_back(child);
    }
  }
}

std::vector<MatchSpan> MentionIndex::FindMentions(std::string_view text) const {
  if (!finalized_) {
    throw std::logic_error("MentionIndex::FindMentions before Finalize");
  }
  std::vector<MatchSpan> spans;
  if (surfaces_.empty() || text.empty()) return spans;

  // Longest valid pattern starting at each offset.
  std::vector<std::uint32_t> best_len(text.size(), 0);
  std::vector<std::uint32_t> best_pattern(text.size(), 0);

  std::int32_t node = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    node = Step(node, static_cast<unsigned char>(FoldChar(text[i])));
    const std::size_t end = i + 1;
    for (std::int32_t out = nodes_[node].pattern >= 0 ? node
                                                      : nodes_[node].output_link;
         out >= 0; out = nodes_[out].output_link) {
      const std::uint32_t len = nodes_[out].depth;
      const std::size_t start = end - len;
      const bool left_ok =
          !IsWordCharAt(text, start) || !IsWordCharBefore(text, start);
      const bool right_ok =
          !IsWordCharBefore(text, end) || !IsWordCharAt(text, end);
      if (left_ok && right_ok && len > best_len[start]) {
        best_len[start] = len;
        best_pattern[start] = static_cast<std::uint32_t>(nodes_[out].pattern);
      }
    }
  }

  for (std::size_t pos = 0; pos < text.size();) {
    if (best_len[pos] == 0) {
      ++pos;
      continue;
    }
    spans.push_back(MatchSpan{pos, pos + best_len[pos], best_pattern[pos]});
    pos += best_len[pos];
  }
  return spans;
}

}  // namespace kgt
