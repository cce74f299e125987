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

// Token-delimited graph format exchanged with generator models:
//
//   graph   := ""  |  segment (" <sep> " segment)*
//   segment := "<S> " s " <P> " p " <O> " o [" <Q> " q " <T> " t]
//
// Fields are whitespace-normalized and never contain a reserved token.

#ifndef KGT_LINEARIZ_H_
#define KGT_LINEARIZ_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgt/kgtypes.h"

namespace kgt {

// Throws SchemaError naming the field and token when a field contains a
// reserved token.
std::string SerializeGraph(std::span<const Triple> graph);

struct ParseDiagnostics {
  std::size_t malformed_segments = 0;
  std::vector<std::string> messages;
};

struct ParsedGraph {
  std::vector<Triple> triples;
  ParseDiagnostics diagnostics;

  std::size_t segment_count() const {
    return triples.size() + diagnostics.malformed_segments;
  }
};

// Total: never throws. Malformed segments are skipped and counted. Parsed
// objects and qualifier values are plain strings.
ParsedGraph ParseGraph(std::string_view text);

enum class Task {
  kGraphToText,
  kTextToGraph,
};

inline constexpr std::string_view kGraphToTextPrefix = "graph_to_text: ";
inline constexpr std::string_view kTextToGraphPrefix = "text_to_graph: ";

std::string_view TaskPrefix(Task task);
std::string WithPrefix(Task task, std::string_view payload);
// Removes the task prefix when present; otherwise returns `text` unchanged.
std::string StripPrefix(Task task, std::string_view text);

}  // namespace kgt

#endif  // KGT_LINEARIZ_H_
