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

#include "kgt/lineariz.h"

#include <array>
#include <optional>

#include "kgt/error.h"
#include "kgt/text.h"

namespace kgt {
namespace {

constexpr std::string_view kSep = "<sep>";

std::string CheckedField(std::string_view value, std::string_view field) {
  if (auto token = FindReservedToken(value)) {
    throw SchemaError("cannot serialize " + std::string(field) +
                      " containing reserved token " + std::string(*token) +
                      ": \"" + std::string(value) + "\"");
  }
  return NormalizeSpace(value);
}

struct Marker {
  std::string_view token;
  std::size_t pos = std::string_view::npos;
};

std::optional<std::string> ParseSegment(std::string_view segment,
                                        Triple* out) {
  // Expected marker order; <Q> and <T> are optional but paired.
  std::array<Marker, 5> markers = {Marker{"<S>"}, Marker{"<P>"}, Marker{"<O>"},
                                   Marker{"<Q>"}, Marker{"<T>"}};
  for (auto& m : markers) {
    m.pos = segment.find(m.token);
    if (m.pos != std::string_view::npos &&
        segment.find(m.token, m.pos + 1) != std::string_view::npos) {
      return "repeated " + std::string(m.token);
    }
  }
  if (segment.find(kSep) != std::string_view::npos) return "stray <sep>";
  for (int i = 0; i < 3; ++i) {
    if (markers[i].pos == std::string_view::npos) {
      return "missing " + std::string(markers[i].token);
    }
  }
  const bool has_q = markers[3].pos != std::string_view::npos;
  const bool has_t = markers[4].pos != std::string_view::npos;
  if (has_q != has_t) return "unpaired <Q>/<T>";
  const int used = has_q ? 5 : 3;
  for (int i = 1; i < used; ++i) {
    if (markers[i].pos < markers[i - 1].pos) return "markers out of order";
  }
  if (!NormalizeSpace(segment.substr(0, markers[0].pos)).empty()) {
    return "text before <S>";
  }
  std::array<std::string, 5> fields;
  for (int i = 0; i < used; ++i) {
    const std::size_t begin = markers[i].pos + markers[i].token.size();
    const std::size_t end =
        i + 1 < used ? markers[i + 1].pos : segment.size();
    fields[i] = NormalizeSpace(segment.substr(begin, end - begin));
    if (fields[i].empty()) {
      return "empty field after " + std::string(markers[i].token);
    }
  }
  Triple triple = Triple::Simple(fields[0], fields[1], fields[2]);
  if (has_q) {
    triple.qualifier = fields[3];
    triple.qvalue = ObjectValue::String(fields[4]);
  }
  *out = std::move(triple);
  return std::nullopt;
}

}  // namespace

std::string SerializeGraph(std::span<const Triple> graph) {
  std::string out;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    const Triple& t = graph[i];
    if (i > 0) out += " <sep> ";
    out += "<S> " + CheckedField(t.subject, "subject");
    out += " <P> " + CheckedField(t.predicate, "predicate");
    out += " <O> " + CheckedField(t.object.surface, "object");
    if (t.qualifier) {
      out += " <Q> " + CheckedField(*t.qualifier, "qualifier");
      out += " <T> " +
             CheckedField(t.qvalue ? t.qvalue->surface : "", "qualifier value");
    }
  }
  return out;
}

ParsedGraph ParseGraph(std::string_view text) {
  ParsedGraph result;
  if (NormalizeSpace(text).empty()) return result;
  std::size_t begin = 0;
  std::size_t index = 0;
  while (true) {
    const std::size_t sep = text.find(kSep, begin);
    const std::string_view segment = text.substr(
        begin, sep == std::string_view::npos ? std::string_view::npos
                                             : sep - begin);
    Triple triple;
    if (auto error = ParseSegment(segment, &triple)) {
      ++result.diagnostics.malformed_segments;
      result.diagnostics.messages.push_back(
          "segment " + std::to_string(index) + ": " + *error);
    } else {
      result.triples.push_back(std::move(triple));
    }
    ++index;
    if (sep == std::string_view::npos) break;
    begin = sep + kSep.size();
  }
  return result;
}

std::string_view TaskPrefix(Task task) {
  return task == Task::kGraphToText ? kGraphToTextPrefix : kTextToGraphPrefix;
}

std::string WithPrefix(Task task, std::string_view payload) {
  std::string out(TaskPrefix(task));
  out += payload;
  return out;
}

std::string StripPrefix(Task task, std::string_view text) {
  const std::string_view prefix = TaskPrefix(task);
  if (StartsWith(text, prefix)) text.remove_prefix(prefix.size());
  return std::string(text);
}

}  // namespace kgt
