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

// Private JSON helpers shared by the library's readers and writers.

#ifndef KGT_SRC_JSON_CODEC_H_
#define KGT_SRC_JSON_CODEC_H_

#include <string>
#include <string_view>

#include "json.hpp"
#include "kgt/kgtypes.h"

namespace kgt::internal {

using Json = nlohmann::ordered_json;

// Parses one line; wraps nlohmann parse errors into SchemaError.
Json ParseJsonLine(std::string_view line);

// Typed field accessors that throw SchemaError naming the missing key.
const Json& Require(const Json& obj, std::string_view key);
std::string RequireString(const Json& obj, std::string_view key);
std::string OptionalString(const Json& obj, std::string_view key,
                           std::string fallback = "");

EntityRecord ParseEntityRecord(std::string_view line);

// {"s","p","o","q"?,"t"?} plus the lossless extension keys.
Json TripleToJson(const Triple& triple);
Triple TripleFromJson(const Json& obj);

// Serializes with the compact separators used for every JSONL artifact.
std::string Dump(const Json& value);

}  // namespace kgt::internal

#endif  // KGT_SRC_JSON_CODEC_H_
