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

// JSONL readers and writers for sentence corpora, aligned datasets and
// annotated pairs.
//
// Aligned dataset record (keys in this order):
//   {"schema_version":"1","id":..,"qid":..,"title":..,"text":..,
//    "triples":[{"s":..,"p":..,"o":..,"q":..?,"t":..?,"hop":..,"score":..?,
//                "s_qid":..?,"o_kind":..?,"o_qid":..?,"t_kind":..?,
//                "t_qid":..?}],
//    "idx":..}
// The trailing keys are optional and omitted when they carry defaults
// ("string" kinds, no ids, idx 0); they make load/save lossless.

#ifndef KGT_DATASET_IO_H_
#define KGT_DATASET_IO_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "kgt/kgtypes.h"

namespace kgt {

inline constexpr std::string_view kSchemaVersion = "1";

void WriteDataset(const Dataset& dataset, std::ostream& out);
void SaveDataset(const Dataset& dataset, const std::filesystem::path& path);

// Throws SchemaError (with line number) on malformed records or a
// schema_version other than kSchemaVersion.
Dataset ReadDataset(std::istream& in, std::string_view source);
Dataset LoadDataset(const std::filesystem::path& path);

// Corpus JSONL: {"qid","title","idx","text"} per line.
std::vector<Sentence> ReadCorpus(std::istream& in, std::string_view source);
std::vector<Sentence> LoadCorpus(const std::filesystem::path& path);
void WriteCorpus(const std::vector<Sentence>& corpus, std::ostream& out);

// Annotated pairs JSONL: {"text","title","triple":{...},"label"} where label
// is "entailed" or "not".
std::vector<AnnotatedPair> ReadAnnotated(std::istream& in,
                                         std::string_view source);
std::vector<AnnotatedPair> LoadAnnotated(const std::filesystem::path& path);
void WriteAnnotated(const std::vector<AnnotatedPair>& pairs,
                    std::ostream& out);

// Compact single-line JSON for one triple ({"s","p","o","q"?,"t"?}); used by
// the CLI for per-example outputs.
std::string TripleToJson(const Triple& triple);

}  // namespace kgt

#endif  // KGT_DATASET_IO_H_
