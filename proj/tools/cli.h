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

// The `kgt` command-line tool, callable in-process for tests.

#ifndef KGT_TOOLS_CLI_H_
#define KGT_TOOLS_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "kgt/endpoints.h"

namespace kgt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSchema = 3;
inline constexpr int kExitEndpoint = 4;
inline constexpr int kExitInternal = 5;

// Parses `args` (without the program name), runs one subcommand, and returns
// the exit code. Never throws.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// Endpoint specs:
//   http://host:port[/prefix]   HTTP service
//   cmd:<template>              file-mode command ({in}, {out})
//   const:<p>                   scorer returning p for every request
//   mock:<dataset.jsonl>        retrieval generator trained on a dataset
//   echo:<dataset.jsonl>        echo oracle over a dataset's pairs
// Throws UsageError on an unknown spec.
std::unique_ptr<EntailmentScorer> MakeScorer(std::string_view spec,
                                             const std::string& workdir);
std::unique_ptr<TextGenerator> MakeGenerator(std::string_view spec, bool g2t,
                                             const std::string& workdir);
std::unique_ptr<ScorerTrainer> MakeTrainer(std::string_view spec,
                                           const std::string& workdir);

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string Fnv1aHex(std::string_view data);

}  // namespace kgt::cli

#endif  // KGT_TOOLS_CLI_H_
