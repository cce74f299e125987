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

// Clients for the external models: an entailment scorer, a text generator and
// a scorer trainer. Each speaks one wire protocol in two framings:
//
//   scorer     request  {"id","premise","hypothesis","model_version"?}
//              response {"id","prob_entail"}           POST /score
//   generator  request  {"id","input"}
//              response {"id","output"}                POST /generate
//   trainer    request  {"dataset_path","batch_size","head_only":true}
//              response {"model_version"}              POST /finetune
//
// HTTP mode sends a JSON array of requests and expects a JSON array back.
// File mode writes request JSONL, runs a shell command, and reads response
// JSONL. Responses are joined to requests by id, so order does not matter.

#ifndef KGT_ENDPOINTS_H_
#define KGT_ENDPOINTS_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kgt {

struct ScoreRequest {
  std::string id;
  std::string premise;
  std::string hypothesis;

  friend bool operator==(const ScoreRequest&, const ScoreRequest&) = default;
};

struct ScoreResponse {
  std::string id;
  double prob_entail = 0.0;
};

struct GenerateRequest {
  std::string id;
  std::string input;
};

struct GenerateResponse {
  std::string id;
  std::string output;
};

struct FinetuneRequest {
  std::string dataset_path;
  std::size_t batch_size = 2048;
  bool head_only = true;
};

enum class Framing {
  kJsonl,      // one object per line
  kJsonArray,  // a single JSON array
};

// Wire codecs. Parsers throw SchemaError on malformed input.
std::string EncodeScoreRequests(std::span<const ScoreRequest> requests,
                                const std::optional<std::string>& model_version,
                                Framing framing);
std::vector<ScoreRequest> DecodeScoreRequests(std::string_view text,
                                              Framing framing);
std::string EncodeScoreResponses(std::span<const ScoreResponse> responses,
                                 Framing framing);
std::vector<ScoreResponse> DecodeScoreResponses(std::string_view text,
                                                Framing framing);
std::string EncodeGenerateRequests(std::span<const GenerateRequest> requests,
                                   Framing framing);
std::vector<GenerateRequest> DecodeGenerateRequests(std::string_view text,
                                                    Framing framing);
std::string EncodeGenerateResponses(std::span<const GenerateResponse> responses,
                                    Framing framing);
std::vector<GenerateResponse> DecodeGenerateResponses(std::string_view text,
                                                      Framing framing);
std::string EncodeFinetuneRequest(const FinetuneRequest& request);
FinetuneRequest DecodeFinetuneRequest(std::string_view text);
// Returns the "model_version" field; throws SchemaError when it is missing
// or empty.
std::string DecodeFinetuneResponse(std::string_view text);

// "http://host[:port][/prefix]" split into the part httplib connects to and
// the path prefix prepended to every route. Throws UsageError on other
// schemes.
struct HttpLocation {
  std::string origin;
  std::string path_prefix;
};
HttpLocation ParseHttpLocation(std::string_view url);

// Replaces every "{name}" in `command` with the shell-quoted value.
std::string ExpandCommand(
    std::string_view command,
    std::span<const std::pair<std::string_view, std::string>> values);

class EntailmentScorer {
 public:
  virtual ~EntailmentScorer() = default;

  // Scores one batch. Responses may arrive in any order and may be
  // incomplete; ScoreAll validates them. Throws EndpointError on transport
  // failure.
  virtual std::vector<ScoreResponse> ScoreBatch(
      std::span<const ScoreRequest> batch) = 0;

  // Pins later requests to a trained model version; nullopt means the
  // service default.
  void PinModelVersion(std::optional<std::string> version) {
    model_version_ = std::move(version);
  }
  const std::optional<std::string>& model_version() const {
    return model_version_;
  }

 private:
  std::optional<std::string> model_version_;
};

class TextGenerator {
 public:
  virtual ~TextGenerator() = default;
  virtual std::vector<GenerateResponse> GenerateBatch(
      std::span<const GenerateRequest> batch) = 0;
};

class ScorerTrainer {
 public:
  virtual ~ScorerTrainer() = default;
  // Returns the new model version. Throws EndpointError on failure.
  virtual std::string Finetune(const FinetuneRequest& request) = 0;
};

struct HttpOptions {
  int connect_timeout_seconds = 10;
  int read_timeout_seconds = 600;
};

class HttpScorer : public EntailmentScorer {
 public:
  explicit HttpScorer(std::string url, HttpOptions options = {});
  std::vector<ScoreResponse> ScoreBatch(
      std::span<const ScoreRequest> batch) override;

 private:
  HttpLocation location_;
  HttpOptions options_;
};

class HttpGenerator : public TextGenerator {
 public:
  explicit HttpGenerator(std::string url, HttpOptions options = {});
  std::vector<GenerateResponse> GenerateBatch(
      std::span<const GenerateRequest> batch) override;

 private:
  HttpLocation location_;
  HttpOptions options_;
};

class HttpTrainer : public ScorerTrainer {
 public:
  explicit HttpTrainer(std::string url, HttpOptions options = {});
  std::string Finetune(const FinetuneRequest& request) override;

 private:
  HttpLocation location_;
  HttpOptions options_;
};

// File-mode clients. The command template may use {in} and {out}; the
// trainer template uses {data}, {batch} and {out} and must write the new
// version string to {out}. Scratch files live under `workdir` (the system
// temp directory when empty) and are removed afterwards. A non-zero exit
// status is an EndpointError.
class CommandScorer : public EntailmentScorer {
 public:
  explicit CommandScorer(std::string command, std::string workdir = "");
  std::vector<ScoreResponse> ScoreBatch(
      std::span<const ScoreRequest> batch) override;

 private:
  std::string command_;
  std::string workdir_;
};

class CommandGenerator : public TextGenerator {
 public:
  explicit CommandGenerator(std::string command, std::string workdir = "");
  std::vector<GenerateResponse> GenerateBatch(
      std::span<const GenerateRequest> batch) override;

 private:
  std::string command_;
  std::string workdir_;
};

class CommandTrainer : public ScorerTrainer {
 public:
  explicit CommandTrainer(std::string command, std::string workdir = "");
  std::string Finetune(const FinetuneRequest& request) override;

 private:
  std::string command_;
  std::string workdir_;
};

// In-process adapters over plain functions. They must be thread-safe when
// used with concurrency > 1.
class FunctionScorer : public EntailmentScorer {
 public:
  using Fn = std::function<double(const ScoreRequest&,
                                  const std::optional<std::string>& version)>;
  explicit FunctionScorer(Fn fn) : fn_(std::move(fn)) {}
  std::vector<ScoreResponse> ScoreBatch(
      std::span<const ScoreRequest> batch) override;

 private:
  Fn fn_;
};

class FunctionGenerator : public TextGenerator {
 public:
  using Fn = std::function<std::string(std::string_view input)>;
  explicit FunctionGenerator(Fn fn) : fn_(std::move(fn)) {}
  std::vector<GenerateResponse> GenerateBatch(
      std::span<const GenerateRequest> batch) override;

 private:
  Fn fn_;
};

class FunctionTrainer : public ScorerTrainer {
 public:
  using Fn = std::function<std::string(const FinetuneRequest&)>;
  explicit FunctionTrainer(Fn fn) : fn_(std::move(fn)) {}
  std::string Finetune(const FinetuneRequest& request) override {
    return fn_(request);
  }

 private:
  Fn fn_;
};

struct ClientOptions {
  std::size_t batch_size = 64;
  // Attempts per batch, including the first.
  int max_attempts = 3;
  // Batches in flight at once.
  unsigned concurrency = 1;
};

// Scores every request and returns probabilities in request order. Request
// ids must be unique. A batch whose response misses an id, repeats one,
// adds an unknown one, or carries a value outside [0, 1] counts as failed;
// after max_attempts the call throws EndpointError naming the batch.
std::vector<double> ScoreAll(EntailmentScorer& scorer,
                             std::span<const ScoreRequest> requests,
                             const ClientOptions& options = {});

// Same contract for generation; returns outputs in request order.
std::vector<std::string> GenerateAll(TextGenerator& generator,
                                     std::span<const GenerateRequest> requests,
                                     const ClientOptions& options = {});

// Convenience wrapper that assigns ids "0", "1", ... to raw inputs.
std::vector<std::string> GenerateTexts(TextGenerator& generator,
                                       std::span<const std::string> inputs,
                                       const ClientOptions& options = {});

}  // namespace kgt

#endif  // KGT_ENDPOINTS_H_
