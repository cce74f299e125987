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

#include "kgt/endpoints.h"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "httplib.h"
#include "json_codec.h"
#include "kgt/error.h"
#include "kgt/text.h"

namespace kgt {
namespace {

using internal::Json;

template <typename T, typename ToJson>
std::string EncodeRecords(std::span<const T> records, Framing framing,
                          ToJson to_json) {
  if (framing == Framing::kJsonArray) {
    Json array = Json::array();
    for (const T& r : records) array.push_back(to_json(r));
    return internal::Dump(array);
  }
  std::string out;
  for (const T& r : records) {
    out += internal::Dump(to_json(r));
    out += '\n';
  }
  return out;
}

template <typename FromJson>
auto DecodeRecords(std::string_view text, Framing framing, FromJson from_json)
    -> std::vector<decltype(from_json(std::declval<const Json&>()))> {
  std::vector<decltype(from_json(std::declval<const Json&>()))> out;
  auto decode_one = [&](const Json& obj, std::size_t index) {
    if (!obj.is_object()) {
      throw SchemaError("record " + std::to_string(index) +
                        " is not a JSON object");
    }
    try {
      out.push_back(from_json(obj));
    } catch (const SchemaError& e) {
      throw SchemaError("record " + std::to_string(index) + ": " + e.what());
    }
  };
  if (framing == Framing::kJsonArray) {
    Json array;
    try {
      array = Json::parse(text);
    } catch (const Json::exception& e) {
      throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    if (!array.is_array()) throw SchemaError("expected a JSON array");
    for (std::size_t i = 0; i < array.size(); ++i) decode_one(array[i], i);
    return out;
  }
  std::size_t index = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(begin, end - begin);
    if (!NormalizeSpace(line).empty()) {
      Json obj;
      try {
        obj = Json::parse(line);
      } catch (const Json::exception& e) {
        throw SchemaError("record " + std::to_string(index) +
                          ": invalid JSON: " + e.what());
      }
      decode_one(obj, index);
      ++index;
    }
    begin = end + 1;
  }
  return out;
}

double RequireNumber(const Json& obj, std::string_view key) {
  const Json& value = internal::Require(obj, key);
  if (!value.is_number()) {
    throw SchemaError("key \"" + std::string(key) + "\" must be a number");
  }
  return value.get<double>();
}

std::string ShellQuote(std::string_view value) {
  std::string out = "'";
  for (char c : value) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out.push_back(c);
    }
  }
  out.push_back('\'');
  return out;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EndpointError("missing response file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw EndpointError("cannot write " + path.string());
}

// Unique scratch paths for one command invocation, removed on destruction.
class Scratch {
 public:
  explicit Scratch(const std::string& workdir) {
    static std::atomic<std::uint64_t> counter{0};
    const std::filesystem::path dir =
        workdir.empty() ? std::filesystem::temp_directory_path()
                        : std::filesystem::path(workdir);
    std::filesystem::create_directories(dir);
    stem_ = dir / ("kgt-" + std::to_string(::getpid()) + "-" +
                   std::to_string(counter.fetch_add(1)));
  }
  ~Scratch() {
    std::error_code ec;
    for (const auto& p : created_) std::filesystem::remove(p, ec);
  }

  std::filesystem::path Path(std::string_view suffix) {
    std::filesystem::path p = stem_;
    p += std::string(suffix);
    created_.push_back(p);
    return p;
  }

 private:
  std::filesystem::path stem_;
  std::vector<std::filesystem::path> created_;
};

void RunCommand(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1) throw EndpointError("cannot launch: " + command);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw EndpointError("command exited with status " +
                        std::to_string(WIFEXITED(status) ? WEXITSTATUS(status)
                                                         : status) +
                        ": " + command);
  }
}

std::string HttpPost(const HttpLocation& location, const HttpOptions& options,
                     std::string_view route, const std::string& body) {
  httplib::Client client(location.origin);
  client.set_connection_timeout(options.connect_timeout_seconds, 0);
  client.set_read_timeout(options.read_timeout_seconds, 0);
  client.set_write_timeout(options.read_timeout_seconds, 0);
  const std::string path = location.path_prefix + std::string(route);
  auto result = client.Post(path, body, "application/json");
  if (!result) {
    throw EndpointError("POST " + location.origin + path + ": " +
                        httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw EndpointError("POST " + location.origin + path + ": HTTP " +
                        std::to_string(result->status) + " " +
                        result->body.substr(0, 200));
  }
  return result->body;
}

// Runs fn(batch_index, begin, end) over consecutive batches with at most
// `concurrency` batches in flight. Rethrows the first failure.
template <typename Fn>
void ForEachBatch(std::size_t total, const ClientOptions& options, Fn fn) {
  if (total == 0) return;
  const std::size_t batch_size = std::max<std::size_t>(1, options.batch_size);
  const std::size_t batches = (total + batch_size - 1) / batch_size;
  std::atomic<std::size_t> next{0};
  std::mutex error_mu;
  std::exception_ptr error;
  auto worker = [&] {
    while (true) {
      {
        std::lock_guard<std::mutex> lock(error_mu);
        if (error) return;
      }
      const std::size_t b = next.fetch_add(1);
      if (b >= batches) return;
      try {
        const std::size_t begin = b * batch_size;
        fn(b, begin, std::min(total, begin + batch_size));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(
      std::max(1u, options.concurrency), batches));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

template <typename Request>
void CheckUniqueIds(std::span<const Request> requests) {
  std::unordered_set<std::string_view> seen;
  for (const auto& r : requests) {
    if (!seen.insert(r.id).second) {
      throw std::invalid_argument("duplicate request id \"" + r.id + "\"");
    }
  }
}

// Joins responses to requests[begin, end) by id; returns an error message or
// an empty string.
template <typename Request, typename Response, typename Value, typename Get>
std::string JoinById(std::span<const Request> requests,
                     std::span<const Response> responses, Get get,
                     std::vector<Value>* out, std::size_t offset) {
  std::unordered_map<std::string_view, std::size_t> position;
  for (std::size_t i = 0; i < requests.size(); ++i) position[requests[i].id] = i;
  std::vector<bool> filled(requests.size(), false);
  for (const auto& r : responses) {
    auto it = position.find(r.id);
    if (it == position.end()) return "unknown response id \"" + r.id + "\"";
    if (filled[it->second]) return "repeated response id \"" + r.id + "\"";
    filled[it->second] = true;
    std::string error;
    (*out)[offset + it->second] = get(r, &error);
    if (!error.empty()) return error;
  }
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (!filled[i]) return "missing response for id \"" + requests[i].id + "\"";
  }
  return "";
}

template <typename Request, typename Value, typename Call>
std::vector<Value> RunAll(std::string_view what,
                          std::span<const Request> requests,
                          const ClientOptions& options, Call call) {
  CheckUniqueIds(requests);
  std::vector<Value> out(requests.size());
  const int attempts = std::max(1, options.max_attempts);
  ForEachBatch(requests.size(), options, [&](std::size_t b, std::size_t begin,
                                             std::size_t end) {
    const auto batch = requests.subspan(begin, end - begin);
    std::string last_error;
    for (int attempt = 0; attempt < attempts; ++attempt) {
      try {
        last_error = call(batch, &out, begin);
      } catch (const std::exception& e) {
        last_error = e.what();
      }
      if (last_error.empty()) return;
    }
    throw EndpointError(std::string(what) + " batch " + std::to_string(b) +
                        " (ids \"" + batch.front().id + "\"..\"" +
                        batch.back().id + "\", " +
                        std::to_string(batch.size()) + " requests) failed after " +
                        std::to_string(attempts) + " attempts: " + last_error);
  });
  return out;
}

}  // namespace

std::string EncodeScoreRequests(std::span<const ScoreRequest> requests,
                                const std::optional<std::string>& model_version,
                                Framing framing) {
  return EncodeRecords(requests, framing, [&](const ScoreRequest& r) {
    Json obj = {{"id", r.id}, {"premise", r.premise}, {"hypothesis", r.hypothesis}};
    if (model_version) obj["model_version"] = *model_version;
    return obj;
  });
}

std::vector<ScoreRequest> DecodeScoreRequests(std::string_view text,
                                              Framing framing) {
  return DecodeRecords(text, framing, [](const Json& obj) {
    return ScoreRequest{internal::RequireString(obj, "id"),
                        internal::RequireString(obj, "premise"),
                        internal::RequireString(obj, "hypothesis")};
  });
}

std::string EncodeScoreResponses(std::span<const ScoreResponse> responses,
                                 Framing framing) {
  return EncodeRecords(responses, framing, [](const ScoreResponse& r) {
    return Json{{"id", r.id}, {"prob_entail", r.prob_entail}};
  });
}

std::vector<ScoreResponse> DecodeScoreResponses(std::string_view text,
                                                Framing framing) {
  return DecodeRecords(text, framing, [](const Json& obj) {
    return ScoreResponse{internal::RequireString(obj, "id"),
                         RequireNumber(obj, "prob_entail")};
  });
}

std::string EncodeGenerateRequests(std::span<const GenerateRequest> requests,
                                   Framing framing) {
  return EncodeRecords(requests, framing, [](const GenerateRequest& r) {
    return Json{{"id", r.id}, {"input", r.input}};
  });
}

std::vector<GenerateRequest> DecodeGenerateRequests(std::string_view text,
                                                    Framing framing) {
  return DecodeRecords(text, framing, [](const Json& obj) {
    return GenerateRequest{internal::RequireString(obj, "id"),
                           internal::RequireString(obj, "input")};
  });
}

std::string EncodeGenerateResponses(std::span<const GenerateResponse> responses,
                                    Framing framing) {
  return EncodeRecords(responses, framing, [](const GenerateResponse& r) {
    return Json{{"id", r.id}, {"output", r.output}};
  });
}

std::vector<GenerateResponse> DecodeGenerateResponses(std::string_view text,
                                                      Framing framing) {
  return DecodeRecords(text, framing, [](const Json& obj) {
    return GenerateResponse{internal::RequireString(obj, "id"),
                            internal::RequireString(obj, "output")};
  });
}

std::string EncodeFinetuneRequest(const FinetuneRequest& request) {
  return internal::Dump(Json{{"dataset_path", request.dataset_path},
                             {"batch_size", request.batch_size},
                             {"head_only", request.head_only}});
}

FinetuneRequest DecodeFinetuneRequest(std::string_view text) {
  const Json obj = internal::ParseJsonLine(text);
  FinetuneRequest request;
  request.dataset_path = internal::RequireString(obj, "dataset_path");
  const Json& batch = internal::Require(obj, "batch_size");
  if (!batch.is_number_unsigned() || batch.get<std::size_t>() == 0) {
    throw SchemaError("batch_size must be a positive integer");
  }
  request.batch_size = batch.get<std::size_t>();
  auto head = obj.find("head_only");
  if (head != obj.end()) {
    if (!head->is_boolean()) throw SchemaError("head_only must be a boolean");
    request.head_only = head->get<bool>();
  }
  return request;
}

std::string DecodeFinetuneResponse(std::string_view text) {
  const Json obj = internal::ParseJsonLine(text);
  std::string version = NormalizeSpace(internal::RequireString(obj, "model_version"));
  if (version.empty()) throw SchemaError("empty model_version");
  return version;
}

HttpLocation ParseHttpLocation(std::string_view url) {
  constexpr std::string_view kScheme = "http://";
  if (!StartsWith(url, kScheme)) {
    throw UsageError("unsupported endpoint URL \"" + std::string(url) +
                     "\" (expected http://host[:port][/prefix])");
  }
  const std::size_t slash = url.find('/', kScheme.size());
  HttpLocation location;
  location.origin = std::string(url.substr(0, slash));
  if (location.origin.size() == kScheme.size()) {
    throw UsageError("endpoint URL has no host: \"" + std::string(url) + "\"");
  }
  if (slash != std::string_view::npos) {
    location.path_prefix = std::string(url.substr(slash));
    while (!location.path_prefix.empty() && location.path_prefix.back() == '/') {
      location.path_prefix.pop_back();
    }
  }
  return location;
}

std::string ExpandCommand(
    std::string_view command,
    std::span<const std::pair<std::string_view, std::string>> values) {
  std::string out;
  std::size_t i = 0;
  while (i < command.size()) {
    bool replaced = false;
    if (command[i] == '{') {
      for (const auto& [name, value] : values) {
        const std::size_t len = name.size() + 2;
        if (command.substr(i, len) == "{" + std::string(name) + "}") {
          out += ShellQuote(value);
          i += len;
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out.push_back(command[i++]);
  }
  return out;
}

HttpScorer::HttpScorer(std::string url, HttpOptions options)
    : location_(ParseHttpLocation(url)), options_(options) {}

std::vector<ScoreResponse> HttpScorer::ScoreBatch(
    std::span<const ScoreRequest> batch) {
  const std::string body =
      EncodeScoreRequests(batch, model_version(), Framing::kJsonArray);
  return DecodeScoreResponses(HttpPost(location_, options_, "/score", body),
                              Framing::kJsonArray);
}

HttpGenerator::HttpGenerator(std::string url, HttpOptions options)
    : location_(ParseHttpLocation(url)), options_(options) {}

std::vector<GenerateResponse> HttpGenerator::GenerateBatch(
    std::span<const GenerateRequest> batch) {
  const std::string body = EncodeGenerateRequests(batch, Framing::kJsonArray);
  return DecodeGenerateResponses(
      HttpPost(location_, options_, "/generate", body), Framing::kJsonArray);
}

HttpTrainer::HttpTrainer(std::string url, HttpOptions options)
    : location_(ParseHttpLocation(url)), options_(options) {}

std::string HttpTrainer::Finetune(const FinetuneRequest& request) {
  const std::string body =
      HttpPost(location_, options_, "/finetune", EncodeFinetuneRequest(request));
  try {
    return DecodeFinetuneResponse(body);
  } catch (const SchemaError& e) {
    throw EndpointError(std::string("bad /finetune response: ") + e.what());
  }
}

CommandScorer::CommandScorer(std::string command, std::string workdir)
    : command_(std::move(command)), workdir_(std::move(workdir)) {}

std::vector<ScoreResponse> CommandScorer::ScoreBatch(
    std::span<const ScoreRequest> batch) {
  Scratch scratch(workdir_);
  const auto in = scratch.Path("-score-in.jsonl");
  const auto out = scratch.Path("-score-out.jsonl");
  WriteFile(in, EncodeScoreRequests(batch, model_version(), Framing::kJsonl));
  const std::pair<std::string_view, std::string> values[] = {
      {"in", in.string()}, {"out", out.string()}};
  RunCommand(ExpandCommand(command_, values));
  return DecodeScoreResponses(ReadFile(out), Framing::kJsonl);
}

CommandGenerator::CommandGenerator(std::string command, std::string workdir)
    : command_(std::move(command)), workdir_(std::move(workdir)) {}

std::vector<GenerateResponse> CommandGenerator::GenerateBatch(
    std::span<const GenerateRequest> batch) {
  Scratch scratch(workdir_);
  const auto in = scratch.Path("-gen-in.jsonl");
  const auto out = scratch.Path("-gen-out.jsonl");
  WriteFile(in, EncodeGenerateRequests(batch, Framing::kJsonl));
  const std::pair<std::string_view, std::string> values[] = {
      {"in", in.string()}, {"out", out.string()}};
  RunCommand(ExpandCommand(command_, values));
  return DecodeGenerateResponses(ReadFile(out), Framing::kJsonl);
}

CommandTrainer::CommandTrainer(std::string command, std::string workdir)
    : command_(std::move(command)), workdir_(std::move(workdir)) {}

std::string CommandTrainer::Finetune(const FinetuneRequest& request) {
  Scratch scratch(workdir_);
  const auto out = scratch.Path("-version.txt");
  const std::pair<std::string_view, std::string> values[] = {
      {"data", request.dataset_path},
      {"batch", std::to_string(request.batch_size)},
      {"out", out.string()}};
  RunCommand(ExpandCommand(command_, values));
  std::string version = NormalizeSpace(ReadFile(out));
  if (version.empty()) throw EndpointError("trainer wrote an empty version");
  return version;
}

std::vector<ScoreResponse> FunctionScorer::ScoreBatch(
    std::span<const ScoreRequest> batch) {
  std::vector<ScoreResponse> out;
  out.reserve(batch.size());
  for (const auto& r : batch) out.push_back({r.id, fn_(r, model_version())});
  return out;
}

std::vector<GenerateResponse> FunctionGenerator::GenerateBatch(
    std::span<const GenerateRequest> batch) {
  std::vector<GenerateResponse> out;
  out.reserve(batch.size());
  for (const auto& r : batch) out.push_back({r.id, fn_(r.input)});
  return out;
}

std::vector<double> ScoreAll(EntailmentScorer& scorer,
                             std::span<const ScoreRequest> requests,
                             const ClientOptions& options) {
  return RunAll<ScoreRequest, double>(
      "score", requests, options,
      [&](std::span<const ScoreRequest> batch, std::vector<double>* out,
          std::size_t offset) {
        const auto responses = scorer.ScoreBatch(batch);
        return JoinById<ScoreRequest, ScoreResponse, double>(
            batch, responses,
            [](const ScoreResponse& r, std::string* error) {
              if (!(r.prob_entail >= 0.0 && r.prob_entail <= 1.0)) {
                *error = "prob_entail out of [0,1] for id \"" + r.id + "\"";
              }
              return r.prob_entail;
            },
            out, offset);
      });
}

std::vector<std::string> GenerateAll(TextGenerator& generator,
                                     std::span<const GenerateRequest> requests,
                                     const ClientOptions& options) {
  return RunAll<GenerateRequest, std::string>(
      "generate", requests, options,
      [&](std::span<const GenerateRequest> batch, std::vector<std::string>* out,
          std::size_t offset) {
        const auto responses = generator.GenerateBatch(batch);
        return JoinById<GenerateRequest, GenerateResponse, std::string>(
            batch, responses,
            [](const GenerateResponse& r, std::string*) { return r.output; },
            out, offset);
      });
}

std::vector<std::string> GenerateTexts(TextGenerator& generator,
                                       std::span<const std::string> inputs,
                                       const ClientOptions& options) {
  std::vector<GenerateRequest> requests;
  requests.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    requests.push_back({std::to_string(i), inputs[i]});
  }
  return GenerateAll(generator, requests, options);
}

}  // namespace kgt
