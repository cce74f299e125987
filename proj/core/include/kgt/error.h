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

#ifndef KGT_ERROR_H_
#define KGT_ERROR_H_

#include <stdexcept>
#include <string>

namespace kgt {

// Error categories. The command-line tool maps each one to its own exit code.
enum class ErrorKind {
  kUsage,
  kSchema,
  kEndpoint,
  kInternal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Bad invocation or missing input file.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message)
      : Error(ErrorKind::kUsage, message) {}
};

// Malformed input record, invariant violation, or schema version mismatch.
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& message)
      : Error(ErrorKind::kSchema, message) {}
};

// An external model (scorer, generator, trainer) failed after retries.
class EndpointError : public Error {
 public:
  explicit EndpointError(const std::string& message)
      : Error(ErrorKind::kEndpoint, message) {}
};

}  // namespace kgt

#endif  // KGT_ERROR_H_
