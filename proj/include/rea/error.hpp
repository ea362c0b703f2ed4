// Copyright 2026 The rea Authors
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

#ifndef REA_ERROR_HPP_
#define REA_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <vector>

namespace rea {

// Machine-readable error categories. The CLI prints these codes on stderr.
enum class ErrorCode {
  kConfiguration,
  kEmptyInput,
  kParse,
  kDomain,
  kJudgeFormat,
  kTransport,
  kPipeline,
  kStructural,
  kUsage,
};

inline const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfiguration: return "configuration";
    case ErrorCode::kEmptyInput: return "empty_input";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kJudgeFormat: return "judge_format";
    case ErrorCode::kTransport: return "transport";
    case ErrorCode::kPipeline: return "pipeline";
    case ErrorCode::kStructural: return "structural";
    case ErrorCode::kUsage: return "usage";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ConfigurationError : public Error {
 public:
  explicit ConfigurationError(const std::string& m) : Error(ErrorCode::kConfiguration, m) {}
};

class EmptyInputError : public Error {
 public:
  explicit EmptyInputError(const std::string& m) : Error(ErrorCode::kEmptyInput, m) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& m) : Error(ErrorCode::kParse, m) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& m) : Error(ErrorCode::kDomain, m) {}
};

class JudgeFormatError : public Error {
 public:
  explicit JudgeFormatError(const std::string& m) : Error(ErrorCode::kJudgeFormat, m) {}
};

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& m) : Error(ErrorCode::kTransport, m) {}
};

// Wraps a lower-level failure with the id of the trace being processed.
class PipelineError : public Error {
 public:
  PipelineError(std::string trace_id, const std::string& m)
      : Error(ErrorCode::kPipeline, "trace " + trace_id + ": " + m),
        trace_id_(std::move(trace_id)) {}

  const std::string& trace_id() const noexcept { return trace_id_; }

 private:
  std::string trace_id_;
};

class StructuralError : public Error {
 public:
  explicit StructuralError(const std::string& m) : Error(ErrorCode::kStructural, m) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& m) : Error(ErrorCode::kUsage, m) {}
};

// Non-fatal conditions collected during an operation. Callers that do not
// care pass nullptr.
using Warnings = std::vector<std::string>;

inline void Warn(Warnings* sink, std::string message) {
  if (sink != nullptr) sink->push_back(std::move(message));
}

}  // namespace rea

#endif  // REA_ERROR_HPP_
