// Copyright 2026 The eigloc Authors. All Rights Reserved.
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eigloc {

/// Failure categories. The CLI maps them onto exit codes.
enum class ErrorCategory { kConfig, kData, kNumerical };

enum class ErrorCode {
  kInvalidArgument,
  kInvalidModel,
  kEmptySamples,
  kInsufficientSamples,
  kOutOfRegion,
  kEmptyObservation,
  kDegenerateVector,
  kDegenerateMatrix,
  kParse,
  kIo,
  kConfig,
};

inline constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kInvalidModel: return "invalid_model";
    case ErrorCode::kEmptySamples: return "empty_samples";
    case ErrorCode::kInsufficientSamples: return "insufficient_samples";
    case ErrorCode::kOutOfRegion: return "out_of_region";
    case ErrorCode::kEmptyObservation: return "empty_observation";
    case ErrorCode::kDegenerateVector: return "degenerate_vector";
    case ErrorCode::kDegenerateMatrix: return "degenerate_matrix";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kConfig: return "config_error";
  }
  return "unknown";
}

inline constexpr ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidModel:
    case ErrorCode::kConfig:
      return ErrorCategory::kConfig;
    case ErrorCode::kDegenerateVector:
    case ErrorCode::kDegenerateMatrix:
      return ErrorCategory::kNumerical;
    default:
      return ErrorCategory::kData;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

/// Parse failure that remembers the 1-based input line it refers to.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace eigloc
