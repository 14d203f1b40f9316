/* Copyright 2026 The texbias Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace texbias {

// Numeric values double as CLI exit codes and C API status codes.
enum class ErrorCode : int {
  kValidation = 1,
  kMissingInput = 2,
  kInternal = 3,
  kInvalidArgument = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// A malformed or out-of-contract input. `line` is 1-based; 0 when the error
// is not tied to a particular line.
class ValidationError : public Error {
 public:
  ValidationError(std::string source, std::size_t line, std::string detail);

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string source_;
  std::size_t line_;
  std::string detail_;
};

class MissingInputError : public Error {
 public:
  explicit MissingInputError(const std::string& what)
      : Error(ErrorCode::kMissingInput, what) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::kInvalidArgument, what) {}
};

}  // namespace texbias
