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

#include "texbias/error.hpp"

#include <utility>

namespace texbias {
namespace {

std::string FormatLocation(const std::string& source, std::size_t line,
                           const std::string& detail) {
  std::string out = source.empty() ? std::string("<input>") : source;
  if (line > 0) out += ":" + std::to_string(line);
  out += ": ";
  out += detail;
  if (line > 0) out += " at line " + std::to_string(line);
  return out;
}

}  // namespace

ValidationError::ValidationError(std::string source, std::size_t line,
                                 std::string detail)
    : Error(ErrorCode::kValidation, FormatLocation(source, line, detail)),
      source_(std::move(source)),
      line_(line),
      detail_(std::move(detail)) {}

}  // namespace texbias
