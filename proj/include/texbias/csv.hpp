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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace texbias {

// Shortest-round-trip is not what we want for reports: matrices use a fixed
// 17 significant digits, summaries 6.
inline constexpr int kMatrixDigits = 17;
inline constexpr int kSummaryDigits = 6;

std::string format_real(double value, int significant_digits = kMatrixDigits);
std::string format_optional_real(const std::optional<double>& value,
                                 int significant_digits = kMatrixDigits);

// Minimal RFC 4180 writer: fields containing a comma, quote, CR or LF are
// quoted. Rows end with '\n'.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

std::string csv_escape(std::string_view field);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;  // 1-based source line of each row

  // Column index by header name; throws ValidationError if absent.
  std::size_t column(std::string_view name, const std::string& source) const;
};

// Parses a CSV document whose first record is the header. Every row must have
// as many fields as the header.
CsvTable parse_csv(std::istream& in, const std::string& source);
CsvTable read_csv_file(const std::string& path);

// Strict numeric field parsing used by every CSV reader.
long long parse_int_field(std::string_view text, const std::string& source,
                          std::size_t line, std::string_view what);
double parse_real_field(std::string_view text, const std::string& source,
                        std::size_t line, std::string_view what);

}  // namespace texbias
