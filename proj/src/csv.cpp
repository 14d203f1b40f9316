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

#include "texbias/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "texbias/error.hpp"

namespace texbias {

std::string format_real(double value, int significant_digits) {
  // -0 prints as "-0"; normalize so outputs do not depend on sign of zero.
  if (value == 0.0) value = 0.0;
  return fmt::format("{:.{}g}", value, significant_digits);
}

std::string format_optional_real(const std::optional<double>& value,
                                 int significant_digits) {
  return value ? format_real(*value, significant_digits) : std::string();
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << csv_escape(fields[i]);
  }
  out_ << '\n';
}

std::size_t CsvTable::column(std::string_view name,
                             const std::string& source) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ValidationError(source, 1,
                        "missing column '" + std::string(name) + "'");
}

namespace {

// Reads one CSV record starting at the current stream position. Returns false
// at end of input. `line` is advanced past every newline consumed.
bool ReadRecord(std::istream& in, std::vector<std::string>& fields,
                std::size_t& line, const std::string& source) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;

  std::string field;
  bool quoted = false;
  bool after_quote = false;
  const std::size_t start_line = line;
  for (;;) {
    const int ch = in.get();
    if (ch == std::char_traits<char>::eof()) {
      if (quoted) {
        throw ValidationError(source, start_line, "unterminated quoted field");
      }
      fields.push_back(std::move(field));
      ++line;
      return true;
    }
    const char c = static_cast<char>(ch);
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      after_quote = false;
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r' && !after_quote) {
        field.pop_back();
      }
      fields.push_back(std::move(field));
      ++line;
      return true;
    } else if (c == '"' && field.empty() && !after_quote) {
      quoted = true;
    } else if (after_quote && c != '\r') {
      throw ValidationError(source, start_line,
                            "unexpected character after closing quote");
    } else if (!after_quote) {
      field.push_back(c);
    }
  }
}

}  // namespace

CsvTable parse_csv(std::istream& in, const std::string& source) {
  CsvTable table;
  std::size_t line = 1;
  std::vector<std::string> fields;
  if (!ReadRecord(in, fields, line, source)) {
    throw ValidationError(source, 1, "missing CSV header");
  }
  table.header = fields;
  for (;;) {
    const std::size_t row_line = line;
    if (!ReadRecord(in, fields, line, source)) break;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != table.header.size()) {
      throw ValidationError(
          source, row_line,
          fmt::format("expected {} fields, found {}", table.header.size(),
                      fields.size()));
    }
    table.rows.push_back(fields);
    table.row_lines.push_back(row_line);
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open " + path);
  return parse_csv(in, path);
}

long long parse_int_field(std::string_view text, const std::string& source,
                          std::size_t line, std::string_view what) {
  long long value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw ValidationError(source, line,
                          fmt::format("{} is not an integer: '{}'", what, text));
  }
  return value;
}

double parse_real_field(std::string_view text, const std::string& source,
                        std::size_t line, std::string_view what) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ValidationError(source, line,
                          fmt::format("{} is not a finite number: '{}'", what, text));
  }
  return value;
}

}  // namespace texbias
