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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "texbias/error.hpp"

namespace texbias {
namespace {

TEST(FormatRealTest, SeventeenDigitsRoundTrip) {
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(format_real(1.0), "1");
  EXPECT_EQ(format_real(0.0), "0");
  EXPECT_EQ(format_real(-0.0), "0");
  EXPECT_EQ(format_real(0.25, kSummaryDigits), "0.25");
  EXPECT_EQ(format_real(0.9476966276867814, kSummaryDigits), "0.947697");
  for (double v : {1.0 / 3.0, 0.14154140665565038, 1e-300, 123456.789}) {
    EXPECT_EQ(std::stod(format_real(v)), v);
  }
  EXPECT_EQ(format_optional_real(std::nullopt), "");
}

TEST(CsvWriterTest, QuotesOnlyWhenNeeded) {
  std::ostringstream out;
  CsvWriter w(out);
  w.row({"plain", "a,b", "say \"hi\"", "line\nbreak", ""});
  EXPECT_EQ(out.str(), "plain,\"a,b\",\"say \"\"hi\"\"\",\"line\nbreak\",\n");
}

TEST(ParseCsvTest, QuotedFieldsAndLineNumbers) {
  std::istringstream in("a,b\n\"x,1\",\"multi\nline\"\n\nplain,\"q\"\"q\"\n");
  const auto t = parse_csv(in, "t.csv");
  EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][0], "x,1");
  EXPECT_EQ(t.rows[0][1], "multi\nline");
  EXPECT_EQ(t.rows[1][1], "q\"q");
  EXPECT_EQ(t.row_lines[0], 2u);
  EXPECT_EQ(t.row_lines[1], 5u);
  EXPECT_EQ(t.column("b", "t.csv"), 1u);
  EXPECT_THROW(t.column("c", "t.csv"), ValidationError);
}

TEST(ParseCsvTest, CrLfAccepted) {
  std::istringstream in("a,b\r\n1,2\r\n");
  const auto t = parse_csv(in, "t.csv");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][1], "2");
}

TEST(ParseCsvTest, Rejections) {
  std::istringstream ragged("a,b\n1\n");
  EXPECT_THROW(parse_csv(ragged, "t.csv"), ValidationError);
  std::istringstream open_quote("a\n\"oops\n");
  EXPECT_THROW(parse_csv(open_quote, "t.csv"), ValidationError);
}

TEST(FieldParseTest, Strict) {
  EXPECT_EQ(parse_int_field("42", "s", 1, "n"), 42);
  EXPECT_EQ(parse_int_field("-3", "s", 1, "n"), -3);
  EXPECT_THROW(parse_int_field("4.0", "s", 1, "n"), ValidationError);
  EXPECT_THROW(parse_int_field("", "s", 1, "n"), ValidationError);
  EXPECT_THROW(parse_int_field("7x", "s", 1, "n"), ValidationError);
  EXPECT_EQ(parse_real_field("0.5", "s", 1, "v"), 0.5);
  EXPECT_EQ(parse_real_field("1e-3", "s", 1, "v"), 1e-3);
  EXPECT_THROW(parse_real_field("nan", "s", 1, "v"), ValidationError);
  EXPECT_THROW(parse_real_field("0.5 ", "s", 1, "v"), ValidationError);
  try {
    parse_real_field("abc", "file.csv", 9, "similarity");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.line(), 9u);
    EXPECT_EQ(e.source(), "file.csv");
  }
}

TEST(ReadCsvFileTest, MissingFile) {
  try {
    read_csv_file("/nonexistent/x.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingInput);
  }
}

}  // namespace
}  // namespace texbias
