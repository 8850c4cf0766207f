#include <gtest/gtest.h>

#include "kloos/report.hpp"

using namespace kloos;

TEST(Report, ZeroSumJson) {
  const auto row = to_row(ComplexSum{}, "complete");
  EXPECT_EQ(to_json(row),
            "{\"value_re\":0,\"value_im\":0,\"err\":0,\"terms\":0,\"bound\":null,\"ratio\":null,"
            "\"params\":{},\"method\":\"complete\"}");
}

TEST(Report, CountIsExactInteger) {
  CountResult c{18446744073709551615ull, 4.0, CountMethod::hashed};
  const auto row = to_row(c, {{"q", "7"}});
  const std::string j = to_json(row);
  EXPECT_NE(j.find("\"value_re\":18446744073709551615"), std::string::npos);
  EXPECT_NE(j.find("\"method\":\"hashed\""), std::string::npos);
  EXPECT_EQ(to_csv(row).substr(0, 21), "18446744073709551615,");
}

TEST(Report, SeventeenDigits) {
  ComplexSum s{0.1, -1.0 / 3.0, 1e-300, 2};
  const std::string j = to_json(to_row(s, "x"));
  EXPECT_NE(j.find("0.10000000000000001"), std::string::npos);
  EXPECT_NE(j.find("-0.33333333333333331"), std::string::npos);
}

TEST(Report, CsvRowCount) {
  std::vector<ReportRow> rows(5, to_row(ComplexSum{1, 2, 0, 3}, "m", {{"a", "1"}, {"b", "2"}}));
  const std::string csv = serialize("sum", rows, {}, Format::csv);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kCsvHeader);
  EXPECT_NE(csv.find(",a=1;b=2,m\n"), std::string::npos);
}

TEST(Report, JsonEscaping) {
  ReportRow r;
  r.method = "a\"b\\c\n";
  EXPECT_NE(to_json(r).find("\"a\\\"b\\\\c\\u000a\""), std::string::npos);
}
