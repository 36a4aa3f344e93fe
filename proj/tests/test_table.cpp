#include <limits>

#include <gtest/gtest.h>

#include "chartforge/table.hpp"

using namespace chartforge;

namespace {

DataTable small() {
    return DataTable({"2019", "2020", "2021"}, {"Alpha", "Beta"},
                     {{Cell::number(1.5), Cell::number(-2)},
                      {Cell::number(3), Cell::number(4.25)},
                      {Cell::number(0), Cell::text("n/a")}},
                     TableMeta{"Output", "Year", "Units"});
}

}  // namespace

TEST(FormatNumber, TrimsZerosAndCapsDecimals) {
    EXPECT_EQ(format_number(3.0), "3");
    EXPECT_EQ(format_number(3.10), "3.1");
    EXPECT_EQ(format_number(2.0 / 3.0), "0.6667");
    EXPECT_EQ(format_number(-0.00001), "0");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(1234567.5), "1234567.5");
    EXPECT_EQ(format_number(1e21).find('e'), std::string::npos);
}

TEST(Quantize, RoundTripsThroughText) {
    for (double v : {0.1 + 0.2, 12.345678, -7.00005, 99.99995}) {
        double q = quantize(v);
        EXPECT_EQ(parse_number(format_number(q)).value(), q);
    }
    EXPECT_EQ(quantize(2.345, 1), 2.3);
}

TEST(ParseNumber, AcceptsSignsGroupingAndPercent) {
    EXPECT_EQ(parse_number("42").value(), 42.0);
    EXPECT_EQ(parse_number(" -3.5 ").value(), -3.5);
    EXPECT_EQ(parse_number("+7").value(), 7.0);
    EXPECT_EQ(parse_number("1,234,567.25").value(), 1234567.25);
    EXPECT_EQ(parse_number("12 %").value(), 12.0);
    EXPECT_EQ(parse_number(".5").value_or(-1), 0.5);
}

TEST(ParseNumber, RejectsNonNumbers) {
    for (const char* s : {"", "abc", "1e3", "12,34", "1,2345", "--1", "1.2.3", "%", ",123", "nan", "inf"}) {
        EXPECT_FALSE(parse_number(s).has_value()) << s;
    }
}

TEST(DataTable, EnforcesInvariants) {
    EXPECT_THROW(DataTable({"a", "a"}, {"x"}, {{Cell::number(1)}, {Cell::number(2)}}), InvalidTable);
    EXPECT_THROW(DataTable({"a"}, {"x", "y"}, {{Cell::number(1)}}), InvalidTable);
    EXPECT_THROW(DataTable({}, {"x"}, {}), InvalidTable);
    EXPECT_THROW(DataTable({"a|b"}, {"x"}, {{Cell::number(1)}}), InvalidTable);
    EXPECT_THROW(Cell::number(std::numeric_limits<double>::infinity()), InvalidTable);
    DataTable t({" a "}, {"x"}, {{Cell::number(1)}});
    EXPECT_EQ(t.row_labels()[0], "a");
}

TEST(DataTable, LookupsAndColumns) {
    auto t = small();
    EXPECT_EQ(t.find_row("2020").value(), 1u);
    EXPECT_FALSE(t.find_col("Gamma").has_value());
    EXPECT_EQ(t.column_values(0), (std::vector<double>{1.5, 3, 0}));
    EXPECT_THROW(t.column_values(1), InvalidTable);
    EXPECT_FALSE(t.all_numeric());
    EXPECT_EQ(t.corner_label(), "Year");
}

TEST(Markdown, ExactLayout) {
    auto md = to_markdown(small());
    EXPECT_EQ(md,
              "| Year | Alpha | Beta |\n"
              "| --- | --- | --- |\n"
              "| 2019 | 1.5 | -2 |\n"
              "| 2020 | 3 | 4.25 |\n"
              "| 2021 | 0 | n/a |");
}

TEST(Markdown, RoundTrip) {
    auto t = small();
    auto back = parse_markdown_table(to_markdown(t));
    EXPECT_TRUE(same_content(back, t));
    EXPECT_EQ(back.x_label(), "Year");
}

TEST(Markdown, ToleratesLooseFormatting) {
    auto t = parse_markdown_table("\n  | k | v |\n|:--|--:|\n| a | 1,000 |\n| b | 2 |\n\n");
    EXPECT_EQ(t.rows(), 2u);
    EXPECT_EQ(t.at(0, 0).as_number(), 1000.0);
}

TEST(Markdown, RejectsMalformed) {
    EXPECT_THROW(parse_markdown_table(""), MalformedTable);
    EXPECT_THROW(parse_markdown_table("| a | b |\n| 1 | 2 |"), MalformedTable);
    EXPECT_THROW(parse_markdown_table("| a | b |\n| --- | --- |"), MalformedTable);
    EXPECT_THROW(parse_markdown_table("| a | b |\n| --- | --- |\n| x | 1 | 2 |"), MalformedTable);
    EXPECT_THROW(parse_markdown_table("| a | b |\n| --- | --- |\n| x |  |"), MalformedTable);
    EXPECT_THROW(parse_markdown_table("| a | b |\n| --- | --- |\n| x | 1 |\n| x | 2 |"), MalformedTable);
}

TEST(Transpose, SwapsAxesTwice) {
    auto t = small();
    auto tt = transpose(t);
    EXPECT_EQ(tt.rows(), 2u);
    EXPECT_EQ(tt.cols(), 3u);
    EXPECT_EQ(tt.at(1, 2), Cell::text("n/a"));
    EXPECT_TRUE(same_content(transpose(tt), t));
}
