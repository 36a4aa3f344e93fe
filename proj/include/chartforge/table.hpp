#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "chartforge/error.hpp"

namespace chartforge {

/// A table cell: a finite number or a non-empty piece of text.
class Cell {
public:
    Cell() : value_(0.0) {}
    static Cell number(double v);
    static Cell text(std::string s);

    bool is_number() const noexcept { return std::holds_alternative<double>(value_); }
    double as_number() const;
    const std::string& as_text() const;

    friend bool operator==(const Cell&, const Cell&) = default;

private:
    explicit Cell(std::variant<double, std::string> v) : value_(std::move(v)) {}
    std::variant<double, std::string> value_;
};

struct TableMeta {
    std::string title;
    std::string x_label;
    std::string y_label;

    friend bool operator==(const TableMeta&, const TableMeta&) = default;
};

/// The ground-truth data behind a chart. Rows are x categories (ticks, pie
/// slices, histogram bins, box groups); columns are series / legends.
///
/// Immutable after construction. The constructor enforces: at least one row
/// and column, unique labels, a rectangular grid, no '|' or newlines in any
/// text, finite numbers. Labels and text cells are whitespace-trimmed.
class DataTable {
public:
    DataTable(std::vector<std::string> row_labels, std::vector<std::string> col_labels,
              std::vector<std::vector<Cell>> cells, TableMeta meta = {});

    std::size_t rows() const noexcept { return row_labels_.size(); }
    std::size_t cols() const noexcept { return col_labels_.size(); }

    const std::vector<std::string>& row_labels() const noexcept { return row_labels_; }
    const std::vector<std::string>& col_labels() const noexcept { return col_labels_; }
    const Cell& at(std::size_t r, std::size_t c) const { return cells_.at(r).at(c); }
    const std::vector<std::vector<Cell>>& cells() const noexcept { return cells_; }

    const TableMeta& meta() const noexcept { return meta_; }
    const std::string& title() const noexcept { return meta_.title; }
    const std::string& x_label() const noexcept { return meta_.x_label; }
    const std::string& y_label() const noexcept { return meta_.y_label; }

    /// Header text of the label column: the x label, or "x" when unset.
    std::string corner_label() const;

    std::optional<std::size_t> find_row(std::string_view label) const;
    std::optional<std::size_t> find_col(std::string_view label) const;

    bool all_numeric() const;
    /// Numbers of column `c`; throws InvalidTable if a cell is text.
    std::vector<double> column_values(std::size_t c) const;
    std::vector<double> row_values(std::size_t r) const;

    friend bool operator==(const DataTable&, const DataTable&) = default;

private:
    std::vector<std::string> row_labels_;
    std::vector<std::string> col_labels_;
    std::vector<std::vector<Cell>> cells_;
    TableMeta meta_;
};

/// Fixed-point text with at most four decimals, trailing zeros trimmed, never
/// scientific notation. `-0` prints as `0`.
std::string format_number(double v);

/// Rounds `v` to `decimals` places and snaps it to the double nearest that
/// decimal, so `format_number` and `parse_number` reproduce it exactly.
double quantize(double v, int decimals = 4);

/// Lenient numeric parse used for table cells and answers: optional sign,
/// thousands separators, decimals, a trailing '%'. Surrounding whitespace is
/// ignored. Returns nullopt for anything else.
std::optional<double> parse_number(std::string_view text);

std::string to_markdown(const DataTable& table);

/// Throws MalformedTable on ragged rows, a missing separator row, an empty
/// header, no data rows, empty cells or duplicate labels.
DataTable parse_markdown_table(std::string_view text);

DataTable transpose(const DataTable& table);

/// Equality of everything the markdown form carries: corner label, labels
/// and cells. Title and y label are not part of the markdown text.
bool same_content(const DataTable& a, const DataTable& b);

}  // namespace chartforge
