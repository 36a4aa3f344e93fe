#include "chartforge/table.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "chartforge/detail/text.hpp"

namespace chartforge {

namespace {

void check_text(const std::string& s, const char* what) {
    if (s.empty()) {
        throw InvalidTable(std::string(what) + " must not be empty");
    }
    if (s.find_first_of("|\n\r") != std::string::npos) {
        throw InvalidTable(std::string(what) + " contains '|' or a line break: " + s);
    }
}

void check_labels(std::vector<std::string>& labels, const char* what) {
    if (labels.empty()) {
        throw InvalidTable(std::string("table needs at least one ") + what);
    }
    std::set<std::string> seen;
    for (auto& l : labels) {
        l = detail::trim(l);
        check_text(l, what);
        if (!seen.insert(l).second) {
            throw InvalidTable(std::string("duplicate ") + what + ": " + l);
        }
    }
}

std::vector<std::string> split_row(std::string_view line) {
    line = detail::trim_view(line);
    if (!line.empty() && line.front() == '|') line.remove_prefix(1);
    if (!line.empty() && line.back() == '|') line.remove_suffix(1);
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto bar = line.find('|', start);
        auto piece = line.substr(start, bar == std::string_view::npos ? line.npos : bar - start);
        out.emplace_back(detail::trim(piece));
        if (bar == std::string_view::npos) break;
        start = bar + 1;
    }
    return out;
}

bool is_separator_cell(std::string_view s) {
    if (s.empty()) return false;
    if (s.front() == ':') s.remove_prefix(1);
    if (!s.empty() && s.back() == ':') s.remove_suffix(1);
    if (s.empty()) return false;
    for (char c : s) {
        if (c != '-') return false;
    }
    return true;
}

}  // namespace

Cell Cell::number(double v) {
    if (!std::isfinite(v)) {
        throw InvalidTable("number cells must be finite");
    }
    return Cell(std::variant<double, std::string>(v));
}

Cell Cell::text(std::string s) {
    s = detail::trim(s);
    check_text(s, "text cell");
    return Cell(std::variant<double, std::string>(std::move(s)));
}

double Cell::as_number() const {
    if (const auto* v = std::get_if<double>(&value_)) return *v;
    throw InvalidTable("cell holds text, not a number: " + std::get<std::string>(value_));
}

const std::string& Cell::as_text() const {
    if (const auto* s = std::get_if<std::string>(&value_)) return *s;
    throw InvalidTable("cell holds a number, not text");
}

DataTable::DataTable(std::vector<std::string> row_labels, std::vector<std::string> col_labels,
                     std::vector<std::vector<Cell>> cells, TableMeta meta)
    : row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)),
      cells_(std::move(cells)),
      meta_(std::move(meta)) {
    check_labels(row_labels_, "row label");
    check_labels(col_labels_, "column label");
    if (cells_.size() != row_labels_.size()) {
        throw InvalidTable("cell grid has " + std::to_string(cells_.size()) + " rows, expected " +
                           std::to_string(row_labels_.size()));
    }
    for (const auto& row : cells_) {
        if (row.size() != col_labels_.size()) {
            throw InvalidTable("ragged cell row");
        }
    }
    for (auto* s : {&meta_.title, &meta_.x_label, &meta_.y_label}) {
        *s = detail::trim(*s);
        if (s->find_first_of("|\n\r") != std::string::npos) {
            throw InvalidTable("table metadata contains '|' or a line break");
        }
    }
}

std::string DataTable::corner_label() const {
    return meta_.x_label.empty() ? std::string("x") : meta_.x_label;
}

std::optional<std::size_t> DataTable::find_row(std::string_view label) const {
    for (std::size_t i = 0; i < row_labels_.size(); ++i) {
        if (row_labels_[i] == label) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> DataTable::find_col(std::string_view label) const {
    for (std::size_t i = 0; i < col_labels_.size(); ++i) {
        if (col_labels_[i] == label) return i;
    }
    return std::nullopt;
}

bool DataTable::all_numeric() const {
    for (const auto& row : cells_) {
        for (const auto& c : row) {
            if (!c.is_number()) return false;
        }
    }
    return true;
}

std::vector<double> DataTable::column_values(std::size_t c) const {
    std::vector<double> out;
    out.reserve(rows());
    for (std::size_t r = 0; r < rows(); ++r) out.push_back(at(r, c).as_number());
    return out;
}

std::vector<double> DataTable::row_values(std::size_t r) const {
    std::vector<double> out;
    out.reserve(cols());
    for (std::size_t c = 0; c < cols(); ++c) out.push_back(at(r, c).as_number());
    return out;
}

std::string format_number(double v) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    std::string s(buf);
    if (auto dot = s.find('.'); dot != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

double quantize(double v, int decimals) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    double out = 0.0;
    std::from_chars(buf, buf + std::char_traits<char>::length(buf), out);
    return out == 0.0 ? 0.0 : out;
}

std::optional<double> parse_number(std::string_view text) {
    text = detail::trim_view(text);
    if (!text.empty() && text.back() == '%') {
        text.remove_suffix(1);
        text = detail::trim_view(text);
    }
    if (text.empty()) return std::nullopt;

    std::string digits;
    std::size_t i = 0;
    if (text[0] == '+' || text[0] == '-') {
        if (text[0] == '-') digits.push_back('-');
        i = 1;
    }
    // Integer part, optionally grouped as 1,234,567.
    std::size_t int_start = i;
    bool grouped = false;
    std::size_t group_len = 0;
    bool any_digit = false;
    for (; i < text.size() && text[i] != '.'; ++i) {
        char c = text[i];
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
            ++group_len;
            any_digit = true;
        } else if (c == ',') {
            if (!any_digit) return std::nullopt;
            if (grouped ? group_len != 3 : (group_len == 0 || group_len > 3)) return std::nullopt;
            grouped = true;
            group_len = 0;
        } else {
            return std::nullopt;
        }
    }
    if (grouped && group_len != 3) return std::nullopt;
    if (i < text.size()) {
        digits.push_back('.');
        ++i;
        std::size_t frac_start = i;
        for (; i < text.size(); ++i) {
            char c = text[i];
            if (c < '0' || c > '9') return std::nullopt;
            digits.push_back(c);
        }
        if (i == frac_start && !any_digit) return std::nullopt;
        any_digit = any_digit || i > frac_start;
    }
    if (!any_digit || (i == int_start)) return std::nullopt;

    double out = 0.0;
    const char* first = digits.data();
    const char* last = digits.data() + digits.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || !std::isfinite(out)) return std::nullopt;
    return out == 0.0 ? 0.0 : out;
}

std::string to_markdown(const DataTable& table) {
    std::ostringstream os;
    os << "| " << table.corner_label();
    for (const auto& c : table.col_labels()) os << " | " << c;
    os << " |\n|";
    for (std::size_t c = 0; c <= table.cols(); ++c) os << " --- |";
    for (std::size_t r = 0; r < table.rows(); ++r) {
        os << "\n| " << table.row_labels()[r];
        for (std::size_t c = 0; c < table.cols(); ++c) {
            const Cell& cell = table.at(r, c);
            os << " | " << (cell.is_number() ? format_number(cell.as_number()) : cell.as_text());
        }
        os << " |";
    }
    return os.str();
}

DataTable parse_markdown_table(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        auto line = text.substr(start, nl == std::string_view::npos ? text.npos : nl - start);
        if (!detail::trim_view(line).empty()) lines.push_back(line);
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    if (lines.empty()) throw MalformedTable("empty input");

    auto header = split_row(lines[0]);
    if (header.size() < 2 || header[0].empty()) {
        throw MalformedTable("header needs a corner cell and at least one column");
    }
    if (lines.size() < 2) throw MalformedTable("missing separator row");
    auto sep = split_row(lines[1]);
    if (sep.size() != header.size()) throw MalformedTable("separator width differs from header");
    for (const auto& s : sep) {
        if (!is_separator_cell(s)) throw MalformedTable("second line is not a separator row");
    }
    if (lines.size() < 3) throw MalformedTable("no data rows");

    std::vector<std::string> col_labels(header.begin() + 1, header.end());
    std::vector<std::string> row_labels;
    std::vector<std::vector<Cell>> cells;
    for (std::size_t li = 2; li < lines.size(); ++li) {
        auto parts = split_row(lines[li]);
        if (parts.size() != header.size()) {
            throw MalformedTable("row " + std::to_string(li - 1) + " has " +
                                 std::to_string(parts.size()) + " cells, expected " +
                                 std::to_string(header.size()));
        }
        row_labels.push_back(parts[0]);
        std::vector<Cell> row;
        for (std::size_t c = 1; c < parts.size(); ++c) {
            if (parts[c].empty()) throw MalformedTable("empty cell in row " + std::to_string(li - 1));
            if (auto n = parse_number(parts[c])) {
                row.push_back(Cell::number(*n));
            } else {
                row.push_back(Cell::text(parts[c]));
            }
        }
        cells.push_back(std::move(row));
    }
    try {
        return DataTable(std::move(row_labels), std::move(col_labels), std::move(cells),
                         TableMeta{"", header[0], ""});
    } catch (const InvalidTable& e) {
        throw MalformedTable(e.what());
    }
}

DataTable transpose(const DataTable& table) {
    std::vector<std::vector<Cell>> cells(table.cols(), std::vector<Cell>(table.rows()));
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < table.cols(); ++c) cells[c][r] = table.at(r, c);
    }
    return DataTable(table.col_labels(), table.row_labels(), std::move(cells), table.meta());
}

bool same_content(const DataTable& a, const DataTable& b) {
    return a.corner_label() == b.corner_label() && a.row_labels() == b.row_labels() &&
           a.col_labels() == b.col_labels() && a.cells() == b.cells();
}

}  // namespace chartforge
