#include "chartforge/stubs.hpp"

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <set>

#include "chartforge/qa.hpp"
#include "chartforge/rng.hpp"

namespace chartforge {

namespace {

std::size_t arg_best(const std::vector<double>& v, bool largest) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (largest ? v[i] > v[best] : v[i] < v[best]) best = i;
    }
    return best;
}

std::string fmt(double v) { return format_number(v); }

std::string lower_first(std::string s) {
    if (!s.empty() && s.size() > 1 && std::isupper(static_cast<unsigned char>(s[0])) &&
        !std::isupper(static_cast<unsigned char>(s[1]))) {
        s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
    }
    return s;
}

std::string x_noun(const DataTable& t, ChartType type) {
    if (type == ChartType::Histogram) return "bin";
    if (t.x_label().empty()) return "category";
    return lower_first(t.x_label());
}

std::string measure(const DataTable& t) {
    if (!t.y_label().empty()) return t.y_label();
    if (t.cols() == 1) return t.col_labels()[0];
    return "value";
}

bool ordered_axis(ChartType type) {
    return type == ChartType::Line || type == ChartType::Area || type == ChartType::DotLine;
}

std::string trend_sentence(const DataTable& t, std::size_t c) {
    auto v = t.column_values(c);
    const auto& rows = t.row_labels();
    const std::string& name = t.col_labels()[c];
    double first = v.front(), last = v.back();
    std::string between = " between " + rows.front() + " and " + rows.back();
    if (last > first) return name + " increases from " + fmt(first) + " to " + fmt(last) + between + ".";
    if (last < first) return name + " decreases from " + fmt(first) + " to " + fmt(last) + between + ".";
    return name + " starts and ends at " + fmt(first) + between + ".";
}

std::string extrema_sentence(const DataTable& t, std::size_t c) {
    auto v = t.column_values(c);
    std::size_t hi = arg_best(v, true), lo = arg_best(v, false);
    const auto& rows = t.row_labels();
    return t.col_labels()[c] + " is highest for " + rows[hi] + " (" + fmt(v[hi]) + ") and lowest for " + rows[lo] +
           " (" + fmt(v[lo]) + ").";
}

std::string peak_sentence(const DataTable& t, std::size_t c) {
    auto v = t.column_values(c);
    std::size_t hi = arg_best(v, true);
    return t.col_labels()[c] + " peaks at " + fmt(v[hi]) + " in " + t.row_labels()[hi] + ".";
}

std::string row_sentence(const DataTable& t, std::size_t r) {
    std::string s = "At " + t.row_labels()[r] + ", ";
    std::size_t n = std::min<std::size_t>(t.cols(), 4);
    for (std::size_t c = 0; c < n; ++c) {
        if (c > 0) s += (c + 1 == n) ? " and " : ", ";
        s += t.col_labels()[c] + " is " + fmt(t.at(r, c).as_number());
    }
    return s + ".";
}

std::string overall_max_sentence(const DataTable& t) {
    std::size_t br = 0, bc = 0;
    for (std::size_t c = 0; c < t.cols(); ++c) {
        for (std::size_t r = 0; r < t.rows(); ++r) {
            if (t.at(r, c).as_number() > t.at(br, bc).as_number()) br = r, bc = c;
        }
    }
    return "Overall, " + t.col_labels()[bc] + " reaches the highest single value, " + fmt(t.at(br, bc).as_number()) +
           " for " + t.row_labels()[br] + ".";
}

std::string pie_sentence(const DataTable& t) {
    auto v = t.column_values(0);
    std::size_t hi = arg_best(v, true), lo = arg_best(v, false);
    const auto& rows = t.row_labels();
    return rows[hi] + " forms the largest slice (" + fmt(v[hi]) + "), while " + rows[lo] + " is the smallest (" +
           fmt(v[lo]) + ").";
}

std::string histogram_sentence(const DataTable& t) {
    auto v = t.column_values(0);
    std::size_t hi = arg_best(v, true), lo = arg_best(v, false);
    const auto& rows = t.row_labels();
    return "The most frequent bin is " + rows[hi] + " with " + fmt(v[hi]) + " observations, and the least frequent is " +
           rows[lo] + " with " + fmt(v[lo]) + ".";
}

std::string box_sentence(const DataTable& t) {
    auto med = t.column_values(2);
    std::size_t hi = arg_best(med, true), lo = arg_best(med, false);
    const auto& rows = t.row_labels();
    return rows[hi] + " has the highest median (" + fmt(med[hi]) + ") and " + rows[lo] + " the lowest (" +
           fmt(med[lo]) + ").";
}

std::string box_spread_sentence(const DataTable& t) {
    std::vector<double> span(t.rows());
    for (std::size_t r = 0; r < t.rows(); ++r) span[r] = t.at(r, 4).as_number() - t.at(r, 0).as_number();
    std::size_t w = arg_best(span, true);
    return "The widest spread belongs to " + t.row_labels()[w] + ", whose whiskers run from " +
           fmt(t.at(w, 0).as_number()) + " to " + fmt(t.at(w, 4).as_number()) + ".";
}

std::string bubble_sentence(const DataTable& t) {
    auto x = t.column_values(0), y = t.column_values(1), s = t.column_values(2);
    std::size_t bs = arg_best(s, true), bx = arg_best(x, true), by = arg_best(y, true);
    const auto& rows = t.row_labels();
    const auto& cols = t.col_labels();
    return rows[bs] + " has the largest " + lower_first(cols[2]) + " (" + fmt(s[bs]) + "). " + rows[bx] +
           " lies furthest right with a " + lower_first(cols[0]) + " of " + fmt(x[bx]) + ", and " + rows[by] +
           " sits highest with a " + lower_first(cols[1]) + " of " + fmt(y[by]) + ".";
}

std::string opening(const DataTable& t, ChartType type) {
    std::string what = t.title().empty() ? "The chart" : "The chart \"" + t.title() + "\"";
    switch (type) {
        case ChartType::Pie: return what + " splits " + lower_first(measure(t)) + " across " +
                                    pluralize(x_noun(t, type)) + ".";
        case ChartType::Histogram: return what + " shows how " + lower_first(measure(t)) + " is distributed over " +
                                          "equal-width bins.";
        case ChartType::Box: return what + " summarizes the distribution of " + lower_first(measure(t)) + " for each " +
                                    x_noun(t, type) + ".";
        case ChartType::Bubble: return what + " plots " + lower_first(t.col_labels()[1]) + " against " +
                                       lower_first(t.col_labels()[0]) + ", with bubble size showing " +
                                       lower_first(t.col_labels()[2]) + ".";
        default: break;
    }
    return what + " compares " + lower_first(measure(t)) + " across " + pluralize(x_noun(t, type)) + ".";
}

}  // namespace

std::string_view to_string(StubKind k) { return k == StubKind::OpenQa ? "open_qa" : "summary"; }

TextStub summary_stub(const DataTable& table, ChartType type, std::uint64_t seed) {
    Rng rng = make_rng(seed, 0x5A11);
    static const std::vector<std::string> asks = {
        "Summarize the chart.",
        "Write a short summary of what the chart shows.",
        "Describe the main findings of this chart.",
        "Give a brief description of the chart.",
    };
    TextStub s{StubKind::Summary, pick(rng, asks), opening(table, type), ""};
    switch (type) {
        case ChartType::Pie:
            s.response += " " + pie_sentence(table);
            s.rule = "pie_extrema";
            break;
        case ChartType::Histogram:
            s.response += " " + histogram_sentence(table);
            s.rule = "histogram_mode";
            break;
        case ChartType::Box:
            s.response += " " + box_sentence(table) + " " + box_spread_sentence(table);
            s.rule = "box_medians";
            break;
        case ChartType::Bubble:
            s.response += " " + bubble_sentence(table);
            s.rule = "bubble_extrema";
            break;
        default: {
            std::size_t n = std::min<std::size_t>(table.cols(), 3);
            for (std::size_t c = 0; c < n; ++c) {
                s.response += " " + (ordered_axis(type) ? trend_sentence(table, c) : extrema_sentence(table, c));
            }
            if (table.cols() > 1) s.response += " " + overall_max_sentence(table);
            s.rule = ordered_axis(type) ? "series_trends" : "series_extrema";
        }
    }
    return s;
}

TextStub open_qa_stub(const DataTable& table, ChartType type, std::uint64_t seed) {
    Rng rng = make_rng(seed, 0x09E4);
    TextStub s{StubKind::OpenQa, "", "", ""};
    switch (type) {
        case ChartType::Pie:
            s.instruction = "Which " + x_noun(table, type) + " dominates this chart, and which is least represented?";
            s.response = pie_sentence(table);
            s.rule = "pie_extrema";
            return s;
        case ChartType::Histogram:
            s.instruction = "Where are most of the observations concentrated?";
            s.response = histogram_sentence(table);
            s.rule = "histogram_mode";
            return s;
        case ChartType::Box:
            if (coin(rng)) {
                s.instruction = "Which " + x_noun(table, type) + " tends to have the highest values?";
                s.response = box_sentence(table);
                s.rule = "box_medians";
            } else {
                s.instruction = "Which " + x_noun(table, type) + " is the most spread out?";
                s.response = box_spread_sentence(table);
                s.rule = "box_spread";
            }
            return s;
        case ChartType::Bubble:
            s.instruction = "What stands out among the bubbles in this chart?";
            s.response = bubble_sentence(table);
            s.rule = "bubble_extrema";
            return s;
        default: break;
    }
    std::size_t c = uniform_int<std::size_t>(rng, 0, table.cols() - 1);
    const std::string& series = table.col_labels()[c];
    int choice = uniform_int(rng, 0, table.cols() > 1 ? 2 : 1);
    if (choice == 0) {
        s.instruction = ordered_axis(type) ? "How does " + series + " change over the chart?"
                                           : "Which " + x_noun(table, type) + " stands out for " + series + "?";
        s.response = ordered_axis(type) ? trend_sentence(table, c) + " " + peak_sentence(table, c)
                                        : extrema_sentence(table, c);
        s.rule = ordered_axis(type) ? "series_trend" : "series_extrema";
    } else if (choice == 1) {
        std::size_t r = uniform_int<std::size_t>(rng, 0, table.rows() - 1);
        s.instruction = "What does the chart show for " + table.row_labels()[r] + "?";
        s.response = row_sentence(table, r);
        s.rule = "row_values";
    } else {
        s.instruction = "Which series reaches the highest value, and where?";
        s.response = overall_max_sentence(table);
        s.rule = "overall_max";
    }
    return s;
}

std::vector<TextStub> open_qa_and_summary_stubs(const DataTable& table, ChartType type, std::uint64_t seed) {
    return {open_qa_stub(table, type, seed), summary_stub(table, type, seed)};
}

std::vector<double> extract_numbers(std::string_view text) {
    std::vector<double> out;
    std::size_t i = 0;
    auto digit = [&](std::size_t k) { return k < text.size() && std::isdigit(static_cast<unsigned char>(text[k])); };
    while (i < text.size()) {
        if (!digit(i) || (i > 0 && (std::isalpha(static_cast<unsigned char>(text[i - 1])) || digit(i - 1)))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (i > 0 && text[i - 1] == '-' && (i < 2 || !std::isalnum(static_cast<unsigned char>(text[i - 2])))) {
            start = i - 1;
        }
        while (digit(i) || (text[i] == ',' && digit(i + 1) && digit(i + 2) && digit(i + 3) && !digit(i + 4))) {
            ++i;
        }
        if (i < text.size() && text[i] == '.' && digit(i + 1)) {
            ++i;
            while (digit(i)) ++i;
        }
        if (auto v = parse_number(text.substr(start, i - start))) out.push_back(*v);
    }
    return out;
}

std::vector<double> ungrounded_numbers(std::string_view text, const DataTable& table) {
    std::set<std::string> known;
    auto add_text = [&](std::string_view s) {
        for (double v : extract_numbers(s)) known.insert(format_number(v));
    };
    add_text(table.title());
    add_text(table.x_label());
    add_text(table.y_label());
    for (const auto& l : table.row_labels()) add_text(l);
    for (const auto& l : table.col_labels()) add_text(l);
    for (const auto& row : table.cells()) {
        for (const auto& c : row) {
            if (c.is_number()) known.insert(format_number(c.as_number()));
            else add_text(c.as_text());
        }
    }
    std::vector<double> out;
    for (double v : extract_numbers(text)) {
        if (!known.count(format_number(v))) out.push_back(v);
    }
    return out;
}

}  // namespace chartforge
