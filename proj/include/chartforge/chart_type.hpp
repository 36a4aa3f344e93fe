#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace chartforge {

enum class ChartType { Bar, Line, DotLine, Pie, Area, Histogram, Radar, Bubble, Box };

inline constexpr std::array<ChartType, 9> kAllChartTypes = {
    ChartType::Bar,       ChartType::Line,  ChartType::DotLine, ChartType::Pie,  ChartType::Area,
    ChartType::Histogram, ChartType::Radar, ChartType::Bubble,  ChartType::Box,
};

constexpr std::string_view to_string(ChartType t) {
    switch (t) {
        case ChartType::Bar: return "bar";
        case ChartType::Line: return "line";
        case ChartType::DotLine: return "dot-line";
        case ChartType::Pie: return "pie";
        case ChartType::Area: return "area";
        case ChartType::Histogram: return "histogram";
        case ChartType::Radar: return "radar";
        case ChartType::Bubble: return "bubble";
        case ChartType::Box: return "box";
    }
    return "bar";
}

constexpr std::optional<ChartType> chart_type_from_string(std::string_view s) {
    for (auto t : kAllChartTypes) {
        if (to_string(t) == s) return t;
    }
    if (s == "dot_line" || s == "dotline") return ChartType::DotLine;
    if (s == "box-plot" || s == "boxplot") return ChartType::Box;
    if (s == "hist") return ChartType::Histogram;
    return std::nullopt;
}

/// Bar, line, dot-line, area and radar plot one value per (category, series).
constexpr bool is_series_chart(ChartType t) {
    return t == ChartType::Bar || t == ChartType::Line || t == ChartType::DotLine ||
           t == ChartType::Area || t == ChartType::Radar;
}

}  // namespace chartforge
