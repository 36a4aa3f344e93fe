#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "chartforge/canvas.hpp"

namespace chartforge {

struct Palette {
    std::string_view name;
    std::array<Rgb, 10> colors;
};

struct Background {
    std::string_view name;
    Rgb figure;  // outside the plot area
    Rgb plot;    // inside the plot area
    Rgb grid;
    Rgb axis;
    Rgb text;
};

struct NamedColor {
    std::string_view name;
    Rgb rgb;
};

enum class LineStyle { Solid, Dashed, Dotted, DashDot };
enum class MarkerShape { Circle, Square, TriangleUp, TriangleDown, Diamond, Pentagon };
enum class LegendPosition { UpperRight, UpperLeft, LowerRight, LowerLeft, Top };

std::span<const Palette> palettes();
std::span<const Background> backgrounds();
std::span<const std::string_view> font_families();
std::span<const double> bar_width_factors();
/// Colors available to referring marks; the name is used in question text.
std::span<const NamedColor> mark_colors();

constexpr int kLineStyleCount = 4;
constexpr int kMarkerShapeCount = 6;
constexpr int kLegendPositionCount = 5;

std::string_view to_string(LineStyle s);
std::string_view to_string(MarkerShape s);
std::string_view to_string(LegendPosition p);

/// Dash pattern for a line of the given width.
DashPattern dash_pattern(LineStyle s, double width);

/// Every field is an index into a bundled catalog.
struct StyleSpec {
    int palette = 0;
    int font = 0;
    LineStyle line_style = LineStyle::Solid;
    MarkerShape marker = MarkerShape::Circle;
    LegendPosition legend = LegendPosition::UpperRight;
    int background = 0;
    int bar_width = 2;  // index into bar_width_factors()
    bool grid = true;
    std::uint64_t seed = 0;

    friend bool operator==(const StyleSpec&, const StyleSpec&) = default;
};

/// Uniform draw over every catalog.
StyleSpec style_sample(std::uint64_t seed);

/// Compact identifier of the visual fields (the seed is not part of it),
/// e.g. "p3.f1.l0.m4.g2.b0.w2.grid1". Parsed back by style_from_id.
std::string style_id(const StyleSpec& s);
/// Throws InvalidParams on malformed ids or out-of-range indices.
StyleSpec style_from_id(std::string_view id);

/// Throws InvalidParams when an index is outside its catalog.
void validate(const StyleSpec& s);

}  // namespace chartforge
