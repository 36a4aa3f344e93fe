#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chartforge/canvas.hpp"
#include "chartforge/chart_type.hpp"
#include "chartforge/rng.hpp"
#include "chartforge/style.hpp"
#include "chartforge/table.hpp"

namespace chartforge {

constexpr int kDefaultCanvasSize = 448;

struct ChartSpec {
    ChartType chart_type = ChartType::Bar;
    StyleSpec style;
    int width_px = kDefaultCanvasSize;
    int height_px = kDefaultCanvasSize;
};

struct PixelRect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool contains(const PixelRect& o) const {
        return o.x >= x && o.y >= y && o.x + o.w <= x + w && o.y + o.h <= y + h;
    }
    bool within(int width, int height) const { return x >= 0 && y >= 0 && w > 0 && h > 0 && x + w <= width && y + h <= height; }
    Point center() const { return {x + w / 2.0, y + h / 2.0}; }
    friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

/// A drawn data element. `series` is the table column and `category` the
/// row; charts with one element per row (pie, bubble, histogram, box) use
/// series 0.
struct ElementRef {
    int series = 0;
    int category = 0;
    friend auto operator<=>(const ElementRef&, const ElementRef&) = default;
};

struct ElementBox {
    ElementRef ref;
    PixelRect rect;
};

struct LegendEntry {
    std::string label;
    PixelRect rect;
};

enum class MarkKind { Box, Arrow };

std::string_view to_string(MarkKind k);

/// A referring mark. A box encloses its target (and the second target, when
/// given); an arrow points at its target, or joins two targets.
struct ReferMark {
    MarkKind kind = MarkKind::Box;
    ElementRef target;
    std::optional<ElementRef> second;
    std::string color = "red";  // a name from mark_colors()
    double stroke = 3.0;
    double size = 5.0;  // box padding, or arrow length
};

struct PlacedMark {
    ReferMark mark;
    PixelRect rect;  // extent of everything drawn for the mark
    Point tail;      // arrows only
    Point head;
    int z = 0;       // drawing order, 0 first
};

struct RenderResult {
    ChartType chart_type = ChartType::Bar;
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> png;
    std::vector<std::uint8_t> rgb;  // raster the PNG was encoded from
    std::vector<ElementBox> element_boxes;
    std::vector<LegendEntry> legend;
    PixelRect axis_box;
    std::vector<PlacedMark> marks;

    const ElementBox* find(ElementRef ref) const;
};

/// Throws IncompatibleChartType when `table` cannot be drawn as `type`.
void check_compatible(const DataTable& table, ChartType type);
bool is_compatible(const DataTable& table, ChartType type);

/// Deterministic in (table, spec, seed).
RenderResult render(const DataTable& table, const ChartSpec& spec, std::uint64_t seed);

/// Draws `marks` in order on top of the chart and records their geometry.
/// Throws UnknownTarget if a target has no element box.
RenderResult apply_refer_marks(const RenderResult& result, std::span<const ReferMark> marks, std::uint64_t seed);

/// Random color, stroke and size for a mark on `target`.
ReferMark sample_refer_mark(Rng& rng, MarkKind kind, ElementRef target);

/// [{series, category, x, y, w, h}, ...]
nlohmann::ordered_json element_boxes_json(const RenderResult& result);

}  // namespace chartforge
