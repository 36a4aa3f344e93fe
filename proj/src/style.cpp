#include "chartforge/style.hpp"

#include <charconv>
#include <cstdio>
#include <vector>

#include "chartforge/error.hpp"
#include "chartforge/rng.hpp"

namespace chartforge {

namespace {

constexpr Rgb hex(std::uint32_t v) {
    return {static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
}

constexpr std::array<Palette, 8> kPalettes{{
    {"category10", {hex(0x1F77B4), hex(0xFF7F0E), hex(0x2CA02C), hex(0xD62728), hex(0x9467BD), hex(0x8C564B),
                    hex(0xE377C2), hex(0x7F7F7F), hex(0xBCBD22), hex(0x17BECF)}},
    {"set1", {hex(0xE41A1C), hex(0x377EB8), hex(0x4DAF4A), hex(0x984EA3), hex(0xFF7F00), hex(0xA65628),
              hex(0xF781BF), hex(0x999999), hex(0x66C2A5), hex(0xB3B300)}},
    {"dark", {hex(0x1B9E77), hex(0xD95F02), hex(0x7570B3), hex(0xE7298A), hex(0x66A61E), hex(0xE6AB02),
              hex(0xA6761D), hex(0x666666), hex(0x386CB0), hex(0xBF5B17)}},
    {"pastel", {hex(0x8DD3C7), hex(0xFB8072), hex(0x80B1D3), hex(0xFDB462), hex(0xB3DE69), hex(0xBC80BD),
                hex(0xBEBADA), hex(0xFCCDE5), hex(0xCCEBC5), hex(0xD9C45A)}},
    {"okabe-ito", {hex(0xE69F00), hex(0x56B4E9), hex(0x009E73), hex(0xD5C500), hex(0x0072B2), hex(0xD55E00),
                   hex(0xCC79A7), hex(0x555555), hex(0x882255), hex(0x44AA99)}},
    {"viridis", {hex(0x440154), hex(0x482878), hex(0x3E4A89), hex(0x31688E), hex(0x26828E), hex(0x1F9E89),
                 hex(0x35B779), hex(0x6DCD59), hex(0xB4DE2C), hex(0xE3C800)}},
    {"warm", {hex(0xB2182B), hex(0xEF8A62), hex(0x8C510A), hex(0xD6604D), hex(0xF4A582), hex(0x762A83),
              hex(0xBF812D), hex(0x67001F), hex(0xE08214), hex(0x9E0142)}},
    {"cool", {hex(0x08519C), hex(0x3182BD), hex(0x31A354), hex(0x756BB1), hex(0x006D2C), hex(0x6BAED6),
              hex(0x54278F), hex(0x41B6C4), hex(0x253494), hex(0x74C476)}},
}};

constexpr std::array<Background, 5> kBackgrounds{{
    {"white", hex(0xFFFFFF), hex(0xFFFFFF), hex(0xDDDDDD), hex(0x333333), hex(0x222222)},
    {"whitesmoke", hex(0xF5F5F5), hex(0xFFFFFF), hex(0xE0E0E0), hex(0x444444), hex(0x222222)},
    {"ivory", hex(0xFBF8EF), hex(0xFFFDF6), hex(0xE4DFD0), hex(0x4A4033), hex(0x2B2620)},
    {"aliceblue", hex(0xF0F6FC), hex(0xFFFFFF), hex(0xD5E1EE), hex(0x2F3E4E), hex(0x1C2733)},
    {"gray-panel", hex(0xFFFFFF), hex(0xEBEBEB), hex(0xFFFFFF), hex(0x555555), hex(0x333333)},
}};

constexpr std::array<std::string_view, 4> kFonts{"sans", "sans-bold", "serif", "mono"};
constexpr std::array<double, 5> kBarWidths{0.5, 0.6, 0.7, 0.8, 0.9};

constexpr std::array<NamedColor, 8> kMarkColors{{
    {"red", hex(0xE00000)},
    {"blue", hex(0x0033DD)},
    {"green", hex(0x00A000)},
    {"orange", hex(0xFF8C00)},
    {"purple", hex(0x8000C0)},
    {"magenta", hex(0xE000E0)},
    {"black", hex(0x000000)},
    {"cyan", hex(0x00B8D8)},
}};

}  // namespace

std::span<const Palette> palettes() { return kPalettes; }
std::span<const Background> backgrounds() { return kBackgrounds; }
std::span<const std::string_view> font_families() { return kFonts; }
std::span<const double> bar_width_factors() { return kBarWidths; }
std::span<const NamedColor> mark_colors() { return kMarkColors; }

std::string_view to_string(LineStyle s) {
    switch (s) {
        case LineStyle::Solid: return "solid";
        case LineStyle::Dashed: return "dashed";
        case LineStyle::Dotted: return "dotted";
        case LineStyle::DashDot: return "dashdot";
    }
    return "?";
}

std::string_view to_string(MarkerShape s) {
    switch (s) {
        case MarkerShape::Circle: return "circle";
        case MarkerShape::Square: return "square";
        case MarkerShape::TriangleUp: return "triangle-up";
        case MarkerShape::TriangleDown: return "triangle-down";
        case MarkerShape::Diamond: return "diamond";
        case MarkerShape::Pentagon: return "pentagon";
    }
    return "?";
}

std::string_view to_string(LegendPosition p) {
    switch (p) {
        case LegendPosition::UpperRight: return "upper-right";
        case LegendPosition::UpperLeft: return "upper-left";
        case LegendPosition::LowerRight: return "lower-right";
        case LegendPosition::LowerLeft: return "lower-left";
        case LegendPosition::Top: return "top";
    }
    return "?";
}

DashPattern dash_pattern(LineStyle s, double width) {
    switch (s) {
        case LineStyle::Solid: return {};
        case LineStyle::Dashed: return {4.0 * width, 2.5 * width};
        case LineStyle::Dotted: return {1.0 * width, 1.6 * width};
        case LineStyle::DashDot: return {4.0 * width, 1.6 * width, 1.0 * width, 1.6 * width};
    }
    return {};
}

StyleSpec style_sample(std::uint64_t seed) {
    Rng rng = make_rng(seed, 0x57F1E);
    StyleSpec s;
    s.palette = uniform_int(rng, 0, static_cast<int>(kPalettes.size()) - 1);
    s.font = uniform_int(rng, 0, static_cast<int>(kFonts.size()) - 1);
    s.line_style = static_cast<LineStyle>(uniform_int(rng, 0, kLineStyleCount - 1));
    s.marker = static_cast<MarkerShape>(uniform_int(rng, 0, kMarkerShapeCount - 1));
    s.legend = static_cast<LegendPosition>(uniform_int(rng, 0, kLegendPositionCount - 1));
    s.background = uniform_int(rng, 0, static_cast<int>(kBackgrounds.size()) - 1);
    s.bar_width = uniform_int(rng, 0, static_cast<int>(kBarWidths.size()) - 1);
    s.grid = coin(rng, 0.5);
    s.seed = seed;
    return s;
}

void validate(const StyleSpec& s) {
    auto in = [](int v, std::size_t n) { return v >= 0 && static_cast<std::size_t>(v) < n; };
    if (!in(s.palette, kPalettes.size())) throw InvalidParams("palette index out of range");
    if (!in(s.font, kFonts.size())) throw InvalidParams("font index out of range");
    if (!in(static_cast<int>(s.line_style), kLineStyleCount)) throw InvalidParams("line style out of range");
    if (!in(static_cast<int>(s.marker), kMarkerShapeCount)) throw InvalidParams("marker out of range");
    if (!in(static_cast<int>(s.legend), kLegendPositionCount)) throw InvalidParams("legend position out of range");
    if (!in(s.background, kBackgrounds.size())) throw InvalidParams("background index out of range");
    if (!in(s.bar_width, kBarWidths.size())) throw InvalidParams("bar width index out of range");
}

std::string style_id(const StyleSpec& s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "p%d.f%d.l%d.m%d.g%d.b%d.w%d.grid%d", s.palette, s.font,
                  static_cast<int>(s.line_style), static_cast<int>(s.marker), static_cast<int>(s.legend),
                  s.background, s.bar_width, s.grid ? 1 : 0);
    return buf;
}

StyleSpec style_from_id(std::string_view id) {
    constexpr std::array<std::string_view, 8> keys{"p", "f", "l", "m", "g", "b", "w", "grid"};
    std::array<int, 8> v{};
    std::size_t pos = 0;
    for (std::size_t k = 0; k < keys.size(); ++k) {
        std::size_t end = id.find('.', pos);
        std::string_view part = id.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        if (part.substr(0, keys[k].size()) != keys[k]) throw InvalidParams("malformed style id '" + std::string(id) + "'");
        part.remove_prefix(keys[k].size());
        auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v[k]);
        if (ec != std::errc() || p != part.data() + part.size()) {
            throw InvalidParams("malformed style id '" + std::string(id) + "'");
        }
        if ((k + 1 < keys.size()) != (end != std::string_view::npos)) {
            throw InvalidParams("malformed style id '" + std::string(id) + "'");
        }
        pos = end + 1;
    }
    if (v[7] != 0 && v[7] != 1) throw InvalidParams("malformed style id '" + std::string(id) + "'");
    StyleSpec s;
    s.palette = v[0];
    s.font = v[1];
    s.line_style = static_cast<LineStyle>(v[2]);
    s.marker = static_cast<MarkerShape>(v[3]);
    s.legend = static_cast<LegendPosition>(v[4]);
    s.background = v[5];
    s.bar_width = v[6];
    s.grid = v[7] == 1;
    validate(s);
    return s;
}

}  // namespace chartforge
