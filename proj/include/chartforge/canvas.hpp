#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace chartforge {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Dash pattern in pixels (on, off, on, off, ...); empty means solid.
using DashPattern = std::vector<double>;

enum class TextAnchor { Start, Middle, End };

namespace detail {
struct FontFaceData;
}

/// A face at one pixel size from the embedded font table.
class Font {
public:
    /// `family` is one of sans, sans-bold, serif, mono; the closest bundled
    /// pixel size is used.
    Font(std::string_view family, int pixel_size);

    int ascent() const;
    int descent() const;
    int line_height() const { return ascent() + descent(); }
    int measure(std::string_view text) const;

    const detail::FontFaceData& face() const { return *face_; }

private:
    const detail::FontFaceData* face_;
};

/// RGB raster with anti-aliased primitives. Coordinates are in pixels with
/// (0, 0) at the top-left corner of the top-left pixel.
class Canvas {
public:
    Canvas(int width, int height, Rgb background);
    /// Wraps existing row-major RGB pixels.
    Canvas(int width, int height, std::vector<std::uint8_t> rgb);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    const std::vector<std::uint8_t>& pixels() const noexcept { return pixels_; }
    Rgb pixel(int x, int y) const;

    /// Blends `c` over pixel (x, y) with coverage `alpha` in [0, 1].
    void blend(int x, int y, Rgb c, double alpha);

    void fill_rect(double x0, double y0, double x1, double y1, Rgb c, double alpha = 1.0);
    void stroke_rect(double x0, double y0, double x1, double y1, double width, Rgb c);
    void line(Point a, Point b, double width, Rgb c, const DashPattern& dash = {}, double alpha = 1.0);
    void polyline(const std::vector<Point>& pts, double width, Rgb c, const DashPattern& dash = {});
    void fill_polygon(const std::vector<Point>& pts, Rgb c, double alpha = 1.0);
    void fill_circle(Point center, double radius, Rgb c, double alpha = 1.0);
    void stroke_circle(Point center, double radius, double width, Rgb c);

    /// Draws `text` with its baseline at y. Returns the advance width.
    int text(double x, double baseline, std::string_view text, const Font& font, Rgb c,
             TextAnchor anchor = TextAnchor::Start);
    /// Text rotated 90 degrees counter-clockwise, reading bottom to top,
    /// centered on (cx, cy).
    void text_vertical(double cx, double cy, std::string_view text, const Font& font, Rgb c);

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> pixels_;

    void capsule(Point a, Point b, double half_width, Rgb c, double alpha);
};

}  // namespace chartforge
