#include "chartforge/canvas.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "chartforge/detail/font_data.hpp"
#include "chartforge/error.hpp"

namespace chartforge {

namespace {

const detail::GlyphData& glyph(const detail::FontFaceData& face, char ch) {
    auto code = static_cast<unsigned char>(ch);
    if (code < 32 || code > 126) code = '?';
    return face.glyphs[code - 32];
}

double dist_to_segment(double px, double py, Point a, Point b) {
    double dx = b.x - a.x;
    double dy = b.y - a.y;
    double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? std::clamp(((px - a.x) * dx + (py - a.y) * dy) / len2, 0.0, 1.0) : 0.0;
    double qx = a.x + t * dx - px;
    double qy = a.y + t * dy - py;
    return std::sqrt(qx * qx + qy * qy);
}

}  // namespace

Font::Font(std::string_view family, int pixel_size) : face_(nullptr) {
    for (std::size_t i = 0; i < detail::kFontFaceCount; ++i) {
        const auto& f = detail::kFontFaces[i];
        if (family != f.name) continue;
        if (!face_ || std::abs(f.pixel_size - pixel_size) < std::abs(face_->pixel_size - pixel_size)) face_ = &f;
    }
    if (!face_) throw InvalidParams("unknown font family '" + std::string(family) + "'");
}

int Font::ascent() const { return face_->ascent; }
int Font::descent() const { return face_->descent; }

int Font::measure(std::string_view text) const {
    int w = 0;
    for (char ch : text) w += glyph(*face_, ch).advance;
    return w;
}

Canvas::Canvas(int width, int height, Rgb background) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) throw InvalidParams("canvas size must be positive");
    pixels_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
    for (std::size_t i = 0; i < pixels_.size(); i += 3) {
        pixels_[i] = background.r;
        pixels_[i + 1] = background.g;
        pixels_[i + 2] = background.b;
    }
}

Canvas::Canvas(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), pixels_(std::move(rgb)) {
    if (width <= 0 || height <= 0 ||
        pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3) {
        throw InvalidParams("pixel buffer does not match the canvas size");
    }
}

Rgb Canvas::pixel(int x, int y) const {
    std::size_t i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
    return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
}

void Canvas::blend(int x, int y, Rgb c, double alpha) {
    if (x < 0 || y < 0 || x >= width_ || y >= height_ || alpha <= 0.0) return;
    alpha = std::min(alpha, 1.0);
    std::size_t i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
    auto mix = [alpha](std::uint8_t dst, std::uint8_t src) {
        return static_cast<std::uint8_t>(std::lround(dst + (src - dst) * alpha));
    };
    pixels_[i] = mix(pixels_[i], c.r);
    pixels_[i + 1] = mix(pixels_[i + 1], c.g);
    pixels_[i + 2] = mix(pixels_[i + 2], c.b);
}

void Canvas::fill_rect(double x0, double y0, double x1, double y1, Rgb c, double alpha) {
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    int ix0 = std::max(0, static_cast<int>(std::floor(x0)));
    int iy0 = std::max(0, static_cast<int>(std::floor(y0)));
    int ix1 = std::min(width_ - 1, static_cast<int>(std::ceil(x1)) - 1);
    int iy1 = std::min(height_ - 1, static_cast<int>(std::ceil(y1)) - 1);
    for (int y = iy0; y <= iy1; ++y) {
        double cy = std::min<double>(y + 1, y1) - std::max<double>(y, y0);
        for (int x = ix0; x <= ix1; ++x) {
            double cx = std::min<double>(x + 1, x1) - std::max<double>(x, x0);
            blend(x, y, c, alpha * cx * cy);
        }
    }
}

void Canvas::stroke_rect(double x0, double y0, double x1, double y1, double width, Rgb c) {
    double h = width / 2.0;
    fill_rect(x0 - h, y0 - h, x1 + h, y0 + h, c);
    fill_rect(x0 - h, y1 - h, x1 + h, y1 + h, c);
    fill_rect(x0 - h, y0 + h, x0 + h, y1 - h, c);
    fill_rect(x1 - h, y0 + h, x1 + h, y1 - h, c);
}

void Canvas::capsule(Point a, Point b, double half_width, Rgb c, double alpha) {
    int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - half_width - 1)));
    int x1 = std::min(width_ - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + half_width + 1)));
    int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - half_width - 1)));
    int y1 = std::min(height_ - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + half_width + 1)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            double d = dist_to_segment(x + 0.5, y + 0.5, a, b);
            double cov = std::clamp(half_width + 0.5 - d, 0.0, 1.0);
            if (cov > 0.0) blend(x, y, c, alpha * cov);
        }
    }
}

void Canvas::line(Point a, Point b, double width, Rgb c, const DashPattern& dash, double alpha) {
    if (dash.empty()) {
        capsule(a, b, width / 2.0, c, alpha);
        return;
    }
    double len = std::hypot(b.x - a.x, b.y - a.y);
    if (len == 0.0) return;
    double pos = 0.0;
    std::size_t k = 0;
    while (pos < len) {
        double seg = std::max(dash[k % dash.size()], 0.5);
        double end = std::min(len, pos + seg);
        if (k % 2 == 0) {
            Point p{a.x + (b.x - a.x) * pos / len, a.y + (b.y - a.y) * pos / len};
            Point q{a.x + (b.x - a.x) * end / len, a.y + (b.y - a.y) * end / len};
            capsule(p, q, width / 2.0, c, alpha);
        }
        pos = end;
        ++k;
    }
}

void Canvas::polyline(const std::vector<Point>& pts, double width, Rgb c, const DashPattern& dash) {
    if (pts.size() == 1) {
        capsule(pts[0], pts[0], width / 2.0, c, 1.0);
        return;
    }
    if (dash.empty()) {
        for (std::size_t i = 1; i < pts.size(); ++i) capsule(pts[i - 1], pts[i], width / 2.0, c, 1.0);
        return;
    }
    // Carry the dash phase across vertices.
    double period_pos = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        Point a = pts[i - 1];
        Point b = pts[i];
        double len = std::hypot(b.x - a.x, b.y - a.y);
        double pos = 0.0;
        while (pos < len) {
            double seg = std::max(dash[k % dash.size()], 0.5);
            double end = std::min(len, pos + seg - period_pos);
            if (k % 2 == 0) {
                Point p{a.x + (b.x - a.x) * pos / len, a.y + (b.y - a.y) * pos / len};
                Point q{a.x + (b.x - a.x) * end / len, a.y + (b.y - a.y) * end / len};
                capsule(p, q, width / 2.0, c, 1.0);
            }
            period_pos += end - pos;
            pos = end;
            if (period_pos >= seg - 1e-9) {
                period_pos = 0.0;
                ++k;
            }
        }
    }
}

void Canvas::fill_polygon(const std::vector<Point>& pts, Rgb c, double alpha) {
    if (pts.size() < 3) return;
    constexpr int kSub = 4;
    double ymin = pts[0].y, ymax = pts[0].y;
    for (const auto& p : pts) {
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    int y0 = std::max(0, static_cast<int>(std::floor(ymin)));
    int y1 = std::min(height_ - 1, static_cast<int>(std::ceil(ymax)));
    std::vector<double> cover(static_cast<std::size_t>(width_));
    std::vector<double> xs;
    for (int y = y0; y <= y1; ++y) {
        std::fill(cover.begin(), cover.end(), 0.0);
        bool any = false;
        for (int s = 0; s < kSub; ++s) {
            double sy = y + (s + 0.5) / kSub;
            xs.clear();
            for (std::size_t i = 0; i < pts.size(); ++i) {
                Point a = pts[i];
                Point b = pts[(i + 1) % pts.size()];
                if ((a.y <= sy && b.y > sy) || (b.y <= sy && a.y > sy)) {
                    xs.push_back(a.x + (sy - a.y) * (b.x - a.x) / (b.y - a.y));
                }
            }
            std::sort(xs.begin(), xs.end());
            for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
                double xa = std::max(0.0, xs[i]);
                double xb = std::min(static_cast<double>(width_), xs[i + 1]);
                if (xb <= xa) continue;
                any = true;
                for (int x = static_cast<int>(std::floor(xa)); x < static_cast<int>(std::ceil(xb)); ++x) {
                    double ov = std::min<double>(x + 1, xb) - std::max<double>(x, xa);
                    cover[static_cast<std::size_t>(x)] += ov / kSub;
                }
            }
        }
        if (!any) continue;
        for (int x = 0; x < width_; ++x) {
            if (cover[static_cast<std::size_t>(x)] > 0.0) blend(x, y, c, alpha * cover[static_cast<std::size_t>(x)]);
        }
    }
}

void Canvas::fill_circle(Point center, double radius, Rgb c, double alpha) {
    int x0 = std::max(0, static_cast<int>(std::floor(center.x - radius - 1)));
    int x1 = std::min(width_ - 1, static_cast<int>(std::ceil(center.x + radius + 1)));
    int y0 = std::max(0, static_cast<int>(std::floor(center.y - radius - 1)));
    int y1 = std::min(height_ - 1, static_cast<int>(std::ceil(center.y + radius + 1)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            double d = std::hypot(x + 0.5 - center.x, y + 0.5 - center.y);
            double cov = std::clamp(radius + 0.5 - d, 0.0, 1.0);
            if (cov > 0.0) blend(x, y, c, alpha * cov);
        }
    }
}

void Canvas::stroke_circle(Point center, double radius, double width, Rgb c) {
    double hw = width / 2.0;
    int x0 = std::max(0, static_cast<int>(std::floor(center.x - radius - hw - 1)));
    int x1 = std::min(width_ - 1, static_cast<int>(std::ceil(center.x + radius + hw + 1)));
    int y0 = std::max(0, static_cast<int>(std::floor(center.y - radius - hw - 1)));
    int y1 = std::min(height_ - 1, static_cast<int>(std::ceil(center.y + radius + hw + 1)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            double d = std::hypot(x + 0.5 - center.x, y + 0.5 - center.y);
            double cov = std::clamp(hw + 0.5 - std::fabs(d - radius), 0.0, 1.0);
            if (cov > 0.0) blend(x, y, c, cov);
        }
    }
}

int Canvas::text(double x, double baseline, std::string_view str, const Font& font, Rgb c, TextAnchor anchor) {
    const auto& face = font.face();
    int w = font.measure(str);
    double start = x;
    if (anchor == TextAnchor::Middle) start -= w / 2.0;
    if (anchor == TextAnchor::End) start -= w;
    int pen = static_cast<int>(std::lround(start));
    int base = static_cast<int>(std::lround(baseline));
    for (char ch : str) {
        const auto& g = glyph(face, ch);
        const unsigned char* bits = face.bitmap + g.offset;
        for (int r = 0; r < g.height; ++r) {
            for (int q = 0; q < g.width; ++q) {
                unsigned char cov = bits[r * g.width + q];
                if (cov) blend(pen + g.x_off + q, base + g.y_off + r, c, cov / 255.0);
            }
        }
        pen += g.advance;
    }
    return w;
}

void Canvas::text_vertical(double cx, double cy, std::string_view str, const Font& font, Rgb c) {
    const auto& face = font.face();
    int w = font.measure(str);
    int h = font.line_height();
    if (w == 0 || h == 0) return;
    std::vector<unsigned char> buf(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    int pen = 0;
    for (char ch : str) {
        const auto& g = glyph(face, ch);
        const unsigned char* bits = face.bitmap + g.offset;
        for (int r = 0; r < g.height; ++r) {
            for (int q = 0; q < g.width; ++q) {
                int u = pen + g.x_off + q;
                int v = font.ascent() + g.y_off + r;
                if (u < 0 || v < 0 || u >= w || v >= h) continue;
                auto& dst = buf[static_cast<std::size_t>(v) * static_cast<std::size_t>(w) + static_cast<std::size_t>(u)];
                dst = std::max(dst, bits[r * g.width + q]);
            }
        }
        pen += g.advance;
    }
    int left = static_cast<int>(std::lround(cx - h / 2.0));
    int bottom = static_cast<int>(std::lround(cy + w / 2.0));
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            unsigned char cov = buf[static_cast<std::size_t>(v) * static_cast<std::size_t>(w) + static_cast<std::size_t>(u)];
            if (cov) blend(left + v, bottom - 1 - u, c, cov / 255.0);
        }
    }
}

}  // namespace chartforge
