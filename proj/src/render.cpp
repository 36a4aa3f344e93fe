#include "chartforge/render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chartforge/error.hpp"
#include "chartforge/png_io.hpp"

namespace chartforge {

namespace {

constexpr double kPointHalf = 5.0;  // half side of a point element box
constexpr double kLineWidth = 2.0;

struct Frame {
    double left = 0, top = 0, right = 0, bottom = 0;
    double w() const { return right - left; }
    double h() const { return bottom - top; }
};

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    double step = 0.2;
    std::vector<double> ticks;
};

double nice_number(double x, bool round) {
    double e = std::floor(std::log10(x));
    double f = x / std::pow(10.0, e);
    double nf;
    if (round) {
        nf = f < 1.5 ? 1 : f < 3 ? 2 : f < 7 ? 5 : 10;
    } else {
        nf = f <= 1 ? 1 : f <= 2 ? 2 : f <= 5 ? 5 : 10;
    }
    return nf * std::pow(10.0, e);
}

Axis nice_axis(double lo, double hi, int target = 5) {
    if (!(hi > lo)) {
        double pad = lo == 0.0 ? 1.0 : std::fabs(lo) * 0.1;
        lo -= pad;
        hi += pad;
    }
    Axis a;
    double range = nice_number(hi - lo, false);
    a.step = nice_number(range / (target - 1), true);
    a.lo = std::floor(lo / a.step) * a.step;
    a.hi = std::ceil(hi / a.step) * a.step;
    for (double v = a.lo; v <= a.hi + a.step * 0.5; v += a.step) a.ticks.push_back(std::fabs(v) < a.step * 1e-9 ? 0.0 : v);
    return a;
}

std::string tick_text(double v, double step) {
    int decimals = std::clamp(static_cast<int>(-std::floor(std::log10(step))), 0, 4);
    return format_number(quantize(v, decimals));
}

std::string fit_text(const std::string& s, const Font& f, int max_w) {
    if (f.measure(s) <= max_w) return s;
    std::string cut = s;
    while (!cut.empty() && f.measure(cut + "..") > max_w) cut.pop_back();
    while (!cut.empty() && cut.back() == ' ') cut.pop_back();
    return cut + "..";
}

PixelRect to_rect(double x0, double y0, double x1, double y1, int width, int height) {
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    int ix0 = std::clamp(static_cast<int>(std::floor(x0)), 0, width - 1);
    int iy0 = std::clamp(static_cast<int>(std::floor(y0)), 0, height - 1);
    int ix1 = std::clamp(static_cast<int>(std::ceil(x1)), ix0 + 1, width);
    int iy1 = std::clamp(static_cast<int>(std::ceil(y1)), iy0 + 1, height);
    return {ix0, iy0, ix1 - ix0, iy1 - iy0};
}

std::optional<std::pair<double, double>> parse_interval(const std::string& label) {
    if (label.size() < 5 || label.front() != '[' || (label.back() != ')' && label.back() != ']')) return std::nullopt;
    std::string body = label.substr(1, label.size() - 2);
    auto comma = body.find(", ");
    if (comma == std::string::npos) return std::nullopt;
    auto lo = parse_number(body.substr(0, comma));
    auto hi = parse_number(body.substr(comma + 2));
    if (!lo || !hi || *hi < *lo) return std::nullopt;
    return std::make_pair(*lo, *hi);
}

std::vector<Point> regular_polygon(Point c, double r, int n, double phase) {
    std::vector<Point> pts;
    for (int k = 0; k < n; ++k) {
        double a = phase + 2.0 * std::numbers::pi * k / n;
        pts.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
    }
    return pts;
}

void draw_marker(Canvas& cv, Point c, double r, MarkerShape shape, Rgb color) {
    constexpr double kUp = -std::numbers::pi / 2;
    switch (shape) {
        case MarkerShape::Circle: cv.fill_circle(c, r, color); break;
        case MarkerShape::Square: cv.fill_rect(c.x - r * 0.85, c.y - r * 0.85, c.x + r * 0.85, c.y + r * 0.85, color); break;
        case MarkerShape::TriangleUp: cv.fill_polygon(regular_polygon(c, r * 1.15, 3, kUp), color); break;
        case MarkerShape::TriangleDown: cv.fill_polygon(regular_polygon(c, r * 1.15, 3, -kUp), color); break;
        case MarkerShape::Diamond: cv.fill_polygon(regular_polygon(c, r * 1.15, 4, kUp), color); break;
        case MarkerShape::Pentagon: cv.fill_polygon(regular_polygon(c, r * 1.05, 5, kUp), color); break;
    }
}

Rgb darker(Rgb c, double f) {
    return {static_cast<std::uint8_t>(c.r * f), static_cast<std::uint8_t>(c.g * f), static_cast<std::uint8_t>(c.b * f)};
}

enum class Swatch { Box, Line, Marker };

struct LegendItem {
    std::string label;
    Rgb color;
};

class Renderer {
public:
    Renderer(const DataTable& table, const ChartSpec& spec, std::uint64_t seed)
        : t_(table),
          spec_(spec),
          rng_(make_rng(seed, 0x2E4D)),
          pal_(palettes()[static_cast<std::size_t>(spec.style.palette)]),
          bg_(backgrounds()[static_cast<std::size_t>(spec.style.background)]),
          cv_(spec.width_px, spec.height_px, bg_.figure),
          family_(font_families()[static_cast<std::size_t>(spec.style.font)]),
          tick_(family_, 10),
          label_(family_, 12),
          title_(family_ == "sans" ? "sans-bold" : family_, 15) {}

    RenderResult run() {
        out_.chart_type = spec_.chart_type;
        out_.width = cv_.width();
        out_.height = cv_.height();
        top_ = 8;
        draw_title();
        build_legend();
        switch (spec_.chart_type) {
            case ChartType::Bar: bar(); break;
            case ChartType::Line: line(false, false); break;
            case ChartType::DotLine: line(true, false); break;
            case ChartType::Area: line(false, true); break;
            case ChartType::Histogram: histogram(); break;
            case ChartType::Box: box(); break;
            case ChartType::Bubble: bubble(); break;
            case ChartType::Pie: pie(); break;
            case ChartType::Radar: radar(); break;
        }
        if (!legend_.empty() && !legend_on_top_) draw_corner_legend();
        out_.rgb = cv_.pixels();
        out_.png = encode_png(cv_.width(), cv_.height(), out_.rgb);
        return std::move(out_);
    }

private:
    const DataTable& t_;
    ChartSpec spec_;
    Rng rng_;
    const Palette& pal_;
    const Background& bg_;
    Canvas cv_;
    std::string_view family_;
    Font tick_;
    Font label_;
    Font title_;
    RenderResult out_;

    double top_ = 0;
    Frame frame_;
    Frame region_;  // area available to pie / radar
    std::vector<LegendItem> legend_;
    Swatch swatch_ = Swatch::Box;
    bool legend_on_top_ = false;

    int W() const { return cv_.width(); }
    int H() const { return cv_.height(); }
    Rgb series_color(std::size_t j) const { return pal_.colors[j % pal_.colors.size()]; }
    double value(std::size_t r, std::size_t c) const { return t_.at(r, c).as_number(); }

    void add_box(int series, int category, double x0, double y0, double x1, double y1) {
        out_.element_boxes.push_back({{series, category}, to_rect(x0, y0, x1, y1, W(), H())});
    }

    // -----------------------------------------------------------------------
    // Title and legend

    void draw_title() {
        if (t_.title().empty()) return;
        std::string s = fit_text(t_.title(), title_, W() - 20);
        cv_.text(W() / 2.0, top_ + title_.ascent(), s, title_, bg_.text, TextAnchor::Middle);
        top_ += title_.line_height() + 6;
    }

    void build_legend() {
        switch (spec_.chart_type) {
            case ChartType::Bar:
            case ChartType::Line:
            case ChartType::DotLine:
            case ChartType::Area:
            case ChartType::Radar:
                if (t_.cols() < 2 && spec_.chart_type != ChartType::Radar) return;
                for (std::size_t j = 0; j < t_.cols(); ++j) legend_.push_back({t_.col_labels()[j], series_color(j)});
                swatch_ = spec_.chart_type == ChartType::Bar ? Swatch::Box
                          : spec_.chart_type == ChartType::DotLine ? Swatch::Marker
                                                                   : Swatch::Line;
                if (spec_.chart_type == ChartType::Area || spec_.chart_type == ChartType::Radar) swatch_ = Swatch::Box;
                break;
            case ChartType::Pie:
            case ChartType::Bubble:
                for (std::size_t i = 0; i < t_.rows(); ++i) legend_.push_back({t_.row_labels()[i], series_color(i)});
                swatch_ = spec_.chart_type == ChartType::Pie ? Swatch::Box : Swatch::Marker;
                break;
            case ChartType::Histogram:
            case ChartType::Box:
                return;
        }
        for (auto& item : legend_) item.label = fit_text(item.label, tick_, 130);

        auto [w, h] = legend_size();
        legend_on_top_ = spec_.style.legend == LegendPosition::Top;
        bool radial = spec_.chart_type == ChartType::Pie || spec_.chart_type == ChartType::Radar;
        if (!legend_on_top_ && !radial && (w > 0.45 * (W() - 80) || h > 0.55 * (H() - top_ - 80))) legend_on_top_ = true;
        if (!legend_on_top_ && radial && (w > 0.35 * W() || h > H() - top_ - 16)) legend_on_top_ = true;
        if (legend_on_top_) draw_top_legend();
    }

    int entry_width(const LegendItem& item) const { return 14 + 5 + tick_.measure(item.label); }
    int entry_height() const { return std::max(tick_.line_height(), 10) + 4; }

    std::pair<int, int> legend_size() const {
        int w = 0;
        for (const auto& item : legend_) w = std::max(w, entry_width(item));
        return {w + 12, static_cast<int>(legend_.size()) * entry_height() + 8};
    }

    void draw_swatch(double x, double cy, Rgb c) {
        switch (swatch_) {
            case Swatch::Box: cv_.fill_rect(x, cy - 4, x + 14, cy + 4, c); break;
            case Swatch::Line: cv_.line({x, cy}, {x + 14, cy}, kLineWidth, c, dash_pattern(spec_.style.line_style, kLineWidth)); break;
            case Swatch::Marker:
                cv_.line({x, cy}, {x + 14, cy}, 1.5, c);
                draw_marker(cv_, {x + 7, cy}, 3.5, spec_.chart_type == ChartType::Bubble ? MarkerShape::Circle : spec_.style.marker, c);
                break;
        }
    }

    void draw_entry(double x, double y, const LegendItem& item) {
        double cy = y + entry_height() / 2.0;
        draw_swatch(x, cy, item.color);
        cv_.text(x + 19, cy + tick_.ascent() / 2.0 - 1, item.label, tick_, bg_.text);
        out_.legend.push_back({item.label, to_rect(x, y, x + entry_width(item), y + entry_height(), W(), H())});
    }

    void draw_top_legend() {
        double max_row = W() - 20;
        double x = 0;
        std::vector<std::vector<const LegendItem*>> lines(1);
        for (const auto& item : legend_) {
            double w = entry_width(item) + 12;
            if (x + w > max_row && !lines.back().empty()) {
                lines.emplace_back();
                x = 0;
            }
            lines.back().push_back(&item);
            x += w;
        }
        for (const auto& row : lines) {
            double total = 0;
            for (const auto* item : row) total += entry_width(*item) + 12;
            double cx = (W() - total + 12) / 2.0;
            for (const auto* item : row) {
                draw_entry(cx, top_, *item);
                cx += entry_width(*item) + 12;
            }
            top_ += entry_height();
        }
        top_ += 4;
    }

    void draw_corner_legend() {
        auto [w, h] = legend_size();
        const Frame& f = (spec_.chart_type == ChartType::Pie || spec_.chart_type == ChartType::Radar) ? region_ : frame_;
        bool right = spec_.style.legend == LegendPosition::UpperRight || spec_.style.legend == LegendPosition::LowerRight;
        bool upper = spec_.style.legend == LegendPosition::UpperRight || spec_.style.legend == LegendPosition::UpperLeft;
        auto place = [&](bool r, bool u) {
            double px = std::clamp(r ? f.right - w - 6 : f.left + 6, 1.0, W() - w - 1.0);
            double py = std::clamp(u ? f.top + 6 : f.bottom - h - 6, 1.0, H() - h - 1.0);
            return Point{px, py};
        };
        auto overlap = [&](Point p) {
            double area = 0.0;
            for (const auto& b : out_.element_boxes) {
                double ix = std::min(p.x + w, double(b.rect.x + b.rect.w)) - std::max(p.x, double(b.rect.x));
                double iy = std::min(p.y + h, double(b.rect.y + b.rect.h)) - std::max(p.y, double(b.rect.y));
                if (ix > 0 && iy > 0) area += ix * iy;
            }
            return area;
        };
        // The styled corner wins unless it hides data; then the least
        // obstructive corner is used.
        Point best = place(right, upper);
        if (&f == &frame_) {
            double best_cost = overlap(best);
            for (bool r : {right, !right}) {
                for (bool u : {upper, !upper}) {
                    Point p = place(r, u);
                    double c = overlap(p);
                    if (c < best_cost) best = p, best_cost = c;
                }
            }
        }
        double x = best.x, y = best.y;
        cv_.fill_rect(x, y, x + w, y + h, bg_.plot, 0.85);
        cv_.stroke_rect(x + 0.5, y + 0.5, x + w - 0.5, y + h - 0.5, 1.0, bg_.grid);
        double ey = y + 4;
        for (const auto& item : legend_) {
            draw_entry(x + 6, ey, item);
            ey += entry_height();
        }
    }

    // -----------------------------------------------------------------------
    // Cartesian frame

    double py(const Axis& a, double v) const { return frame_.bottom - (v - a.lo) / (a.hi - a.lo) * frame_.h(); }
    double px(const Axis& a, double v) const { return frame_.left + (v - a.lo) / (a.hi - a.lo) * frame_.w(); }
    double slot() const { return frame_.w() / static_cast<double>(t_.rows()); }
    double cx(std::size_t i) const { return frame_.left + slot() * (static_cast<double>(i) + 0.5); }

    std::string y_title() const {
        if (!t_.y_label().empty()) return t_.y_label();
        if (t_.cols() == 1 && spec_.chart_type != ChartType::Histogram) return t_.col_labels()[0];
        if (spec_.chart_type == ChartType::Histogram) return "Frequency";
        return "";
    }

    /// Lays out and draws axes. `x_numeric` switches the x axis from row
    /// categories to a value axis.
    void setup_frame(const Axis& y, const std::optional<Axis>& x_numeric, const std::string& x_title,
                     const std::string& y_title_text) {
        const int lh = tick_.line_height();
        int y_tick_w = 0;
        for (double v : y.ticks) y_tick_w = std::max(y_tick_w, tick_.measure(tick_text(v, y.step)));
        frame_.left = 8 + (y_title_text.empty() ? 0 : label_.line_height() + 4) + y_tick_w + 8;
        frame_.right = W() - 16;
        frame_.top = top_ + lh / 2.0 + 2;

        std::vector<std::string> labels;
        bool rotate = false;
        double label_band = lh + 6;
        if (!x_numeric) {
            double s = frame_.w() / static_cast<double>(t_.rows());
            int max_w = 0;
            for (const auto& l : t_.row_labels()) max_w = std::max(max_w, tick_.measure(l));
            if (max_w > s - 6) {
                rotate = true;
                int cap = static_cast<int>(0.26 * H());
                for (const auto& l : t_.row_labels()) labels.push_back(fit_text(l, tick_, cap));
                int longest = 0;
                for (const auto& l : labels) longest = std::max(longest, tick_.measure(l));
                label_band = longest + 8;
            } else {
                labels = t_.row_labels();
            }
        }
        frame_.bottom = H() - 8 - label_band - (x_title.empty() ? 0 : label_.line_height() + 4);
        out_.axis_box = to_rect(frame_.left, frame_.top, frame_.right, frame_.bottom, W(), H());

        cv_.fill_rect(frame_.left, frame_.top, frame_.right, frame_.bottom, bg_.plot);
        if (spec_.style.grid) {
            for (double v : y.ticks) cv_.line({frame_.left, py(y, v)}, {frame_.right, py(y, v)}, 1.0, bg_.grid);
            if (x_numeric) {
                for (double v : x_numeric->ticks) cv_.line({px(*x_numeric, v), frame_.top}, {px(*x_numeric, v), frame_.bottom}, 1.0, bg_.grid);
            }
        }
        cv_.line({frame_.left, frame_.top}, {frame_.left, frame_.bottom}, 1.0, bg_.axis);
        cv_.line({frame_.left, frame_.bottom}, {frame_.right, frame_.bottom}, 1.0, bg_.axis);

        for (double v : y.ticks) {
            double yy = py(y, v);
            cv_.line({frame_.left - 4, yy}, {frame_.left, yy}, 1.0, bg_.axis);
            cv_.text(frame_.left - 6, yy + tick_.ascent() / 2.0 - 1, tick_text(v, y.step), tick_, bg_.text, TextAnchor::End);
        }
        double label_top = frame_.bottom + 6;
        if (x_numeric) {
            for (double v : x_numeric->ticks) {
                double xx = px(*x_numeric, v);
                cv_.line({xx, frame_.bottom}, {xx, frame_.bottom + 4}, 1.0, bg_.axis);
                cv_.text(xx, label_top + tick_.ascent(), tick_text(v, x_numeric->step), tick_, bg_.text, TextAnchor::Middle);
            }
        } else {
            for (std::size_t i = 0; i < t_.rows(); ++i) {
                double xx = cx(i);
                cv_.line({xx, frame_.bottom}, {xx, frame_.bottom + 4}, 1.0, bg_.axis);
                if (rotate) {
                    double w = tick_.measure(labels[i]);
                    cv_.text_vertical(xx, label_top + w / 2.0, labels[i], tick_, bg_.text);
                } else {
                    cv_.text(xx, label_top + tick_.ascent(), labels[i], tick_, bg_.text, TextAnchor::Middle);
                }
            }
        }
        if (!x_title.empty()) {
            std::string s = fit_text(x_title, label_, static_cast<int>(frame_.w()));
            cv_.text((frame_.left + frame_.right) / 2.0, H() - 8 - label_.descent(), s, label_, bg_.text, TextAnchor::Middle);
        }
        if (!y_title_text.empty()) {
            std::string s = fit_text(y_title_text, label_, static_cast<int>(frame_.h()));
            cv_.text_vertical(8 + label_.line_height() / 2.0, (frame_.top + frame_.bottom) / 2.0, s, label_, bg_.text);
        }
    }

    std::pair<double, double> value_extent(std::size_t c0, std::size_t c1) const {
        double lo = value(0, c0), hi = lo;
        for (std::size_t r = 0; r < t_.rows(); ++r) {
            for (std::size_t c = c0; c < c1; ++c) {
                lo = std::min(lo, value(r, c));
                hi = std::max(hi, value(r, c));
            }
        }
        return {lo, hi};
    }

    // -----------------------------------------------------------------------
    // Chart types

    void bar() {
        auto [lo, hi] = value_extent(0, t_.cols());
        Axis y = nice_axis(std::min(0.0, lo), std::max(0.0, hi));
        setup_frame(y, std::nullopt, t_.x_label(), y_title());
        double factor = bar_width_factors()[static_cast<std::size_t>(spec_.style.bar_width)];
        double group = slot() * factor;
        double bw = group / static_cast<double>(t_.cols());
        double base = py(y, 0.0);
        bool labels = coin(rng_, 0.3) && t_.rows() * t_.cols() <= 16;
        for (std::size_t i = 0; i < t_.rows(); ++i) {
            for (std::size_t j = 0; j < t_.cols(); ++j) {
                double x0 = frame_.left + slot() * static_cast<double>(i) + (slot() - group) / 2.0 + bw * static_cast<double>(j);
                double top = py(y, value(i, j));
                cv_.fill_rect(x0, std::min(top, base), x0 + bw, std::max(top, base), series_color(j));
                add_box(static_cast<int>(j), static_cast<int>(i), x0, std::min(top, base), x0 + bw, std::max(top, base));
                if (labels && bw >= 14) {
                    double ly = (value(i, j) >= 0 ? top - 3 : top + tick_.ascent() + 3);
                    cv_.text(x0 + bw / 2.0, ly, format_number(value(i, j)), tick_, bg_.text, TextAnchor::Middle);
                }
            }
        }
    }

    void line(bool markers, bool area) {
        auto [lo, hi] = value_extent(0, t_.cols());
        if (area) {
            lo = std::min(0.0, lo);
            hi = std::max(0.0, hi);
        } else {
            double pad = (hi - lo) * 0.05;
            lo -= pad;
            hi += pad;
        }
        Axis y = nice_axis(lo, hi);
        setup_frame(y, std::nullopt, t_.x_label(), y_title());
        DashPattern dash = dash_pattern(spec_.style.line_style, kLineWidth);
        for (std::size_t j = 0; j < t_.cols(); ++j) {
            std::vector<Point> pts;
            for (std::size_t i = 0; i < t_.rows(); ++i) pts.push_back({cx(i), py(y, value(i, j))});
            Rgb c = series_color(j);
            if (area) {
                std::vector<Point> poly = pts;
                double base = py(y, std::clamp(0.0, y.lo, y.hi));
                poly.push_back({pts.back().x, base});
                poly.push_back({pts.front().x, base});
                cv_.fill_polygon(poly, c, 0.35);
                cv_.polyline(pts, kLineWidth, c);
            } else {
                cv_.polyline(pts, kLineWidth, c, dash);
            }
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (markers) draw_marker(cv_, pts[i], 4.0, spec_.style.marker, c);
                add_box(static_cast<int>(j), static_cast<int>(i), pts[i].x - kPointHalf, pts[i].y - kPointHalf,
                        pts[i].x + kPointHalf, pts[i].y + kPointHalf);
            }
        }
    }

    void histogram() {
        auto [lo, hi] = value_extent(0, 1);
        Axis y = nice_axis(0.0, std::max(hi, 1.0));
        setup_frame(y, std::nullopt, t_.x_label(), y_title());
        Rgb c = series_color(0);
        double base = py(y, 0.0);
        for (std::size_t i = 0; i < t_.rows(); ++i) {
            double x0 = frame_.left + slot() * static_cast<double>(i);
            double top = py(y, value(i, 0));
            cv_.fill_rect(x0, top, x0 + slot(), base, c);
            cv_.stroke_rect(x0 + 0.5, top + 0.5, x0 + slot() - 0.5, base, 1.0, darker(c, 0.7));
            add_box(0, static_cast<int>(i), x0, top, x0 + slot(), base);
        }
    }

    void box() {
        auto [lo, hi] = value_extent(0, 5);
        double pad = (hi - lo) * 0.05;
        Axis y = nice_axis(lo - pad, hi + pad);
        setup_frame(y, std::nullopt, t_.x_label(), t_.y_label());
        double factor = bar_width_factors()[static_cast<std::size_t>(spec_.style.bar_width)];
        double half = slot() * factor * 0.35;
        for (std::size_t i = 0; i < t_.rows(); ++i) {
            double x = cx(i);
            double lw = py(y, value(i, 0)), q1 = py(y, value(i, 1)), med = py(y, value(i, 2)),
                   q3 = py(y, value(i, 3)), uw = py(y, value(i, 4));
            Rgb c = series_color(i);
            Rgb edge = darker(c, 0.6);
            cv_.line({x, uw}, {x, q3}, 1.5, edge);
            cv_.line({x, q1}, {x, lw}, 1.5, edge);
            cv_.line({x - half / 2, uw}, {x + half / 2, uw}, 1.5, edge);
            cv_.line({x - half / 2, lw}, {x + half / 2, lw}, 1.5, edge);
            cv_.fill_rect(x - half, q3, x + half, q1, c, 0.75);
            cv_.stroke_rect(x - half, q3, x + half, q1, 1.5, edge);
            cv_.line({x - half, med}, {x + half, med}, 2.5, edge);
            add_box(0, static_cast<int>(i), x - half - 1, uw - 1, x + half + 1, lw + 1);
        }
    }

    void bubble() {
        auto [xlo, xhi] = value_extent(0, 1);
        auto [ylo, yhi] = value_extent(1, 2);
        auto [slo, shi] = value_extent(2, 3);
        (void)slo;
        double xp = std::max((xhi - xlo) * 0.15, std::fabs(xhi) * 0.05 + 1e-9);
        double yp = std::max((yhi - ylo) * 0.15, std::fabs(yhi) * 0.05 + 1e-9);
        Axis x = nice_axis(xlo - xp, xhi + xp);
        Axis y = nice_axis(ylo - yp, yhi + yp);
        setup_frame(y, x, t_.col_labels()[0], t_.col_labels()[1]);
        double rmax = std::clamp(frame_.w() / 12.0, 10.0, 28.0);
        double rmin = 4.0;
        for (std::size_t i = 0; i < t_.rows(); ++i) {
            Point c{px(x, value(i, 0)), py(y, value(i, 1))};
            double r = rmin + (rmax - rmin) * std::sqrt(value(i, 2) / shi);
            Rgb col = series_color(i);
            cv_.fill_circle(c, r, col, 0.6);
            cv_.stroke_circle(c, r, 1.2, darker(col, 0.7));
            add_box(0, static_cast<int>(i), c.x - r - 1, c.y - r - 1, c.x + r + 1, c.y + r + 1);
        }
    }

    void radial_region() {
        region_ = {8.0, top_, W() - 8.0, H() - 8.0};
        if (!legend_.empty() && !legend_on_top_) {
            auto [w, h] = legend_size();
            (void)h;
            bool right = spec_.style.legend == LegendPosition::UpperRight || spec_.style.legend == LegendPosition::LowerRight;
            if (right) {
                region_.right -= w + 8;
            } else {
                region_.left += w + 8;
            }
        }
    }

    void pie() {
        radial_region();
        Point c{(region_.left + region_.right) / 2.0, (region_.top + region_.bottom) / 2.0};
        double r = std::max(20.0, std::min(region_.w(), region_.h()) / 2.0 - 10.0);
        out_.axis_box = to_rect(c.x - r, c.y - r, c.x + r, c.y + r, W(), H());
        double total = 0.0;
        for (std::size_t i = 0; i < t_.rows(); ++i) total += value(i, 0);
        double start = coin(rng_, 0.5) ? -std::numbers::pi / 2 : 0.0;
        double a0 = start;
        for (std::size_t i = 0; i < t_.rows(); ++i) {
            double sweep = 2.0 * std::numbers::pi * value(i, 0) / total;
            std::vector<Point> poly{c};
            int steps = std::max(2, static_cast<int>(std::ceil(sweep / (std::numbers::pi / 90))));
            for (int k = 0; k <= steps; ++k) {
                double a = a0 + sweep * k / steps;
                poly.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
            }
            cv_.fill_polygon(poly, series_color(i));
            double x0 = poly[0].x, x1 = x0, y0 = poly[0].y, y1 = y0;
            for (const auto& p : poly) {
                x0 = std::min(x0, p.x);
                x1 = std::max(x1, p.x);
                y0 = std::min(y0, p.y);
                y1 = std::max(y1, p.y);
            }
            add_box(0, static_cast<int>(i), x0, y0, x1, y1);
            a0 += sweep;
        }
        // wedge separators and percentage labels
        a0 = start;
        for (std::size_t i = 0; i < t_.rows(); ++i) {
            double sweep = 2.0 * std::numbers::pi * value(i, 0) / total;
            if (t_.rows() > 1) cv_.line(c, {c.x + r * std::cos(a0), c.y + r * std::sin(a0)}, 1.5, bg_.figure);
            if (sweep > 0.32) {
                double mid = a0 + sweep / 2.0;
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * value(i, 0) / total);
                Point at{c.x + 0.62 * r * std::cos(mid), c.y + 0.62 * r * std::sin(mid)};
                cv_.text(at.x, at.y + tick_.ascent() / 2.0, buf, tick_, Rgb{255, 255, 255}, TextAnchor::Middle);
            }
            a0 += sweep;
        }
    }

    void radar() {
        radial_region();
        std::size_t n = t_.rows();
        std::vector<std::string> labels;
        int max_w = 0;
        for (const auto& l : t_.row_labels()) {
            labels.push_back(fit_text(l, tick_, 80));
            max_w = std::max(max_w, tick_.measure(labels.back()));
        }
        Point c{(region_.left + region_.right) / 2.0, (region_.top + region_.bottom) / 2.0};
        double r = std::min(region_.w() / 2.0 - max_w - 10.0, region_.h() / 2.0 - tick_.line_height() - 8.0);
        r = std::max(r, 30.0);
        out_.axis_box = to_rect(c.x - r, c.y - r, c.x + r, c.y + r, W(), H());
        auto [lo, hi] = value_extent(0, t_.cols());
        (void)lo;
        Axis a = nice_axis(0.0, std::max(hi, 1e-9), 5);
        auto spoke = [&](std::size_t i, double frac) {
            double ang = -std::numbers::pi / 2 + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
            return Point{c.x + frac * r * std::cos(ang), c.y + frac * r * std::sin(ang)};
        };
        cv_.fill_polygon([&] {
            std::vector<Point> p;
            for (std::size_t i = 0; i < n; ++i) p.push_back(spoke(i, 1.0));
            return p;
        }(), bg_.plot);
        for (std::size_t k = 1; k < a.ticks.size(); ++k) {
            if (!spec_.style.grid && k + 1 != a.ticks.size()) continue;
            double frac = (a.ticks[k] - a.lo) / (a.hi - a.lo);
            std::vector<Point> ring;
            for (std::size_t i = 0; i <= n; ++i) ring.push_back(spoke(i % n, frac));
            cv_.polyline(ring, 1.0, k + 1 == a.ticks.size() ? bg_.axis : bg_.grid);
            cv_.text(c.x + 3, spoke(0, frac).y + tick_.ascent() + 1, tick_text(a.ticks[k], a.step), tick_, bg_.text);
        }
        for (std::size_t i = 0; i < n; ++i) {
            cv_.line(c, spoke(i, 1.0), 1.0, bg_.grid);
            Point lp = spoke(i, 1.0);
            double ang = std::atan2(lp.y - c.y, lp.x - c.x);
            double dx = std::cos(ang), dy = std::sin(ang);
            TextAnchor anchor = dx > 0.2 ? TextAnchor::Start : dx < -0.2 ? TextAnchor::End : TextAnchor::Middle;
            double tx = lp.x + dx * 6;
            double ty = lp.y + dy * 6 + tick_.ascent() / 2.0 + (dy > 0.5 ? tick_.ascent() / 2.0 : dy < -0.5 ? -tick_.ascent() / 2.0 : 0);
            cv_.text(tx, ty, labels[i], tick_, bg_.text, anchor);
        }
        for (std::size_t j = 0; j < t_.cols(); ++j) {
            std::vector<Point> pts;
            for (std::size_t i = 0; i < n; ++i) pts.push_back(spoke(i, (value(i, j) - a.lo) / (a.hi - a.lo)));
            Rgb col = series_color(j);
            cv_.fill_polygon(pts, col, 0.2);
            std::vector<Point> closed = pts;
            closed.push_back(pts.front());
            cv_.polyline(closed, kLineWidth, col, dash_pattern(spec_.style.line_style, kLineWidth));
            for (std::size_t i = 0; i < n; ++i) {
                draw_marker(cv_, pts[i], 3.0, spec_.style.marker, col);
                add_box(static_cast<int>(j), static_cast<int>(i), pts[i].x - kPointHalf, pts[i].y - kPointHalf,
                        pts[i].x + kPointHalf, pts[i].y + kPointHalf);
            }
        }
    }
};

Rgb mark_rgb(const std::string& name) {
    for (const auto& c : mark_colors()) {
        if (c.name == name) return c.rgb;
    }
    throw InvalidParams("unknown mark color '" + name + "'");
}

PixelRect union_rect(const PixelRect& a, const PixelRect& b) {
    int x0 = std::min(a.x, b.x), y0 = std::min(a.y, b.y);
    int x1 = std::max(a.x + a.w, b.x + b.w), y1 = std::max(a.y + a.h, b.y + b.h);
    return {x0, y0, x1 - x0, y1 - y0};
}

/// Distance from the center of `r` to its edge along (dx, dy).
double exit_distance(const PixelRect& r, double dx, double dy) {
    double tx = std::fabs(dx) > 1e-12 ? (r.w / 2.0) / std::fabs(dx) : 1e18;
    double ty = std::fabs(dy) > 1e-12 ? (r.h / 2.0) / std::fabs(dy) : 1e18;
    return std::min(tx, ty);
}

void draw_arrowhead(Canvas& cv, Point tip, double dx, double dy, double stroke, Rgb c, std::vector<Point>& extent) {
    double len = 3.0 * stroke + 5.0;
    double half = 1.6 * stroke + 3.0;
    Point back{tip.x - dx * len, tip.y - dy * len};
    Point l{back.x - dy * half, back.y + dx * half};
    Point r{back.x + dy * half, back.y - dx * half};
    cv.fill_polygon({tip, l, r}, c);
    extent.insert(extent.end(), {tip, l, r});
}

}  // namespace

std::string_view to_string(MarkKind k) { return k == MarkKind::Box ? "box" : "arrow"; }

const ElementBox* RenderResult::find(ElementRef ref) const {
    for (const auto& b : element_boxes) {
        if (b.ref == ref) return &b;
    }
    return nullptr;
}

void check_compatible(const DataTable& t, ChartType type) {
    auto fail = [&](const std::string& why) {
        throw IncompatibleChartType("cannot draw a " + std::string(to_string(type)) + " chart: " + why);
    };
    if (!t.all_numeric()) fail("the table has text cells");
    switch (type) {
        case ChartType::Bar: break;
        case ChartType::Line:
        case ChartType::DotLine:
        case ChartType::Area:
            if (t.rows() < 2) fail("needs at least two x ticks");
            break;
        case ChartType::Pie:
            if (t.cols() != 1) fail("needs exactly one column");
            for (std::size_t r = 0; r < t.rows(); ++r) {
                if (!(t.at(r, 0).as_number() > 0.0)) fail("slice values must be positive");
            }
            break;
        case ChartType::Radar:
            if (t.rows() < 3 || t.rows() > 12) fail("needs 3 to 12 axes");
            for (std::size_t r = 0; r < t.rows(); ++r) {
                for (std::size_t c = 0; c < t.cols(); ++c) {
                    if (t.at(r, c).as_number() < 0.0) fail("values must be non-negative");
                }
            }
            break;
        case ChartType::Bubble:
            if (t.cols() != 3) fail("needs x, y and size columns");
            for (std::size_t r = 0; r < t.rows(); ++r) {
                if (!(t.at(r, 2).as_number() > 0.0)) fail("bubble sizes must be positive");
            }
            break;
        case ChartType::Histogram:
            if (t.cols() != 1) fail("needs exactly one frequency column");
            for (std::size_t r = 0; r < t.rows(); ++r) {
                if (!parse_interval(t.row_labels()[r])) fail("row '" + t.row_labels()[r] + "' is not a bin interval");
                if (t.at(r, 0).as_number() < 0.0) fail("frequencies must be non-negative");
            }
            break;
        case ChartType::Box:
            if (t.cols() != 5) fail("needs five summary columns");
            for (std::size_t r = 0; r < t.rows(); ++r) {
                for (std::size_t c = 1; c < 5; ++c) {
                    if (t.at(r, c).as_number() < t.at(r, c - 1).as_number()) fail("summary values must be ordered");
                }
            }
            break;
    }
}

bool is_compatible(const DataTable& table, ChartType type) {
    try {
        check_compatible(table, type);
        return true;
    } catch (const IncompatibleChartType&) {
        return false;
    }
}

RenderResult render(const DataTable& table, const ChartSpec& spec, std::uint64_t seed) {
    validate(spec.style);
    if (spec.width_px < 160 || spec.height_px < 160 || spec.width_px > 4096 || spec.height_px > 4096) {
        throw InvalidParams("canvas size must be between 160 and 4096 pixels");
    }
    check_compatible(table, spec.chart_type);
    return Renderer(table, spec, seed).run();
}

RenderResult apply_refer_marks(const RenderResult& result, std::span<const ReferMark> marks, std::uint64_t seed) {
    for (const auto& m : marks) {
        for (const auto& ref : {std::optional<ElementRef>(m.target), m.second}) {
            if (ref && !result.find(*ref)) {
                throw UnknownTarget("no element at series " + std::to_string(ref->series) + ", category " +
                                    std::to_string(ref->category));
            }
        }
        mark_rgb(m.color);
        if (!(m.stroke > 0.0) || !(m.size >= 0.0)) throw InvalidParams("mark stroke and size must be positive");
    }
    RenderResult out = result;
    Canvas cv(out.width, out.height, out.rgb);
    Rng rng = make_rng(seed, 0x3A4C);
    const int W = out.width, H = out.height;
    auto clamp_pt = [&](Point p) { return Point{std::clamp(p.x, 1.0, W - 2.0), std::clamp(p.y, 1.0, H - 2.0)}; };

    for (const auto& m : marks) {
        PlacedMark placed;
        placed.mark = m;
        placed.z = static_cast<int>(out.marks.size());
        Rgb color = mark_rgb(m.color);
        const PixelRect a = result.find(m.target)->rect;
        if (m.kind == MarkKind::Box) {
            PixelRect r = m.second ? union_rect(a, result.find(*m.second)->rect) : a;
            double pad = m.size + m.stroke / 2.0;
            double x0 = std::max(m.stroke / 2.0, r.x - pad);
            double y0 = std::max(m.stroke / 2.0, r.y - pad);
            double x1 = std::min(W - m.stroke / 2.0, r.x + r.w + pad);
            double y1 = std::min(H - m.stroke / 2.0, r.y + r.h + pad);
            cv.stroke_rect(x0, y0, x1, y1, m.stroke, color);
            placed.rect = union_rect(r, to_rect(x0 - m.stroke / 2.0, y0 - m.stroke / 2.0, x1 + m.stroke / 2.0,
                                                y1 + m.stroke / 2.0, W, H));
        } else {
            std::vector<Point> extent;
            if (m.second) {
                const PixelRect b = result.find(*m.second)->rect;
                Point pa = a.center(), pb = b.center();
                double len = std::hypot(pb.x - pa.x, pb.y - pa.y);
                double dx = len > 0 ? (pb.x - pa.x) / len : 1.0, dy = len > 0 ? (pb.y - pa.y) / len : 0.0;
                double head_len = 3.0 * m.stroke + 5.0;
                cv.line({pa.x + dx * head_len, pa.y + dy * head_len}, {pb.x - dx * head_len, pb.y - dy * head_len},
                        m.stroke, color);
                draw_arrowhead(cv, pb, dx, dy, m.stroke, color, extent);
                draw_arrowhead(cv, pa, -dx, -dy, m.stroke, color, extent);
                placed.tail = pa;
                placed.head = pb;
            } else {
                // Arrow pointing at the element from outside, first trying
                // the seeded direction, then its rotations.
                Point center = a.center();
                int start = uniform_int(rng, 0, 7);
                double jitter = uniform_real(rng, -0.25, 0.25);
                double best_len = -1.0;
                Point best_head{}, best_tail{};
                double best_dx = 0, best_dy = 0;
                for (int k = 0; k < 8; ++k) {
                    double ang = (start + k) * std::numbers::pi / 4.0 + jitter;
                    double dx = std::cos(ang), dy = std::sin(ang);
                    double gap = exit_distance(a, dx, dy) + 2.0;
                    Point head = clamp_pt({center.x + dx * gap, center.y + dy * gap});
                    // longest length keeping the tail inside the image
                    double margin = m.stroke + 2.0;
                    double lim = m.size;
                    if (dx > 1e-9) lim = std::min(lim, (W - margin - head.x) / dx);
                    if (dx < -1e-9) lim = std::min(lim, (margin - head.x) / dx);
                    if (dy > 1e-9) lim = std::min(lim, (H - margin - head.y) / dy);
                    if (dy < -1e-9) lim = std::min(lim, (margin - head.y) / dy);
                    lim = std::max(lim, 0.0);
                    if (lim > best_len) {
                        best_len = lim;
                        best_head = head;
                        best_tail = {head.x + dx * lim, head.y + dy * lim};
                        best_dx = dx;
                        best_dy = dy;
                    }
                    if (lim >= m.size - 1e-9) break;
                }
                // the arrow points from tail to head, i.e. along -direction
                draw_arrowhead(cv, best_head, -best_dx, -best_dy, m.stroke, color, extent);
                double head_len = 3.0 * m.stroke + 5.0;
                if (best_len > head_len) {
                    cv.line(best_tail, {best_head.x + best_dx * head_len, best_head.y + best_dy * head_len}, m.stroke, color);
                }
                placed.tail = best_tail;
                placed.head = best_head;
            }
            extent.push_back(placed.tail);
            extent.push_back(placed.head);
            double x0 = extent[0].x, x1 = x0, y0 = extent[0].y, y1 = y0;
            for (const auto& p : extent) {
                x0 = std::min(x0, p.x);
                x1 = std::max(x1, p.x);
                y0 = std::min(y0, p.y);
                y1 = std::max(y1, p.y);
            }
            double h = m.stroke / 2.0 + 1.0;
            placed.rect = to_rect(x0 - h, y0 - h, x1 + h, y1 + h, W, H);
        }
        out.marks.push_back(placed);
    }
    out.rgb = cv.pixels();
    out.png = encode_png(W, H, out.rgb);
    return out;
}

ReferMark sample_refer_mark(Rng& rng, MarkKind kind, ElementRef target) {
    ReferMark m;
    m.kind = kind;
    m.target = target;
    m.color = std::string(pick(rng, mark_colors()).name);
    m.stroke = static_cast<double>(uniform_int(rng, 2, 4));
    m.size = kind == MarkKind::Box ? static_cast<double>(uniform_int(rng, 3, 8)) : static_cast<double>(uniform_int(rng, 30, 60));
    return m;
}

nlohmann::ordered_json element_boxes_json(const RenderResult& result) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& b : result.element_boxes) {
        nlohmann::ordered_json j;
        j["series"] = b.ref.series;
        j["category"] = b.ref.category;
        j["x"] = b.rect.x;
        j["y"] = b.rect.y;
        j["w"] = b.rect.w;
        j["h"] = b.rect.h;
        arr.push_back(j);
    }
    return arr;
}

}  // namespace chartforge
