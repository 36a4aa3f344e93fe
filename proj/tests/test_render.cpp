#include <gtest/gtest.h>

#include "chartforge/png_io.hpp"
#include "chartforge/render.hpp"
#include "chartforge/table_synth.hpp"

using namespace chartforge;

namespace {

RenderResult draw(ChartType type, std::uint64_t seed, int w = 448, int h = 448) {
    auto table = synth_table(default_synth_config(type), seed);
    ChartSpec spec{type, style_sample(seed), w, h};
    return render(table, spec, seed);
}

}  // namespace

TEST(Png, EncodeDecodeRoundTrip) {
    std::vector<std::uint8_t> px(3 * 4 * 3);
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<std::uint8_t>(i * 7);
    auto png = encode_png(4, 3, px);
    auto img = decode_png(png);
    EXPECT_EQ(img.width, 4);
    EXPECT_EQ(img.height, 3);
    EXPECT_EQ(img.pixels, px);
    EXPECT_EQ(encode_png(4, 3, px), png);
    std::vector<std::uint8_t> junk{1, 2, 3};
    EXPECT_THROW(decode_png(junk), Error);
}

TEST(Style, IdRoundTripAndValidation) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        auto st = style_sample(s);
        auto back = style_from_id(style_id(st));
        back.seed = st.seed;
        EXPECT_EQ(back, st);
    }
    EXPECT_THROW(style_from_id("p999.f0"), InvalidParams);
    StyleSpec bad;
    bad.palette = -1;
    EXPECT_THROW(validate(bad), InvalidParams);
}

TEST(Render, EveryTypeInBoundsAndDecodes) {
    for (auto type : kAllChartTypes) {
        auto r = draw(type, 3);
        EXPECT_EQ(r.width, 448);
        auto img = decode_png(r.png);
        EXPECT_EQ(img.pixels, r.rgb);
        ASSERT_FALSE(r.element_boxes.empty()) << to_string(type);
        for (const auto& b : r.element_boxes) EXPECT_TRUE(b.rect.within(r.width, r.height)) << to_string(type);
        for (const auto& l : r.legend) EXPECT_TRUE(l.rect.within(r.width, r.height)) << to_string(type);
    }
}

TEST(Render, NonSquareCanvas) {
    auto r = draw(ChartType::Line, 8, 640, 360);
    auto img = decode_png(r.png);
    EXPECT_EQ(img.width, 640);
    EXPECT_EQ(img.height, 360);
    for (const auto& b : r.element_boxes) EXPECT_TRUE(b.rect.within(640, 360));
}

TEST(Render, Deterministic) {
    for (auto type : kAllChartTypes) {
        EXPECT_EQ(draw(type, 12).png, draw(type, 12).png) << to_string(type);
    }
    EXPECT_NE(draw(ChartType::Bar, 1).png, draw(ChartType::Bar, 2).png);
}

TEST(Render, OneBoxPerElement) {
    auto t = synth_table(default_synth_config(ChartType::Bar), 4);
    auto r = render(t, ChartSpec{ChartType::Bar}, 4);
    EXPECT_EQ(r.element_boxes.size(), t.rows() * t.cols());
    for (std::size_t i = 0; i < t.rows(); ++i)
        for (std::size_t j = 0; j < t.cols(); ++j)
            EXPECT_NE(r.find(ElementRef{static_cast<int>(j), static_cast<int>(i)}), nullptr);
}

TEST(Render, BarHeightsFollowValues) {
    DataTable t({"a", "b", "c", "d"}, {"v"},
                {{Cell::number(10)}, {Cell::number(40)}, {Cell::number(20)}, {Cell::number(30)}});
    auto r = render(t, ChartSpec{ChartType::Bar}, 1);
    auto h = [&](int cat) { return r.find(ElementRef{0, cat})->rect.h; };
    EXPECT_LT(h(0), h(2));
    EXPECT_LT(h(2), h(3));
    EXPECT_LT(h(3), h(1));
}

TEST(Render, Incompatible) {
    DataTable text({"a", "b"}, {"v"}, {{Cell::text("x")}, {Cell::number(1)}});
    EXPECT_THROW(render(text, ChartSpec{ChartType::Bar}, 1), IncompatibleChartType);
    DataTable neg({"a", "b"}, {"v"}, {{Cell::number(-1)}, {Cell::number(1)}});
    EXPECT_FALSE(is_compatible(neg, ChartType::Pie));
    DataTable two({"a", "b"}, {"x", "y"}, {{Cell::number(1), Cell::number(2)}, {Cell::number(1), Cell::number(2)}});
    EXPECT_FALSE(is_compatible(two, ChartType::Bubble));
    EXPECT_FALSE(is_compatible(two, ChartType::Box));
}

TEST(ReferMarks, BoxesAndArrowsStayInBounds) {
    for (auto type : kAllChartTypes) {
        auto r = draw(type, 21);
        auto rng = make_rng(21);
        std::vector<ReferMark> marks;
        marks.push_back(sample_refer_mark(rng, MarkKind::Box, r.element_boxes.front().ref));
        marks.push_back(sample_refer_mark(rng, MarkKind::Arrow, r.element_boxes.back().ref));
        auto pair = sample_refer_mark(rng, MarkKind::Arrow, r.element_boxes.front().ref);
        pair.second = r.element_boxes.back().ref;
        marks.push_back(pair);
        auto m = apply_refer_marks(r, marks, 21);
        ASSERT_EQ(m.marks.size(), 3u);
        for (const auto& pm : m.marks) EXPECT_TRUE(pm.rect.within(m.width, m.height)) << to_string(type);
        EXPECT_TRUE(m.marks[0].rect.contains(r.find(marks[0].target)->rect));
        EXPECT_NE(m.png, r.png);
        EXPECT_EQ(apply_refer_marks(r, marks, 21).png, m.png);
    }
}

TEST(ReferMarks, UnknownTarget) {
    auto r = draw(ChartType::Pie, 2);
    ReferMark m;
    m.target = ElementRef{3, 0};
    EXPECT_THROW(apply_refer_marks(r, std::vector<ReferMark>{m}, 1), UnknownTarget);
}

TEST(ElementBoxesJson, Shape) {
    auto r = draw(ChartType::Bubble, 5);
    auto j = element_boxes_json(r);
    ASSERT_EQ(j.size(), r.element_boxes.size());
    EXPECT_TRUE(j[0].contains("series"));
    EXPECT_TRUE(j[0].contains("w"));
}
