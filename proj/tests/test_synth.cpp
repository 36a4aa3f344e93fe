#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "chartforge/distributions.hpp"
#include "chartforge/table_synth.hpp"
#include "invariants.hpp"

using namespace chartforge;

namespace {

// 1-based order statistics: Q(p) = x[j] + g (x[j+1] - x[j]), j = floor(1 + (n-1)p).
double type7(std::vector<double> x, double p) {
    std::sort(x.begin(), x.end());
    double pos = 1.0 + (static_cast<double>(x.size()) - 1.0) * p;
    auto j = static_cast<std::size_t>(pos);
    double g = pos - static_cast<double>(j);
    if (j >= x.size()) return x.back();
    return x[j - 1] + g * (x[j] - x[j - 1]);
}

}  // namespace

TEST(Quantile, OneToHundred) {
    std::vector<double> v;
    for (int i = 1; i <= 100; ++i) v.push_back(i);
    auto b = box_stats(v);
    EXPECT_DOUBLE_EQ(b.q1, 25.75);
    EXPECT_DOUBLE_EQ(b.median, 50.5);
    EXPECT_DOUBLE_EQ(b.q3, 75.25);
    EXPECT_EQ(b.lower_whisker, 1.0);
    EXPECT_EQ(b.upper_whisker, 100.0);
}

TEST(Quantile, WhiskersStopAtFences) {
    std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 100};
    auto b = box_stats(v);
    // Q1 3, Q3 7, fences -3 and 13
    EXPECT_EQ(b.q1, 3.0);
    EXPECT_EQ(b.q3, 7.0);
    EXPECT_EQ(b.lower_whisker, 1.0);
    EXPECT_EQ(b.upper_whisker, 8.0);
}

TEST(Quantile, AgreesWithOrderStatisticOracle) {
    auto rng = make_rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x(uniform_int<std::size_t>(rng, 1, 60));
        for (auto& v : x) v = uniform_real(rng, -50, 50);
        auto s = x;
        std::sort(s.begin(), s.end());
        for (double p : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
            EXPECT_NEAR(quantile_type7(s, p), type7(x, p), 1e-12);
        }
        auto b = box_stats(x);
        double iqr = b.q3 - b.q1;
        double lo = b.q1, hi = b.q3;
        for (double v : x) {
            if (v >= b.q1 - 1.5 * iqr) lo = std::min(lo, v);
            if (v <= b.q3 + 1.5 * iqr) hi = std::max(hi, v);
        }
        EXPECT_EQ(b.lower_whisker, lo);
        EXPECT_EQ(b.upper_whisker, hi);
    }
}

TEST(Distributions, ValidateDomains) {
    EXPECT_THROW(validate(DistributionSpec{DistributionKind::Normal, {0.0, -1.0}, 10}), InvalidParams);
    EXPECT_THROW(validate(DistributionSpec{DistributionKind::Normal, {0.0}, 10}), InvalidParams);
    EXPECT_THROW(validate(DistributionSpec{DistributionKind::Uniform, {2.0, 1.0}, 10}), InvalidParams);
    EXPECT_THROW(validate(DistributionSpec{DistributionKind::Beta, {1.0, 1.0}, 0}), InvalidParams);
    EXPECT_THROW(validate(DistributionSpec{DistributionKind::Binomial, {10.0, 1.5}, 10}), InvalidParams);
    EXPECT_NO_THROW(validate(DistributionSpec{DistributionKind::Gamma, {2.0, 3.0}, 10}));
}

TEST(Distributions, NamesRoundTrip) {
    for (std::size_t i = 0; i < kDistributionKindCount; ++i) {
        auto k = static_cast<DistributionKind>(i);
        EXPECT_EQ(distribution_kind_from_string(to_string(k)).value(), k);
    }
}

TEST(Distributions, SamplingIsExactAndDeterministic) {
    auto rng = make_rng(9);
    for (int i = 0; i < 60; ++i) {
        auto spec = random_distribution_spec(rng, uniform_int<std::size_t>(rng, 1, 400));
        auto a = sample_distribution(spec, 77);
        EXPECT_EQ(a.size(), spec.n_samples);
        EXPECT_EQ(a, sample_distribution(spec, 77));
        for (double v : a) EXPECT_TRUE(std::isfinite(v));
    }
}

TEST(Distributions, UniformStaysInRangeAndDiscreteIsIntegral) {
    auto u = sample_distribution({DistributionKind::Uniform, {3.0, 4.0}, 500}, 1);
    for (double v : u) EXPECT_TRUE(v >= 3.0 && v <= 4.0);
    auto d = sample_distribution({DistributionKind::DiscreteUniform, {1.0, 6.0}, 500}, 1);
    std::set<double> seen(d.begin(), d.end());
    EXPECT_EQ(seen, (std::set<double>{1, 2, 3, 4, 5, 6}));
}

TEST(Distributions, MomentsRoughlyRight) {
    auto x = sample_distribution({DistributionKind::Normal, {10.0, 2.0}, 20000}, 3);
    double m = 0;
    for (double v : x) m += v;
    m /= x.size();
    double s = 0;
    for (double v : x) s += (v - m) * (v - m);
    s = std::sqrt(s / x.size());
    EXPECT_NEAR(m, 10.0, 0.1);
    EXPECT_NEAR(s, 2.0, 0.1);
}

TEST(Histogram, FrequenciesSumAndLabels) {
    auto t = synth_histogram_table({DistributionKind::Normal, {0.0, 1.0}, 1000}, 8, 4);
    EXPECT_EQ(t.rows(), 8u);
    EXPECT_TRUE(invariants::check(t, ChartType::Histogram, 1000).empty());
    EXPECT_EQ(t.row_labels().front().front(), '[');
    EXPECT_EQ(t.row_labels().front().back(), ')');
    EXPECT_EQ(t.row_labels().back().back(), ']');
}

TEST(Histogram, DegenerateRange) {
    auto t = synth_histogram_table({DistributionKind::Uniform, {5.0, 5.0000000001}, 50}, 4, 1);
    EXPECT_TRUE(invariants::check(t, ChartType::Histogram, 50).empty());
    EXPECT_THROW(synth_histogram_table({DistributionKind::Normal, {0.0, 1.0}, 10}, 1, 1), InvalidParams);
}

TEST(BoxTable, OrderedColumns) {
    auto t = synth_boxplot_table({DistributionKind::Exponential, {0.5}, 300}, 4, 2);
    EXPECT_EQ(t.cols(), 5u);
    EXPECT_EQ(t.rows(), 4u);
    EXPECT_TRUE(invariants::check(t, ChartType::Box, 300).empty());
}

TEST(SeriesTables, FamilyShapes) {
    for (auto type : kAllChartTypes) {
        auto cfg = default_synth_config(type);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            auto t = synth_table(cfg, seed);
            EXPECT_GE(static_cast<int>(t.rows()), std::min(cfg.rows.lo, 2)) << to_string(type);
            EXPECT_TRUE(invariants::check(t, type, cfg.n_samples).empty()) << to_string(type) << "\n" << to_markdown(t);
            EXPECT_EQ(t, synth_table(cfg, seed));
        }
    }
}

TEST(SeriesTables, NegativeRangeStillGivesPositivePie) {
    auto cfg = default_synth_config(ChartType::Pie);
    cfg.value_range = {-50.0, 1.0};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        EXPECT_TRUE(invariants::check(synth_table(cfg, seed), ChartType::Pie, 0).empty());
    }
}

TEST(SynthConfigJson, RoundTripAndErrors) {
    auto cfg = default_synth_config(ChartType::Radar);
    cfg.decimals = 2;
    cfg.rows = {6, 7};
    auto back = synth_config_from_json(to_json(cfg));
    EXPECT_EQ(back.rows.lo, 6);
    EXPECT_EQ(back.decimals, 2);
    EXPECT_EQ(back.chart_family, ChartType::Radar);
    try {
        synth_config_from_json({{"bogus", 1}});
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.path(), "synth.bogus");
    }
    cfg.rows = {5, 2};
    EXPECT_THROW(synth_table(cfg, 1), InvalidParams);
}
