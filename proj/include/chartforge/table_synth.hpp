#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "chartforge/chart_type.hpp"
#include "chartforge/distributions.hpp"
#include "chartforge/table.hpp"
#include "chartforge/vocabulary.hpp"

namespace chartforge {

struct IntRange {
    int lo = 1;
    int hi = 1;
};

struct RealRange {
    double lo = 0.0;
    double hi = 1.0;
};

struct SynthConfig {
    std::uint64_t seed = 0;
    ChartType chart_family = ChartType::Bar;
    IntRange rows{3, 8};
    IntRange cols{1, 4};
    RealRange value_range{5.0, 100.0};
    int decimals = 1;               // rounding applied to generated values
    std::size_t n_samples = 1000;   // histogram / box plot sample size
    std::vector<Theme> label_vocabulary;  // empty: bundled themes
};

/// Family-appropriate defaults (pie: one column; radar: 5-8 axes; bubble:
/// three columns; histogram: 5-12 bins; box: 3-6 groups).
SynthConfig default_synth_config(ChartType family);

/// Reads the declarative JSON form; unset keys keep the family defaults.
/// Throws SchemaError on unknown keys or wrong types.
SynthConfig synth_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SynthConfig& config);

/// Random multi-series table for bar, line, dot-line, pie, area, radar and
/// bubble. Pie tables have one strictly positive column; bubble tables have
/// exactly three numeric columns (x, y, size) with size > 0. Throws
/// InvalidParams for histogram / box families or inverted ranges.
DataTable synth_series_table(const SynthConfig& config, std::uint64_t seed);

/// Equal-width frequency table over [min, max] of the samples. Rows are
/// "[lo, hi)" intervals (the last one closed); frequencies sum to n_samples.
/// Zero data range yields one bin "[v, v]" holding every sample.
DataTable synth_histogram_table(const DistributionSpec& spec, int n_bins, std::uint64_t seed);

/// One row per group with columns lower whisker, Q1, median, Q3, upper
/// whisker.
DataTable synth_boxplot_table(const DistributionSpec& spec, int n_groups, std::uint64_t seed);

/// Any of the nine families; histogram and box plot draw a random
/// distribution first.
DataTable synth_table(const SynthConfig& config, std::uint64_t seed);

/// Linear interpolation between order statistics ("type 7").
/// `sorted` must be ascending and non-empty; p in [0, 1].
double quantile_type7(std::span<const double> sorted, double p);

struct BoxStats {
    double lower_whisker;
    double q1;
    double median;
    double q3;
    double upper_whisker;
};

/// Quartiles by `quantile_type7`; whiskers reach the most extreme sample
/// inside the 1.5 IQR fences.
BoxStats box_stats(std::span<const double> samples);

}  // namespace chartforge
