#include "chartforge/table_synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chartforge/rng.hpp"

namespace chartforge {

namespace {

using nlohmann::json;

const std::vector<Theme>& themes_of(const SynthConfig& config) {
    static const std::vector<Theme> bundled(builtin_themes().begin(), builtin_themes().end());
    return config.label_vocabulary.empty() ? bundled : config.label_vocabulary;
}

void check_config(const SynthConfig& c) {
    if (c.rows.lo < 1 || c.rows.lo > c.rows.hi) throw InvalidParams("rows range must satisfy 1 <= lo <= hi");
    if (c.cols.lo < 1 || c.cols.lo > c.cols.hi) throw InvalidParams("cols range must satisfy 1 <= lo <= hi");
    if (!(c.value_range.lo < c.value_range.hi) || !std::isfinite(c.value_range.lo) ||
        !std::isfinite(c.value_range.hi)) {
        throw InvalidParams("value_range must be a finite interval with lo < hi");
    }
    if (c.decimals < 0 || c.decimals > 4) throw InvalidParams("decimals must be in [0, 4]");
    if (c.n_samples == 0) throw InvalidParams("n_samples must be positive");
}

std::vector<std::string> pick_labels(Rng& rng, const std::vector<std::string>& pool, std::size_t n) {
    auto idx = sample_indices(rng, pool.size(), n);
    std::vector<std::string> out;
    for (auto i : idx) out.push_back(pool[i]);
    return out;
}

/// Ordered ticks keep their vocabulary order (months, quarters, age groups).
std::vector<std::string> pick_ordered(Rng& rng, const std::vector<std::string>& pool, std::size_t n) {
    n = std::min(n, pool.size());
    std::size_t start = uniform_int<std::size_t>(rng, 0, pool.size() - n);
    return {pool.begin() + static_cast<long>(start), pool.begin() + static_cast<long>(start + n)};
}

std::vector<std::string> years(Rng& rng, std::size_t n) {
    int start = uniform_int<int>(rng, 1990, 2015);
    int stride = coin(rng, 0.75) ? 1 : 2;
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(start + stride * static_cast<int>(i)));
    return out;
}

double positive_floor(int decimals) { return std::pow(10.0, -decimals); }

DataTable make_table(std::vector<std::string> rows, std::vector<std::string> cols,
                     const std::vector<std::vector<double>>& values, TableMeta meta) {
    std::vector<std::vector<Cell>> cells;
    for (const auto& row : values) {
        std::vector<Cell> r;
        for (double v : row) r.push_back(Cell::number(v));
        cells.push_back(std::move(r));
    }
    return DataTable(std::move(rows), std::move(cols), std::move(cells), std::move(meta));
}

IntRange read_range(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
        throw SchemaError(path, "expected [lo, hi] integers");
    }
    return {j[0].get<int>(), j[1].get<int>()};
}

std::vector<std::string> read_strings(const json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_string()) throw SchemaError(path + "[" + std::to_string(i) + "]", "expected a string");
        out.push_back(j[i].get<std::string>());
    }
    return out;
}

Theme theme_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    Theme t;
    for (const auto& [key, v] : j.items()) {
        std::string p = path + "." + key;
        if (key == "name") {
            if (!v.is_string()) throw SchemaError(p, "expected a string");
            t.name = v.get<std::string>();
        } else if (key == "category_axes") {
            if (!v.is_array()) throw SchemaError(p, "expected an array");
            for (std::size_t i = 0; i < v.size(); ++i) {
                std::string pi = p + "[" + std::to_string(i) + "]";
                if (!v[i].is_object() || !v[i].contains("label") || !v[i].contains("values") ||
                    !v[i]["label"].is_string()) {
                    throw SchemaError(pi, "expected {label, values}");
                }
                t.category_axes.push_back({v[i]["label"].get<std::string>(), read_strings(v[i]["values"], pi + ".values")});
            }
        } else if (key == "measures") {
            t.measures = read_strings(v, p);
        } else if (key == "series") {
            t.series = read_strings(v, p);
        } else if (key == "radar_axes") {
            t.radar_axes = read_strings(v, p);
        } else if (key == "sample_measures") {
            t.sample_measures = read_strings(v, p);
        } else if (key == "group_names") {
            t.group_names = read_strings(v, p);
        } else if (key == "bubble_metrics") {
            if (!v.is_array()) throw SchemaError(p, "expected an array");
            for (std::size_t i = 0; i < v.size(); ++i) {
                auto triple = read_strings(v[i], p + "[" + std::to_string(i) + "]");
                if (triple.size() != 3) throw SchemaError(p + "[" + std::to_string(i) + "]", "expected 3 names");
                t.bubble_metrics.push_back({triple[0], triple[1], triple[2]});
            }
        } else {
            throw SchemaError(p, "unknown key");
        }
    }
    if (t.category_axes.empty() || t.measures.empty() || t.series.empty() || t.radar_axes.size() < 3 ||
        t.bubble_metrics.empty() || t.sample_measures.empty() || t.group_names.empty()) {
        throw SchemaError(path, "theme is missing required word lists");
    }
    return t;
}

}  // namespace

SynthConfig default_synth_config(ChartType family) {
    SynthConfig c;
    c.chart_family = family;
    switch (family) {
        case ChartType::Bar: c.rows = {3, 8}; c.cols = {1, 4}; break;
        case ChartType::Line:
        case ChartType::Area: c.rows = {6, 12}; c.cols = {1, 3}; break;
        case ChartType::DotLine: c.rows = {4, 10}; c.cols = {1, 3}; break;
        case ChartType::Pie: c.rows = {3, 7}; c.cols = {1, 1}; break;
        case ChartType::Radar: c.rows = {5, 8}; c.cols = {1, 3}; c.value_range = {10.0, 100.0}; break;
        case ChartType::Bubble: c.rows = {4, 8}; c.cols = {3, 3}; break;
        case ChartType::Histogram: c.rows = {5, 12}; c.cols = {1, 1}; break;
        case ChartType::Box: c.rows = {3, 6}; c.cols = {5, 5}; break;
    }
    return c;
}

SynthConfig synth_config_from_json(const json& j) {
    if (!j.is_object()) throw SchemaError("synth", "expected an object");
    ChartType family = ChartType::Bar;
    if (j.contains("chart_family")) {
        if (!j["chart_family"].is_string()) throw SchemaError("synth.chart_family", "expected a string");
        auto t = chart_type_from_string(j["chart_family"].get<std::string>());
        if (!t) throw SchemaError("synth.chart_family", "unknown chart family");
        family = *t;
    }
    SynthConfig c = default_synth_config(family);
    for (const auto& [key, v] : j.items()) {
        std::string p = "synth." + key;
        if (key == "chart_family") continue;
        if (key == "seed") {
            if (!v.is_number_unsigned() && !v.is_number_integer()) throw SchemaError(p, "expected an integer");
            c.seed = v.get<std::uint64_t>();
        } else if (key == "rows") {
            c.rows = read_range(v, p);
        } else if (key == "cols") {
            c.cols = read_range(v, p);
        } else if (key == "value_range") {
            if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
                throw SchemaError(p, "expected [lo, hi] numbers");
            }
            c.value_range = {v[0].get<double>(), v[1].get<double>()};
        } else if (key == "decimals") {
            if (!v.is_number_integer()) throw SchemaError(p, "expected an integer");
            c.decimals = v.get<int>();
        } else if (key == "n_samples") {
            if (!v.is_number_integer() || v.get<long long>() <= 0) throw SchemaError(p, "expected a positive integer");
            c.n_samples = v.get<std::size_t>();
        } else if (key == "label_vocabulary") {
            if (!v.is_array()) throw SchemaError(p, "expected an array of themes");
            for (std::size_t i = 0; i < v.size(); ++i) {
                c.label_vocabulary.push_back(theme_from_json(v[i], p + "[" + std::to_string(i) + "]"));
            }
        } else {
            throw SchemaError(p, "unknown key");
        }
    }
    return c;
}

json to_json(const SynthConfig& c) {
    json j = {
        {"seed", c.seed},
        {"chart_family", std::string(to_string(c.chart_family))},
        {"rows", {c.rows.lo, c.rows.hi}},
        {"cols", {c.cols.lo, c.cols.hi}},
        {"value_range", {c.value_range.lo, c.value_range.hi}},
        {"decimals", c.decimals},
        {"n_samples", c.n_samples},
    };
    return j;
}

DataTable synth_series_table(const SynthConfig& config, std::uint64_t seed) {
    check_config(config);
    const ChartType family = config.chart_family;
    if (family == ChartType::Histogram || family == ChartType::Box) {
        throw InvalidParams("synth_series_table does not build histogram or box tables");
    }
    Rng rng = make_rng(seed, 0x5E21E5);
    const auto& themes = themes_of(config);
    const Theme& theme = pick(rng, themes);
    const int dec = config.decimals;
    const double lo = config.value_range.lo;
    const double hi = config.value_range.hi;

    std::size_t n_rows = uniform_int<std::size_t>(rng, config.rows.lo, config.rows.hi);
    std::size_t n_cols = uniform_int<std::size_t>(rng, config.cols.lo, config.cols.hi);
    if (family == ChartType::Pie) n_cols = 1;
    if (family == ChartType::Bubble) n_cols = 3;
    if (family == ChartType::Radar) n_rows = std::clamp<std::size_t>(n_rows, 3, 12);
    if (family == ChartType::Line || family == ChartType::Area) n_rows = std::max<std::size_t>(n_rows, 2);

    TableMeta meta;
    std::vector<std::string> rows;
    std::vector<std::string> cols;
    const std::string measure = pick(rng, theme.measures);

    switch (family) {
        case ChartType::Line:
        case ChartType::Area:
            rows = years(rng, n_rows);
            meta.x_label = "Year";
            break;
        case ChartType::Radar:
            rows = pick_labels(rng, theme.radar_axes, n_rows);
            meta.x_label = "Attribute";
            break;
        default: {
            if ((family == ChartType::DotLine || family == ChartType::Bar) && coin(rng, 0.3)) {
                rows = years(rng, n_rows);
                meta.x_label = "Year";
                break;
            }
            const CategoryAxis& axis = pick(rng, theme.category_axes);
            bool ordered = axis.label == "Month" || axis.label == "Quarter" || axis.label == "Age group";
            rows = ordered ? pick_ordered(rng, axis.values, n_rows) : pick_labels(rng, axis.values, n_rows);
            meta.x_label = axis.label;
            break;
        }
    }
    n_rows = rows.size();

    std::vector<std::vector<double>> values(n_rows, std::vector<double>(n_cols, 0.0));
    if (family == ChartType::Bubble) {
        const auto& metrics = pick(rng, theme.bubble_metrics);
        cols = {metrics[0], metrics[1], metrics[2]};
        meta.y_label = metrics[1];
        meta.title = metrics[1] + " vs " + metrics[0];
        double slope = uniform_real(rng, -1.0, 1.0);
        for (std::size_t r = 0; r < n_rows; ++r) {
            double x = uniform_real(rng, lo, hi);
            double mid = 0.5 * (lo + hi);
            double y = mid + slope * (x - mid) + uniform_real(rng, -0.25, 0.25) * (hi - lo);
            values[r][0] = quantize(x, dec);
            values[r][1] = quantize(std::clamp(y, lo, hi), dec);
            double size = uniform_real(rng, std::max(lo, 1.0), std::max(hi, 2.0));
            values[r][2] = std::max(quantize(size, dec), positive_floor(dec));
        }
    } else {
        if (family == ChartType::Pie) {
            cols = {measure};
            meta.title = "Share of " + measure + " by " + meta.x_label;
        } else {
            auto names = pick_labels(rng, theme.series, n_cols);
            cols = names;
            meta.title = measure + " by " + meta.x_label;
        }
        meta.y_label = measure;
        const bool walk = family == ChartType::Line || family == ChartType::Area || family == ChartType::DotLine;
        for (std::size_t c = 0; c < n_cols; ++c) {
            double v = uniform_real(rng, lo, hi);
            for (std::size_t r = 0; r < n_rows; ++r) {
                if (walk) {
                    if (r > 0) v = std::clamp(v + uniform_real(rng, -0.15, 0.15) * (hi - lo), lo, hi);
                } else {
                    v = uniform_real(rng, lo, hi);
                }
                double q = quantize(v, dec);
                if (family == ChartType::Pie) q = std::max(q, positive_floor(dec));
                values[r][c] = q;
            }
        }
    }
    return make_table(std::move(rows), std::move(cols), values, std::move(meta));
}

double quantile_type7(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw InvalidParams("quantile of an empty sample");
    double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

BoxStats box_stats(std::span<const double> samples) {
    if (samples.empty()) throw InvalidParams("box statistics of an empty sample");
    std::vector<double> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    BoxStats b{};
    b.q1 = quantile_type7(s, 0.25);
    b.median = quantile_type7(s, 0.5);
    b.q3 = quantile_type7(s, 0.75);
    double iqr = b.q3 - b.q1;
    double low_fence = b.q1 - 1.5 * iqr;
    double high_fence = b.q3 + 1.5 * iqr;
    b.lower_whisker = *std::lower_bound(s.begin(), s.end(), low_fence);
    auto hi = std::upper_bound(s.begin(), s.end(), high_fence);
    b.upper_whisker = *(hi - 1);
    b.lower_whisker = std::min(b.lower_whisker, b.q1);
    b.upper_whisker = std::max(b.upper_whisker, b.q3);
    return b;
}

DataTable synth_histogram_table(const DistributionSpec& spec, int n_bins, std::uint64_t seed) {
    if (n_bins < 2) throw InvalidParams("histogram needs at least 2 bins");
    auto samples = sample_distribution(spec, mix_seed(seed, 1));
    Rng rng = make_rng(seed, 2);
    const Theme& theme = pick(rng, builtin_themes());
    std::string measure = pick(rng, theme.sample_measures);
    TableMeta meta{"Distribution of " + measure, measure, "Frequency"};

    auto [mn_it, mx_it] = std::minmax_element(samples.begin(), samples.end());
    const double mn = *mn_it;
    const double mx = *mx_it;
    const double n = static_cast<double>(samples.size());

    auto degenerate = [&](const std::string& label) {
        return make_table({label}, {"Frequency"}, {{n}}, meta);
    };
    if (!(mx > mn)) {
        std::string v = format_number(mn);
        return degenerate("[" + v + ", " + v + "]");
    }

    const double width = (mx - mn) / n_bins;
    std::vector<double> counts(static_cast<std::size_t>(n_bins), 0.0);
    for (double x : samples) {
        auto b = static_cast<long>(std::floor((x - mn) / width));
        b = std::clamp<long>(b, 0, n_bins - 1);
        counts[static_cast<std::size_t>(b)] += 1.0;
    }

    // Edge labels use two decimals when that keeps them distinct, else four.
    for (int dec : {2, 4}) {
        std::vector<std::string> labels;
        std::vector<std::string> edges;
        for (int i = 0; i <= n_bins; ++i) {
            double e = i == n_bins ? mx : mn + width * i;
            edges.push_back(format_number(quantize(e, dec)));
        }
        bool distinct = true;
        for (int i = 0; i < n_bins; ++i) {
            if (edges[static_cast<std::size_t>(i)] == edges[static_cast<std::size_t>(i) + 1]) distinct = false;
            bool last = i == n_bins - 1;
            labels.push_back("[" + edges[static_cast<std::size_t>(i)] + ", " + edges[static_cast<std::size_t>(i) + 1] +
                             (last ? "]" : ")"));
        }
        if (!distinct) continue;
        std::vector<std::vector<double>> values;
        for (double c : counts) values.push_back({c});
        return make_table(std::move(labels), {"Frequency"}, values, meta);
    }
    return degenerate("[" + format_number(mn) + ", " + format_number(mx) + "]");
}

DataTable synth_boxplot_table(const DistributionSpec& spec, int n_groups, std::uint64_t seed) {
    if (n_groups < 1) throw InvalidParams("box plot needs at least one group");
    validate(spec);
    Rng rng = make_rng(seed, 3);
    const Theme& theme = pick(rng, builtin_themes());
    std::string measure = pick(rng, theme.sample_measures);
    std::vector<std::string> groups;
    if (static_cast<std::size_t>(n_groups) <= theme.group_names.size()) {
        groups = pick_labels(rng, theme.group_names, static_cast<std::size_t>(n_groups));
    } else {
        for (int g = 0; g < n_groups; ++g) groups.push_back("Group " + std::to_string(g + 1));
    }

    std::vector<std::vector<double>> values;
    for (int g = 0; g < n_groups; ++g) {
        auto samples = sample_distribution(spec, mix_seed(seed, 100 + static_cast<std::uint64_t>(g)));
        BoxStats raw = box_stats(samples);
        // Shift groups apart so the plot compares distinguishable boxes.
        double shift = g == 0 ? 0.0 : uniform_real(rng, -1.0, 1.0) * std::max(raw.q3 - raw.q1, 1e-9);
        BoxStats b{raw.lower_whisker + shift, raw.q1 + shift, raw.median + shift, raw.q3 + shift,
                   raw.upper_whisker + shift};
        values.push_back({quantize(b.lower_whisker, 2), quantize(b.q1, 2), quantize(b.median, 2),
                          quantize(b.q3, 2), quantize(b.upper_whisker, 2)});
    }
    TableMeta meta{measure + " by group", "Group", measure};
    return make_table(std::move(groups), {"Lower whisker", "Q1", "Median", "Q3", "Upper whisker"}, values,
                      std::move(meta));
}

DataTable synth_table(const SynthConfig& config, std::uint64_t seed) {
    check_config(config);
    if (config.chart_family == ChartType::Histogram || config.chart_family == ChartType::Box) {
        Rng rng = make_rng(seed, 4);
        auto spec = random_distribution_spec(rng, config.n_samples);
        int n = uniform_int<int>(rng, config.rows.lo, config.rows.hi);
        if (config.chart_family == ChartType::Histogram) {
            return synth_histogram_table(spec, std::max(n, 2), mix_seed(seed, 5));
        }
        return synth_boxplot_table(spec, n, mix_seed(seed, 6));
    }
    return synth_series_table(config, seed);
}

}  // namespace chartforge
