#pragma once

// Direct computations for every template family, written against the table
// and slot bindings only. Nothing here goes through the COT interpreter.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "chartforge/cot.hpp"
#include "chartforge/qa.hpp"
#include "chartforge/table.hpp"

namespace oracle {

using chartforge::DataTable;
using chartforge::SlotBindings;
using Answer = chartforge::cot::Value;
using Vec = std::vector<double>;

struct Ctx {
    const DataTable& t;
    const SlotBindings& b;

    std::size_t n() const { return t.rows(); }
    std::size_t leg(int i) const { return b.legends.at(static_cast<std::size_t>(i - 1)); }
    std::size_t tick(int i) const { return b.ticks.at(static_cast<std::size_t>(i - 1)); }
    std::size_t mrow(int i) const { return static_cast<std::size_t>(b.marks.at(static_cast<std::size_t>(i - 1)).target.category); }
    std::size_t mcol(int i) const { return static_cast<std::size_t>(b.marks.at(static_cast<std::size_t>(i - 1)).target.series); }
    std::size_t mrow2(int i) const { return static_cast<std::size_t>(b.marks.at(static_cast<std::size_t>(i - 1)).second->category); }
    std::size_t mcol2(int i) const { return static_cast<std::size_t>(b.marks.at(static_cast<std::size_t>(i - 1)).second->series); }

    double cell(std::size_t r, std::size_t c) const { return t.at(r, c).as_number(); }
    Vec col(std::size_t c) const {
        Vec v;
        for (std::size_t r = 0; r < t.rows(); ++r) v.push_back(cell(r, c));
        return v;
    }
    Vec row(std::size_t r) const {
        Vec v;
        for (std::size_t c = 0; c < t.cols(); ++c) v.push_back(cell(r, c));
        return v;
    }
    // Series of the first legend slot; the whole story for one-series charts.
    Vec s1() const { return col(leg(1)); }
    double c1(int tk) const { return cell(tick(tk), leg(1)); }
};

inline double total(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}
inline double avg(const Vec& v) { return total(v) / static_cast<double>(v.size()); }
inline double hi(const Vec& v) { return *std::max_element(v.begin(), v.end()); }
inline double lo(const Vec& v) { return *std::min_element(v.begin(), v.end()); }
inline double mid(Vec v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    if (n % 2) return v[n / 2];
    return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}
inline double sd(const Vec& v) {
    double m = avg(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size()));
}
inline double corr(const Vec& a, const Vec& b) {
    double ma = avg(a), mb = avg(b);
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double da = a[i] - ma, db = b[i] - mb;
        ab += da * db;
        aa += da * da;
        bb += db * db;
    }
    double r = ab / std::sqrt(aa * bb);
    return r > 1.0 ? 1.0 : (r < -1.0 ? -1.0 : r);
}
inline double pct(double part, double whole) { return part / whole * 100.0; }
inline double count_if_gt(const Vec& v, double x) {
    return static_cast<double>(std::count_if(v.begin(), v.end(), [&](double y) { return y > x; }));
}
inline double count_if_lt(const Vec& v, double x) {
    return static_cast<double>(std::count_if(v.begin(), v.end(), [&](double y) { return y < x; }));
}
inline double sum_gt(const Vec& v, double x) {
    double s = 0.0;
    for (double y : v)
        if (y > x) s += y;
    return s;
}
// 1-based inclusive positions.
inline Vec part(const Vec& v, std::size_t from, std::size_t to) {
    return Vec(v.begin() + static_cast<long>(from - 1), v.begin() + static_cast<long>(to));
}
inline Vec desc(Vec v) {
    std::sort(v.begin(), v.end(), [](double a, double b) { return a > b; });
    return v;
}
inline Vec asc(Vec v) {
    std::sort(v.begin(), v.end());
    return v;
}
inline Vec steps(const Vec& v) {
    Vec d;
    for (std::size_t i = 1; i < v.size(); ++i) d.push_back(v[i] - v[i - 1]);
    return d;
}
// First index wins ties.
inline std::size_t first_max(const Vec& v) { return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin()); }
inline std::size_t first_min(const Vec& v) { return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin()); }
inline Vec minus(const Vec& a, const Vec& b) {
    Vec d;
    for (std::size_t i = 0; i < a.size(); ++i) d.push_back(a[i] - b[i]);
    return d;
}
inline Vec plus(const Vec& a, const Vec& b) {
    Vec d;
    for (std::size_t i = 0; i < a.size(); ++i) d.push_back(a[i] + b[i]);
    return d;
}

using Fn = std::function<Answer(const Ctx&)>;

inline const std::map<std::string, Fn>& families() {
    // Box tables: columns lower, Q1, median, Q3, upper. Bubble: x, y, size.
    constexpr std::size_t kLow = 0, kQ1 = 1, kMed = 2, kQ3 = 3, kUp = 4;
    constexpr std::size_t kX = 0, kY = 1, kSize = 2;
    auto rowlab = [](const Ctx& c, std::size_t r) -> Answer { return c.t.row_labels()[r]; };

    static const std::map<std::string, Fn> m = {
        // one series
        {"series_max", [](const Ctx& c) -> Answer { return hi(c.s1()); }},
        {"series_min", [](const Ctx& c) -> Answer { return lo(c.s1()); }},
        {"series_argmax", [=](const Ctx& c) { return rowlab(c, first_max(c.s1())); }},
        {"series_argmin", [=](const Ctx& c) { return rowlab(c, first_min(c.s1())); }},
        {"series_max_minus_min", [](const Ctx& c) -> Answer { return hi(c.s1()) - lo(c.s1()); }},
        {"series_max_over_min", [](const Ctx& c) -> Answer { return hi(c.s1()) / lo(c.s1()); }},
        {"series_kth_largest", [](const Ctx& c) -> Answer { return desc(c.s1())[static_cast<std::size_t>(c.b.k - 1)]; }},
        {"series_kth_smallest", [](const Ctx& c) -> Answer { return asc(c.s1())[static_cast<std::size_t>(c.b.k - 1)]; }},
        {"series_sum", [](const Ctx& c) -> Answer { return total(c.s1()); }},
        {"series_mean", [](const Ctx& c) -> Answer { return avg(c.s1()); }},
        {"series_median", [](const Ctx& c) -> Answer { return mid(c.s1()); }},
        {"series_stddev", [](const Ctx& c) -> Answer { return sd(c.s1()); }},
        {"series_count_above", [](const Ctx& c) -> Answer { return count_if_gt(c.s1(), *c.b.threshold); }},
        {"series_count_below", [](const Ctx& c) -> Answer { return count_if_lt(c.s1(), *c.b.threshold); }},
        {"series_count_above_mean", [](const Ctx& c) -> Answer { return count_if_gt(c.s1(), avg(c.s1())); }},
        {"series_count_below_mean", [](const Ctx& c) -> Answer { return count_if_lt(c.s1(), avg(c.s1())); }},
        {"series_sum_above_mean", [](const Ctx& c) -> Answer { return sum_gt(c.s1(), avg(c.s1())); }},
        {"series_max_minus_mean", [](const Ctx& c) -> Answer { return hi(c.s1()) - avg(c.s1()); }},
        {"series_mean_minus_min", [](const Ctx& c) -> Answer { return avg(c.s1()) - lo(c.s1()); }},
        {"series_max_share", [](const Ctx& c) -> Answer { return pct(hi(c.s1()), total(c.s1())); }},
        {"series_min_share", [](const Ctx& c) -> Answer { return pct(lo(c.s1()), total(c.s1())); }},
        {"series_median_minus_mean", [](const Ctx& c) -> Answer { return mid(c.s1()) - avg(c.s1()); }},
        {"series_mean_above_median", [](const Ctx& c) -> Answer { return avg(c.s1()) > mid(c.s1()); }},
        {"series_share_above",
         [](const Ctx& c) -> Answer {
             return pct(count_if_gt(c.s1(), *c.b.threshold), static_cast<double>(c.n()));
         }},
        {"series_top_k_sum", [](const Ctx& c) -> Answer { return total(part(desc(c.s1()), 1, static_cast<std::size_t>(c.b.k))); }},
        {"series_bottom_k_mean", [](const Ctx& c) -> Answer { return avg(part(asc(c.s1()), 1, static_cast<std::size_t>(c.b.k))); }},
        {"series_count", [](const Ctx& c) -> Answer { return static_cast<double>(c.n()); }},
        {"series_cv", [](const Ctx& c) -> Answer { return pct(sd(c.s1()), avg(c.s1())); }},
        {"series_top_minus_kth",
         [](const Ctx& c) -> Answer {
             Vec d = desc(c.s1());
             return d[0] - d[static_cast<std::size_t>(c.b.k - 1)];
         }},

        // cells of one series
        {"cell_value", [](const Ctx& c) -> Answer { return c.c1(1); }},
        {"cell_diff_ticks", [](const Ctx& c) -> Answer { return c.c1(2) - c.c1(1); }},
        {"cell_ratio_ticks", [](const Ctx& c) -> Answer { return c.c1(1) / c.c1(2); }},
        {"cell_pct_change_ticks", [](const Ctx& c) -> Answer { return pct(c.c1(2) - c.c1(1), c.c1(1)); }},
        {"cell_sum_ticks", [](const Ctx& c) -> Answer { return c.c1(1) + c.c1(2); }},
        {"cell_mean_ticks", [](const Ctx& c) -> Answer { return (c.c1(1) + c.c1(2)) / 2.0; }},
        {"cell_greater_ticks", [](const Ctx& c) -> Answer { return c.c1(1) > c.c1(2); }},
        {"cell_above_mean", [](const Ctx& c) -> Answer { return c.c1(1) > avg(c.s1()); }},
        {"cell_minus_mean", [](const Ctx& c) -> Answer { return c.c1(1) - avg(c.s1()); }},
        {"cell_share", [](const Ctx& c) -> Answer { return pct(c.c1(1), total(c.s1())); }},
        {"cell_rank", [](const Ctx& c) -> Answer { return count_if_gt(c.s1(), c.c1(1)) + 1.0; }},
        {"cell_gap_to_max", [](const Ctx& c) -> Answer { return hi(c.s1()) - c.c1(1); }},
        {"cell_count_greater", [](const Ctx& c) -> Answer { return count_if_gt(c.s1(), c.c1(1)); }},
        {"cell_sum_three", [](const Ctx& c) -> Answer { return c.c1(1) + c.c1(2) + c.c1(3); }},
        {"cell_mean_three", [](const Ctx& c) -> Answer { return (c.c1(1) + c.c1(2) + c.c1(3)) / 3.0; }},
        {"cell_abs_diff_ticks", [](const Ctx& c) -> Answer { return std::fabs(c.c1(1) - c.c1(2)); }},
        {"slice_sum_between", [](const Ctx& c) -> Answer { return total(part(c.s1(), c.tick(1) + 1, c.tick(2) + 1)); }},
        {"slice_mean_between", [](const Ctx& c) -> Answer { return avg(part(c.s1(), c.tick(1) + 1, c.tick(2) + 1)); }},
        {"slice_max_between", [](const Ctx& c) -> Answer { return hi(part(c.s1(), c.tick(1) + 1, c.tick(2) + 1)); }},

        // ordered sequences
        {"seq_max_change", [](const Ctx& c) -> Answer { return hi(steps(c.s1())); }},
        {"seq_min_change", [](const Ctx& c) -> Answer { return lo(steps(c.s1())); }},
        {"seq_count_increases", [](const Ctx& c) -> Answer { return count_if_gt(steps(c.s1()), 0.0); }},
        {"seq_count_decreases", [](const Ctx& c) -> Answer { return count_if_lt(steps(c.s1()), 0.0); }},
        {"seq_mean_change", [](const Ctx& c) -> Answer { return avg(steps(c.s1())); }},
        {"seq_first_k_sum", [](const Ctx& c) -> Answer { return total(part(c.s1(), 1, static_cast<std::size_t>(c.b.k))); }},
        {"seq_last_k_mean",
         [](const Ctx& c) -> Answer { return avg(part(c.s1(), c.n() - static_cast<std::size_t>(c.b.k) + 1, c.n())); }},
        {"seq_first_last_diff", [](const Ctx& c) -> Answer { return c.s1().back() - c.s1().front(); }},
        {"seq_half_comparison",
         [](const Ctx& c) -> Answer {
             auto k = static_cast<std::size_t>(c.b.k);
             return avg(part(c.s1(), c.n() - k + 1, c.n())) - avg(part(c.s1(), 1, k));
         }},

        // two or three series
        {"pair_diff_at_tick", [](const Ctx& c) -> Answer { return c.cell(c.tick(1), c.leg(1)) - c.cell(c.tick(1), c.leg(2)); }},
        {"pair_ratio_at_tick", [](const Ctx& c) -> Answer { return c.cell(c.tick(1), c.leg(1)) / c.cell(c.tick(1), c.leg(2)); }},
        {"pair_greater_at_tick", [](const Ctx& c) -> Answer { return c.cell(c.tick(1), c.leg(1)) > c.cell(c.tick(1), c.leg(2)); }},
        {"pair_sum_at_tick", [](const Ctx& c) -> Answer { return c.cell(c.tick(1), c.leg(1)) + c.cell(c.tick(1), c.leg(2)); }},
        {"pair_diff_of_sums", [](const Ctx& c) -> Answer { return total(c.col(c.leg(1))) - total(c.col(c.leg(2))); }},
        {"pair_diff_of_means", [](const Ctx& c) -> Answer { return avg(c.col(c.leg(1))) - avg(c.col(c.leg(2))); }},
        {"pair_ratio_of_sums", [](const Ctx& c) -> Answer { return total(c.col(c.leg(1))) / total(c.col(c.leg(2))); }},
        {"pair_diff_of_maxes", [](const Ctx& c) -> Answer { return hi(c.col(c.leg(1))) - hi(c.col(c.leg(2))); }},
        {"pair_diff_of_medians", [](const Ctx& c) -> Answer { return mid(c.col(c.leg(1))) - mid(c.col(c.leg(2))); }},
        {"pair_stddev_greater", [](const Ctx& c) -> Answer { return sd(c.col(c.leg(1))) > sd(c.col(c.leg(2))); }},
        {"pair_negatively_correlated", [](const Ctx& c) -> Answer { return corr(c.col(c.leg(1)), c.col(c.leg(2))) < 0.0; }},
        {"pair_correlation", [](const Ctx& c) -> Answer { return corr(c.col(c.leg(1)), c.col(c.leg(2))); }},
        {"pair_positively_correlated", [](const Ctx& c) -> Answer { return corr(c.col(c.leg(1)), c.col(c.leg(2))) > 0.0; }},
        {"pair_count_l1_above", [](const Ctx& c) -> Answer { return count_if_gt(minus(c.col(c.leg(1)), c.col(c.leg(2))), 0.0); }},
        {"pair_max_gap", [](const Ctx& c) -> Answer { return hi(minus(c.col(c.leg(1)), c.col(c.leg(2)))); }},
        {"pair_mean_gap", [](const Ctx& c) -> Answer { return avg(minus(c.col(c.leg(1)), c.col(c.leg(2)))); }},
        {"pair_max_combined", [](const Ctx& c) -> Answer { return hi(plus(c.col(c.leg(1)), c.col(c.leg(2)))); }},
        {"pair_argmax_combined", [=](const Ctx& c) { return rowlab(c, first_max(plus(c.col(c.leg(1)), c.col(c.leg(2))))); }},
        {"pair_argmax_gap", [=](const Ctx& c) { return rowlab(c, first_max(minus(c.col(c.leg(1)), c.col(c.leg(2))))); }},
        {"pair_share_of_combined",
         [](const Ctx& c) -> Answer {
             double a = total(c.col(c.leg(1)));
             return pct(a, a + total(c.col(c.leg(2))));
         }},
        {"row_argmax_series", [](const Ctx& c) -> Answer { return c.t.col_labels()[first_max(c.row(c.tick(1)))]; }},
        {"row_argmin_series", [](const Ctx& c) -> Answer { return c.t.col_labels()[first_min(c.row(c.tick(1)))]; }},
        {"row_sum", [](const Ctx& c) -> Answer { return total(c.row(c.tick(1))); }},
        {"row_mean", [](const Ctx& c) -> Answer { return avg(c.row(c.tick(1))); }},
        {"row_range", [](const Ctx& c) -> Answer { return hi(c.row(c.tick(1))) - lo(c.row(c.tick(1))); }},
        {"row_share", [](const Ctx& c) -> Answer { return pct(c.c1(1), total(c.row(c.tick(1)))); }},
        {"row_sum_diff_ticks", [](const Ctx& c) -> Answer { return total(c.row(c.tick(2))) - total(c.row(c.tick(1))); }},
        {"triple_sum_at_tick",
         [](const Ctx& c) -> Answer {
             std::size_t r = c.tick(1);
             return c.cell(r, c.leg(1)) + c.cell(r, c.leg(2)) + c.cell(r, c.leg(3));
         }},
        {"series_count_total", [](const Ctx& c) -> Answer { return static_cast<double>(c.t.cols()); }},

        // continuous x
        {"cont_change_first_last", [](const Ctx& c) -> Answer { return c.s1().back() - c.s1().front(); }},
        {"cont_pct_growth", [](const Ctx& c) -> Answer { return pct(c.s1().back() - c.s1().front(), c.s1().front()); }},
        {"cont_avg_rate",
         [](const Ctx& c) -> Answer {
             return (c.c1(2) - c.c1(1)) / (static_cast<double>(c.tick(2)) - static_cast<double>(c.tick(1)));
         }},
        {"cont_increased_overall", [](const Ctx& c) -> Answer { return c.s1().front() < c.s1().back(); }},
        {"cont_count_above_start", [](const Ctx& c) -> Answer { return count_if_gt(c.s1(), c.s1().front()); }},
        {"cont_change_last_k",
         [](const Ctx& c) -> Answer { return c.s1().back() - c.s1()[c.n() - static_cast<std::size_t>(c.b.k)]; }},
        {"cont_abs_gap_at", [](const Ctx& c) -> Answer { return std::fabs(c.cell(c.tick(1), c.leg(1)) - c.cell(c.tick(1), c.leg(2))); }},

        // pie
        {"pie_share_diff", [](const Ctx& c) -> Answer { return pct(c.c1(1) - c.c1(2), total(c.s1())); }},
        {"pie_combined_share", [](const Ctx& c) -> Answer { return pct(c.c1(1) + c.c1(2), total(c.s1())); }},
        {"pie_top_k_share",
         [](const Ctx& c) -> Answer { return pct(total(part(desc(c.s1()), 1, static_cast<std::size_t>(c.b.k))), total(c.s1())); }},

        // histogram
        {"hist_cumulative_to", [](const Ctx& c) -> Answer { return total(part(c.s1(), 1, c.tick(1) + 1)); }},
        {"hist_from_bin", [](const Ctx& c) -> Answer { return total(part(c.s1(), c.tick(1) + 1, c.n())); }},
        {"hist_first_k_share",
         [](const Ctx& c) -> Answer { return pct(total(part(c.s1(), 1, static_cast<std::size_t>(c.b.k))), total(c.s1())); }},
        {"hist_bin_ratio", [](const Ctx& c) -> Answer { return c.c1(1) / c.c1(2); }},

        // box
        {"box_median_of", [=](const Ctx& c) -> Answer { return c.cell(c.tick(1), kMed); }},
        {"box_iqr_of", [=](const Ctx& c) -> Answer { return c.cell(c.tick(1), kQ3) - c.cell(c.tick(1), kQ1); }},
        {"box_span_of", [=](const Ctx& c) -> Answer { return c.cell(c.tick(1), kUp) - c.cell(c.tick(1), kLow); }},
        {"box_argmax_median", [=](const Ctx& c) { return rowlab(c, first_max(c.col(kMed))); }},
        {"box_argmin_median", [=](const Ctx& c) { return rowlab(c, first_min(c.col(kMed))); }},
        {"box_argmax_iqr", [=](const Ctx& c) { return rowlab(c, first_max(minus(c.col(kQ3), c.col(kQ1)))); }},
        {"box_argmax_span", [=](const Ctx& c) { return rowlab(c, first_max(minus(c.col(kUp), c.col(kLow)))); }},
        {"box_median_diff", [=](const Ctx& c) -> Answer { return c.cell(c.tick(1), kMed) - c.cell(c.tick(2), kMed); }},
        {"box_max_upper", [=](const Ctx& c) -> Answer { return hi(c.col(kUp)); }},
        {"box_min_lower", [=](const Ctx& c) -> Answer { return lo(c.col(kLow)); }},
        {"box_mean_median", [=](const Ctx& c) -> Answer { return avg(c.col(kMed)); }},
        {"box_median_above_q3", [=](const Ctx& c) -> Answer { return c.cell(c.tick(1), kMed) > c.cell(c.tick(2), kQ3); }},
        {"box_count_median_above", [=](const Ctx& c) -> Answer { return count_if_gt(c.col(kMed), *c.b.threshold); }},
        {"box_skew_of",
         [=](const Ctx& c) -> Answer {
             std::size_t r = c.tick(1);
             return (c.cell(r, kQ3) - c.cell(r, kMed)) - (c.cell(r, kMed) - c.cell(r, kQ1));
         }},

        // bubble
        {"bubble_argmax_size", [=](const Ctx& c) { return rowlab(c, first_max(c.col(kSize))); }},
        {"bubble_argmin_size", [=](const Ctx& c) { return rowlab(c, first_min(c.col(kSize))); }},
        {"bubble_argmax_x", [=](const Ctx& c) { return rowlab(c, first_max(c.col(kX))); }},
        {"bubble_argmax_y", [=](const Ctx& c) { return rowlab(c, first_max(c.col(kY))); }},
        {"bubble_y_of", [=](const Ctx& c) -> Answer { return c.cell(c.tick(1), kY); }},
        {"bubble_x_diff", [=](const Ctx& c) -> Answer { return c.cell(c.tick(1), kX) - c.cell(c.tick(2), kX); }},
        {"bubble_corr_xy", [=](const Ctx& c) -> Answer { return corr(c.col(kX), c.col(kY)); }},
        {"bubble_positive_corr", [=](const Ctx& c) -> Answer { return corr(c.col(kX), c.col(kY)) > 0.0; }},
        {"bubble_size_sum", [=](const Ctx& c) -> Answer { return total(c.col(kSize)); }},
        {"bubble_size_ratio", [=](const Ctx& c) -> Answer { return c.cell(c.tick(1), kSize) / c.cell(c.tick(2), kSize); }},
        {"bubble_mean_y", [=](const Ctx& c) -> Answer { return avg(c.col(kY)); }},
        {"bubble_count_x_above", [=](const Ctx& c) -> Answer { return count_if_gt(c.col(kX), *c.b.threshold); }},
        {"bubble_size_share", [=](const Ctx& c) -> Answer { return pct(c.cell(c.tick(1), kSize), total(c.col(kSize))); }},

        // referring: marked elements
        {"ref_value", [](const Ctx& c) -> Answer { return c.cell(c.mrow(1), c.mcol(1)); }},
        {"ref_tick_label", [](const Ctx& c) -> Answer { return c.t.row_labels()[c.mrow(1)]; }},
        {"ref_series_label", [](const Ctx& c) -> Answer { return c.t.col_labels()[c.mcol(1)]; }},
        {"ref_diff_two", [](const Ctx& c) -> Answer { return c.cell(c.mrow(1), c.mcol(1)) - c.cell(c.mrow(2), c.mcol(2)); }},
        {"ref_sum_two", [](const Ctx& c) -> Answer { return c.cell(c.mrow(1), c.mcol(1)) + c.cell(c.mrow(2), c.mcol(2)); }},
        {"ref_ratio_two", [](const Ctx& c) -> Answer { return c.cell(c.mrow(1), c.mcol(1)) / c.cell(c.mrow(2), c.mcol(2)); }},
        {"ref_greater_two", [](const Ctx& c) -> Answer { return c.cell(c.mrow(1), c.mcol(1)) > c.cell(c.mrow(2), c.mcol(2)); }},
        {"ref_minus_series_mean", [](const Ctx& c) -> Answer { return c.cell(c.mrow(1), c.mcol(1)) - avg(c.col(c.mcol(1))); }},
        {"ref_share_of_series", [](const Ctx& c) -> Answer { return pct(c.cell(c.mrow(1), c.mcol(1)), total(c.col(c.mcol(1)))); }},
        {"ref_rank_in_series", [](const Ctx& c) -> Answer { return count_if_gt(c.col(c.mcol(1)), c.cell(c.mrow(1), c.mcol(1))) + 1.0; }},
        {"ref_is_series_max", [](const Ctx& c) -> Answer { return c.cell(c.mrow(1), c.mcol(1)) == hi(c.col(c.mcol(1))); }},
        {"ref_count_above_in_series", [](const Ctx& c) -> Answer { return count_if_gt(c.col(c.mcol(1)), c.cell(c.mrow(1), c.mcol(1))); }},
        {"ref_gap_to_series_max", [](const Ctx& c) -> Answer { return hi(c.col(c.mcol(1))) - c.cell(c.mrow(1), c.mcol(1)); }},
        {"ref_gap_to_series_min", [](const Ctx& c) -> Answer { return c.cell(c.mrow(1), c.mcol(1)) - lo(c.col(c.mcol(1))); }},
        {"ref_share_of_tick", [](const Ctx& c) -> Answer { return pct(c.cell(c.mrow(1), c.mcol(1)), total(c.row(c.mrow(1)))); }},
        {"ref_gap_to_tick_max", [](const Ctx& c) -> Answer { return hi(c.row(c.mrow(1))) - c.cell(c.mrow(1), c.mcol(1)); }},
        {"ref_tick_total", [](const Ctx& c) -> Answer { return total(c.row(c.mrow(1))); }},
        {"ref_sum_three",
         [](const Ctx& c) -> Answer {
             return c.cell(c.mrow(1), c.mcol(1)) + c.cell(c.mrow(2), c.mcol(2)) + c.cell(c.mrow(3), c.mcol(3));
         }},
        {"ref_mean_three",
         [](const Ctx& c) -> Answer {
             return (c.cell(c.mrow(1), c.mcol(1)) + c.cell(c.mrow(2), c.mcol(2)) + c.cell(c.mrow(3), c.mcol(3))) / 3.0;
         }},
        {"ref_pct_change_two",
         [](const Ctx& c) -> Answer {
             double a = c.cell(c.mrow(1), c.mcol(1));
             return pct(c.cell(c.mrow(2), c.mcol(2)) - a, a);
         }},
        {"ref_pair_abs_diff", [](const Ctx& c) -> Answer { return std::fabs(c.cell(c.mrow(1), c.mcol(1)) - c.cell(c.mrow2(1), c.mcol2(1))); }},
        {"ref_pair_sum", [](const Ctx& c) -> Answer { return c.cell(c.mrow(1), c.mcol(1)) + c.cell(c.mrow2(1), c.mcol2(1)); }},
        {"ref_combined_share_two",
         [](const Ctx& c) -> Answer {
             return pct(c.cell(c.mrow(1), c.mcol(1)) + c.cell(c.mrow(2), c.mcol(2)), total(c.col(c.mcol(1))));
         }},
        {"ref_cumulative_to", [](const Ctx& c) -> Answer { return total(part(c.col(c.mcol(1)), 1, c.mrow(1) + 1)); }},
        {"ref_box_median", [=](const Ctx& c) -> Answer { return c.cell(c.mrow(1), kMed); }},
        {"ref_box_iqr", [=](const Ctx& c) -> Answer { return c.cell(c.mrow(1), kQ3) - c.cell(c.mrow(1), kQ1); }},
        {"ref_box_span", [=](const Ctx& c) -> Answer { return c.cell(c.mrow(1), kUp) - c.cell(c.mrow(1), kLow); }},
        {"ref_box_median_diff", [=](const Ctx& c) -> Answer { return c.cell(c.mrow(1), kMed) - c.cell(c.mrow(2), kMed); }},
        {"ref_box_median_above_mean", [=](const Ctx& c) -> Answer { return c.cell(c.mrow(1), kMed) > avg(c.col(kMed)); }},
        {"ref_box_upper", [=](const Ctx& c) -> Answer { return c.cell(c.mrow(1), kUp); }},
        {"ref_bubble_size", [=](const Ctx& c) -> Answer { return c.cell(c.mrow(1), kSize); }},
        {"ref_bubble_x", [=](const Ctx& c) -> Answer { return c.cell(c.mrow(1), kX); }},
        {"ref_bubble_y", [=](const Ctx& c) -> Answer { return c.cell(c.mrow(1), kY); }},
        {"ref_bubble_size_diff", [=](const Ctx& c) -> Answer { return c.cell(c.mrow(1), kSize) - c.cell(c.mrow(2), kSize); }},
        {"ref_bubble_y_ratio", [=](const Ctx& c) -> Answer { return c.cell(c.mrow(1), kY) / c.cell(c.mrow(2), kY); }},
        {"ref_bubble_is_largest", [=](const Ctx& c) -> Answer { return c.cell(c.mrow(1), kSize) == hi(c.col(kSize)); }},
        {"ref_bubble_size_rank", [=](const Ctx& c) -> Answer { return count_if_gt(c.col(kSize), c.cell(c.mrow(1), kSize)) + 1.0; }},
    };
    return m;
}

inline bool knows(const std::string& family) { return families().count(family) > 0; }

/// Throws std::out_of_range for a family the oracle does not cover.
inline Answer answer(const std::string& family, const DataTable& t, const SlotBindings& b) {
    return families().at(family)(Ctx{t, b});
}

}  // namespace oracle
