#pragma once

// Random tables and prediction corruptions for the table-matching checks.

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "chartforge/rng.hpp"
#include "chartforge/table.hpp"

namespace testgen {

using chartforge::Cell;
using chartforge::DataTable;
using chartforge::Rng;

inline const std::vector<std::string>& words() {
    static const std::vector<std::string> w = {
        "north",  "south",   "east",    "west",    "alpha",   "beta",   "gamma",   "delta",  "copper",
        "silver", "harbor",  "meadow",  "granite", "willow",  "falcon", "orchid",  "summit", "canyon",
        "quartz", "lantern", "bristol", "oslo",    "nairobi", "lima",   "kyoto",   "quebec", "madrid",
        "revenue", "exports", "imports", "budget", "output",  "profit", "yield",   "demand", "supply"};
    return w;
}

/// `n` distinct labels; none is a case-insensitive duplicate of another.
inline std::vector<std::string> labels(Rng& rng, std::size_t n) {
    auto idx = chartforge::sample_indices(rng, words().size(), n);
    std::vector<std::string> out;
    for (auto i : idx) out.push_back(words()[i]);
    return out;
}

inline double value(Rng& rng) {
    if (chartforge::coin(rng, 0.05)) return 0.0;
    return chartforge::quantize(chartforge::uniform_real(rng, 1.0, 100.0), 1);
}

inline DataTable table(Rng& rng, std::size_t rows, std::size_t cols) {
    auto all = labels(rng, rows + cols);
    std::vector<std::string> r(all.begin(), all.begin() + static_cast<long>(rows));
    std::vector<std::string> c(all.begin() + static_cast<long>(rows), all.end());
    std::vector<std::vector<Cell>> cells(rows);
    for (auto& row : cells)
        for (std::size_t j = 0; j < cols; ++j) row.push_back(Cell::number(value(rng)));
    return DataTable(r, c, cells, chartforge::TableMeta{"", "item", ""});
}

inline DataTable permuted(const DataTable& t, const std::vector<std::size_t>& rp, const std::vector<std::size_t>& cp) {
    std::vector<std::string> r, c;
    for (auto i : rp) r.push_back(t.row_labels()[i]);
    for (auto j : cp) c.push_back(t.col_labels()[j]);
    std::vector<std::vector<Cell>> cells;
    for (auto i : rp) {
        std::vector<Cell> row;
        for (auto j : cp) row.push_back(t.at(i, j));
        cells.push_back(row);
    }
    return DataTable(r, c, cells, t.meta());
}

inline DataTable random_permutation(Rng& rng, const DataTable& t) {
    return permuted(t, chartforge::sample_indices(rng, t.rows(), t.rows()), chartforge::sample_indices(rng, t.cols(), t.cols()));
}

inline std::string typo(Rng& rng, std::string s) {
    auto i = chartforge::uniform_int<std::size_t>(rng, 0, s.size() - 1);
    s[i] = static_cast<char>('a' + (s[i] - 'a' + 1 + chartforge::uniform_int(rng, 0, 24)) % 26);
    return s;
}

/// A prediction derived from `gold`: permuted, with noisy values, label
/// typos, a dropped or an extra row/column and, sometimes, transposed.
inline DataTable corrupt(Rng& rng, const DataTable& gold) {
    std::vector<std::string> r = gold.row_labels(), c = gold.col_labels();
    std::vector<std::vector<Cell>> cells = gold.cells();
    for (auto& row : cells)
        for (auto& cell : row)
            if (chartforge::coin(rng, 0.4)) {
                double v = cell.as_number() * chartforge::uniform_real(rng, 0.4, 1.6);
                cell = Cell::number(chartforge::quantize(v, 1));
            }
    for (auto* ls : {&r, &c})
        for (auto& l : *ls)
            if (chartforge::coin(rng, 0.2)) l = typo(rng, l);
    auto unique = [](const std::vector<std::string>& v) {
        auto s = v;
        std::sort(s.begin(), s.end());
        return std::adjacent_find(s.begin(), s.end()) == s.end();
    };
    if (!unique(r) || !unique(c)) return corrupt(rng, gold);

    int change = chartforge::uniform_int(rng, 0, 4);
    if (change == 1 && r.size() > 1) {
        auto i = chartforge::uniform_int<std::size_t>(rng, 0, r.size() - 1);
        r.erase(r.begin() + static_cast<long>(i));
        cells.erase(cells.begin() + static_cast<long>(i));
    } else if (change == 2 && c.size() > 1) {
        auto j = chartforge::uniform_int<std::size_t>(rng, 0, c.size() - 1);
        c.erase(c.begin() + static_cast<long>(j));
        for (auto& row : cells) row.erase(row.begin() + static_cast<long>(j));
    } else if (change == 3 && r.size() < 4) {
        std::string extra = "zz" + typo(rng, "extra");
        r.push_back(extra);
        std::vector<Cell> row;
        for (std::size_t j = 0; j < c.size(); ++j) row.push_back(Cell::number(value(rng)));
        cells.push_back(row);
    }
    DataTable pred(r, c, cells, gold.meta());
    pred = random_permutation(rng, pred);
    if (chartforge::coin(rng, 0.25)) pred = chartforge::transpose(pred);
    return pred;
}

}  // namespace testgen
