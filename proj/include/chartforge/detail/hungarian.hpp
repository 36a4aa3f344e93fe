#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace chartforge::detail {

/// Minimum-cost assignment for a rectangular cost matrix (rows x cols).
/// Returns, for each row, the matched column or -1 when rows > cols.
/// O(n^2 m) shortest augmenting path with potentials.
template <class T>
std::vector<long> hungarian(const std::vector<std::vector<T>>& cost) {
    const std::size_t rows = cost.size();
    const std::size_t cols = rows ? cost[0].size() : 0;
    if (rows == 0 || cols == 0) return std::vector<long>(rows, -1);

    // The augmenting loop needs n <= m; solve the transpose otherwise.
    const bool flip = rows > cols;
    const std::size_t n = flip ? cols : rows;
    const std::size_t m = flip ? rows : cols;
    auto a = [&](std::size_t i, std::size_t j) -> T { return flip ? cost[j][i] : cost[i][j]; };

    const T inf = std::numeric_limits<T>::max();
    std::vector<T> u(n + 1, T{}), v(m + 1, T{});
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);

    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<T> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            T delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const T cur = a(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<long> match(rows, -1);
    for (std::size_t j = 1; j <= m; ++j) {
        if (p[j] == 0) continue;
        if (flip) {
            match[j - 1] = static_cast<long>(p[j] - 1);
        } else {
            match[p[j] - 1] = static_cast<long>(j - 1);
        }
    }
    return match;
}

}  // namespace chartforge::detail
