#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace chartforge {

// mt19937_64 output is fixed by the standard; the Boost distributions are
// used on top of it because their algorithms are the same on every
// platform, unlike the std:: distributions.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer over (seed, stream): derives independent sub-seeds.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return Rng(mix_seed(seed, stream));
}

inline double uniform_real(Rng& rng, double lo, double hi) {
    return boost::random::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Inclusive on both ends.
template <typename Int>
Int uniform_int(Rng& rng, Int lo, Int hi) {
    return boost::random::uniform_int_distribution<Int>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double p_true = 0.5) { return uniform_real(rng, 0.0, 1.0) < p_true; }

template <typename T>
const T& pick(Rng& rng, std::span<const T> items) {
    return items[uniform_int<std::size_t>(rng, 0, items.size() - 1)];
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
    return pick(rng, std::span<const T>(items));
}

/// Fisher-Yates with the portable integer distribution.
template <typename T>
void shuffle(Rng& rng, std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = uniform_int<std::size_t>(rng, 0, i - 1);
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

/// `k` distinct indices from [0, n) in random order.
inline std::vector<std::size_t> sample_indices(Rng& rng, std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    shuffle(rng, idx);
    idx.resize(k < n ? k : n);
    return idx;
}

/// Index drawn proportionally to non-negative weights.
inline std::size_t weighted_index(Rng& rng, std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double x = uniform_real(rng, 0.0, total);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (x < weights[i]) return i;
        x -= weights[i];
    }
    for (std::size_t i = weights.size(); i > 0; --i) {
        if (weights[i - 1] > 0) return i - 1;
    }
    return 0;
}

}  // namespace chartforge
