#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "chartforge/rng.hpp"

namespace chartforge {

enum class DistributionKind {
    Uniform,           // a, b
    Normal,            // mean, sigma
    LogNormal,         // m, s  (of the underlying normal)
    Exponential,       // rate
    Gamma,             // shape, scale
    Beta,              // alpha, beta
    ChiSquare,         // degrees of freedom
    StudentT,          // degrees of freedom; truncated
    Laplace,           // location, scale
    CauchyTruncated,   // location, scale
    ParetoTruncated,   // x_min, alpha
    Weibull,           // shape, scale
    Triangular,        // a, mode, b
    Logistic,          // location, scale
    Rayleigh,          // sigma
    Poisson,           // mean
    Binomial,          // trials, p
    Geometric,         // p   (failures before first success)
    NegativeBinomial,  // successes, p
    DiscreteUniform,   // a, b (integers, inclusive)
    BimodalNormal,     // mean1, sigma1, mean2, sigma2, weight of the first mode
};

inline constexpr std::size_t kDistributionKindCount = 21;

std::string_view to_string(DistributionKind k);
std::optional<DistributionKind> distribution_kind_from_string(std::string_view s);
std::size_t param_count(DistributionKind k);

/// Heavy-tailed kinds are sampled by inverse CDF restricted to the
/// [0.1%, 99.9%] quantile band.
bool is_truncated(DistributionKind k);

struct DistributionSpec {
    DistributionKind kind = DistributionKind::Normal;
    std::vector<double> params{0.0, 1.0};
    std::size_t n_samples = 1000;
};

/// Throws InvalidParams when the parameter count or any value is outside
/// the kind's domain, or n_samples is zero.
void validate(const DistributionSpec& spec);

/// Exactly `spec.n_samples` finite values, a pure function of (spec, seed).
std::vector<double> sample_distribution(const DistributionSpec& spec, std::uint64_t seed);

/// A kind drawn uniformly with parameters from moderate, legible ranges.
DistributionSpec random_distribution_spec(Rng& rng, std::size_t n_samples);

}  // namespace chartforge
