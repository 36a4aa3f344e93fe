#include "chartforge/distributions.hpp"
#include "chartforge/table.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/distributions/students_t.hpp>
#include <boost/random/beta_distribution.hpp>
#include <boost/random/binomial_distribution.hpp>
#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/geometric_distribution.hpp>
#include <boost/random/laplace_distribution.hpp>
#include <boost/random/lognormal_distribution.hpp>
#include <boost/random/negative_binomial_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/triangle_distribution.hpp>
#include <boost/random/weibull_distribution.hpp>

#include "chartforge/error.hpp"

namespace chartforge {

namespace {

constexpr double kTailLow = 0.001;
constexpr double kTailHigh = 0.999;

struct KindInfo {
    DistributionKind kind;
    std::string_view name;
    std::size_t params;
};

constexpr std::array<KindInfo, kDistributionKindCount> kKinds = {{
    {DistributionKind::Uniform, "uniform", 2},
    {DistributionKind::Normal, "normal", 2},
    {DistributionKind::LogNormal, "lognormal", 2},
    {DistributionKind::Exponential, "exponential", 1},
    {DistributionKind::Gamma, "gamma", 2},
    {DistributionKind::Beta, "beta", 2},
    {DistributionKind::ChiSquare, "chi-square", 1},
    {DistributionKind::StudentT, "student-t", 1},
    {DistributionKind::Laplace, "laplace", 2},
    {DistributionKind::CauchyTruncated, "cauchy-truncated", 2},
    {DistributionKind::ParetoTruncated, "pareto-truncated", 2},
    {DistributionKind::Weibull, "weibull", 2},
    {DistributionKind::Triangular, "triangular", 3},
    {DistributionKind::Logistic, "logistic", 2},
    {DistributionKind::Rayleigh, "rayleigh", 1},
    {DistributionKind::Poisson, "poisson", 1},
    {DistributionKind::Binomial, "binomial", 2},
    {DistributionKind::Geometric, "geometric", 1},
    {DistributionKind::NegativeBinomial, "negative-binomial", 2},
    {DistributionKind::DiscreteUniform, "discrete-uniform", 2},
    {DistributionKind::BimodalNormal, "bimodal-normal-mixture", 5},
}};

const KindInfo& info(DistributionKind k) { return kKinds[static_cast<std::size_t>(k)]; }

[[noreturn]] void bad(DistributionKind k, const std::string& why) {
    throw InvalidParams(std::string(to_string(k)) + ": " + why);
}

bool is_int(double v) { return std::floor(v) == v; }

// Uniform draw on [lo, hi) that never returns exactly lo == 0 when that
// would blow up a log.
double open_unit(Rng& rng) {
    double u = 0.0;
    do {
        u = uniform_real(rng, 0.0, 1.0);
    } while (u <= 0.0);
    return u;
}

double tail_band(Rng& rng) { return uniform_real(rng, kTailLow, kTailHigh); }

}  // namespace

std::string_view to_string(DistributionKind k) { return info(k).name; }

std::optional<DistributionKind> distribution_kind_from_string(std::string_view s) {
    for (const auto& k : kKinds) {
        if (k.name == s) return k.kind;
    }
    return std::nullopt;
}

std::size_t param_count(DistributionKind k) { return info(k).params; }

bool is_truncated(DistributionKind k) {
    return k == DistributionKind::CauchyTruncated || k == DistributionKind::ParetoTruncated ||
           k == DistributionKind::StudentT;
}

void validate(const DistributionSpec& spec) {
    const auto k = spec.kind;
    if (spec.n_samples == 0) bad(k, "n_samples must be positive");
    if (spec.params.size() != param_count(k)) {
        bad(k, "expected " + std::to_string(param_count(k)) + " parameters, got " +
                   std::to_string(spec.params.size()));
    }
    for (double p : spec.params) {
        if (!std::isfinite(p)) bad(k, "parameters must be finite");
    }
    const auto& p = spec.params;
    auto positive = [&](std::size_t i, const char* what) {
        if (!(p[i] > 0.0)) bad(k, std::string(what) + " must be > 0");
    };
    auto probability = [&](std::size_t i, bool allow_one) {
        if (!(p[i] > 0.0) || p[i] > 1.0 || (!allow_one && p[i] == 1.0)) {
            bad(k, "probability out of range");
        }
    };
    switch (k) {
        case DistributionKind::Uniform:
            if (!(p[0] < p[1])) bad(k, "need a < b");
            break;
        case DistributionKind::Normal:
        case DistributionKind::LogNormal:
        case DistributionKind::Laplace:
        case DistributionKind::CauchyTruncated:
        case DistributionKind::Logistic: positive(1, "scale"); break;
        case DistributionKind::Exponential:
        case DistributionKind::ChiSquare:
        case DistributionKind::StudentT:
        case DistributionKind::Rayleigh:
        case DistributionKind::Poisson: positive(0, "parameter"); break;
        case DistributionKind::Gamma:
        case DistributionKind::Beta:
        case DistributionKind::ParetoTruncated:
        case DistributionKind::Weibull:
            positive(0, "first parameter");
            positive(1, "second parameter");
            break;
        case DistributionKind::Triangular:
            if (!(p[0] < p[2]) || p[1] < p[0] || p[1] > p[2]) bad(k, "need a <= mode <= b, a < b");
            break;
        case DistributionKind::Binomial:
            if (!(p[0] >= 1.0) || !is_int(p[0])) bad(k, "trials must be a positive integer");
            if (p[1] < 0.0 || p[1] > 1.0) bad(k, "probability out of range");
            break;
        case DistributionKind::Geometric: probability(0, false); break;
        case DistributionKind::NegativeBinomial:
            if (!(p[0] >= 1.0) || !is_int(p[0])) bad(k, "successes must be a positive integer");
            probability(1, true);
            break;
        case DistributionKind::DiscreteUniform:
            if (!is_int(p[0]) || !is_int(p[1]) || p[0] > p[1]) bad(k, "need integers a <= b");
            break;
        case DistributionKind::BimodalNormal:
            positive(1, "sigma1");
            positive(3, "sigma2");
            if (p[4] < 0.0 || p[4] > 1.0) bad(k, "weight must be in [0, 1]");
            break;
    }
}

std::vector<double> sample_distribution(const DistributionSpec& spec, std::uint64_t seed) {
    validate(spec);
    Rng rng = make_rng(seed, 0xD157);
    const auto& p = spec.params;
    std::vector<double> out;
    out.reserve(spec.n_samples);

    auto fill = [&](auto&& draw) {
        while (out.size() < spec.n_samples) {
            double v = static_cast<double>(draw());
            if (std::isfinite(v)) out.push_back(v);
        }
    };

    switch (spec.kind) {
        case DistributionKind::Uniform:
            fill([&] { return uniform_real(rng, p[0], p[1]); });
            break;
        case DistributionKind::Normal: {
            boost::random::normal_distribution<double> d(p[0], p[1]);
            fill([&] { return d(rng); });
            break;
        }
        case DistributionKind::LogNormal: {
            boost::random::lognormal_distribution<double> d(p[0], p[1]);
            fill([&] { return d(rng); });
            break;
        }
        case DistributionKind::Exponential: {
            boost::random::exponential_distribution<double> d(p[0]);
            fill([&] { return d(rng); });
            break;
        }
        case DistributionKind::Gamma: {
            boost::random::gamma_distribution<double> d(p[0], p[1]);
            fill([&] { return d(rng); });
            break;
        }
        case DistributionKind::Beta: {
            boost::random::beta_distribution<double> d(p[0], p[1]);
            fill([&] { return d(rng); });
            break;
        }
        case DistributionKind::ChiSquare: {
            boost::random::chi_squared_distribution<double> d(p[0]);
            fill([&] { return d(rng); });
            break;
        }
        case DistributionKind::StudentT: {
            boost::math::students_t_distribution<double> d(p[0]);
            fill([&] { return boost::math::quantile(d, tail_band(rng)); });
            break;
        }
        case DistributionKind::Laplace: {
            boost::random::laplace_distribution<double> d(p[0], p[1]);
            fill([&] { return d(rng); });
            break;
        }
        case DistributionKind::CauchyTruncated:
            fill([&] { return p[0] + p[1] * std::tan(std::numbers::pi * (tail_band(rng) - 0.5)); });
            break;
        case DistributionKind::ParetoTruncated:
            fill([&] { return p[0] / std::pow(1.0 - tail_band(rng), 1.0 / p[1]); });
            break;
        case DistributionKind::Weibull: {
            boost::random::weibull_distribution<double> d(p[0], p[1]);
            fill([&] { return d(rng); });
            break;
        }
        case DistributionKind::Triangular: {
            boost::random::triangle_distribution<double> d(p[0], p[1], p[2]);
            fill([&] { return d(rng); });
            break;
        }
        case DistributionKind::Logistic:
            fill([&] {
                double u = open_unit(rng);
                return p[0] + p[1] * std::log(u / (1.0 - u));
            });
            break;
        case DistributionKind::Rayleigh:
            fill([&] { return p[0] * std::sqrt(-2.0 * std::log(open_unit(rng))); });
            break;
        case DistributionKind::Poisson: {
            boost::random::poisson_distribution<long long, double> d(p[0]);
            fill([&] { return d(rng); });
            break;
        }
        case DistributionKind::Binomial: {
            boost::random::binomial_distribution<long long, double> d(static_cast<long long>(p[0]), p[1]);
            fill([&] { return d(rng); });
            break;
        }
        case DistributionKind::Geometric: {
            boost::random::geometric_distribution<long long, double> d(p[0]);
            fill([&] { return d(rng); });
            break;
        }
        case DistributionKind::NegativeBinomial: {
            boost::random::negative_binomial_distribution<long long, double> d(
                static_cast<long long>(p[0]), p[1]);
            fill([&] { return d(rng); });
            break;
        }
        case DistributionKind::DiscreteUniform: {
            auto lo = static_cast<long long>(p[0]);
            auto hi = static_cast<long long>(p[1]);
            fill([&] { return uniform_int<long long>(rng, lo, hi); });
            break;
        }
        case DistributionKind::BimodalNormal: {
            boost::random::normal_distribution<double> first(p[0], p[1]);
            boost::random::normal_distribution<double> second(p[2], p[3]);
            fill([&] { return coin(rng, p[4]) ? first(rng) : second(rng); });
            break;
        }
    }
    return out;
}

DistributionSpec random_distribution_spec(Rng& rng, std::size_t n_samples) {
    auto kind = static_cast<DistributionKind>(uniform_int<std::size_t>(rng, 0, kDistributionKindCount - 1));
    auto r = [&](double lo, double hi) { return quantize(uniform_real(rng, lo, hi), 2); };
    auto ri = [&](int lo, int hi) { return static_cast<double>(uniform_int<int>(rng, lo, hi)); };
    DistributionSpec spec;
    spec.kind = kind;
    spec.n_samples = n_samples;
    switch (kind) {
        case DistributionKind::Uniform: {
            double a = r(0, 50);
            spec.params = {a, a + r(5, 100)};
            break;
        }
        case DistributionKind::Normal: spec.params = {r(10, 100), r(1, 20)}; break;
        case DistributionKind::LogNormal: spec.params = {r(0, 3), r(0.2, 0.8)}; break;
        case DistributionKind::Exponential: spec.params = {r(0.05, 2)}; break;
        case DistributionKind::Gamma: spec.params = {r(1, 9), r(0.5, 5)}; break;
        case DistributionKind::Beta: spec.params = {r(0.5, 5), r(0.5, 5)}; break;
        case DistributionKind::ChiSquare: spec.params = {ri(1, 12)}; break;
        case DistributionKind::StudentT: spec.params = {ri(1, 30)}; break;
        case DistributionKind::Laplace: spec.params = {r(0, 50), r(1, 10)}; break;
        case DistributionKind::CauchyTruncated: spec.params = {r(0, 50), r(0.5, 5)}; break;
        case DistributionKind::ParetoTruncated: spec.params = {r(1, 10), r(1.5, 4)}; break;
        case DistributionKind::Weibull: spec.params = {r(0.8, 4), r(1, 20)}; break;
        case DistributionKind::Triangular: {
            double a = r(0, 20);
            double b = a + r(10, 60);
            spec.params = {a, quantize(a + (b - a) * uniform_real(rng, 0.1, 0.9), 2), b};
            break;
        }
        case DistributionKind::Logistic: spec.params = {r(0, 50), r(1, 8)}; break;
        case DistributionKind::Rayleigh: spec.params = {r(1, 15)}; break;
        case DistributionKind::Poisson: spec.params = {r(2, 40)}; break;
        case DistributionKind::Binomial: spec.params = {ri(10, 80), r(0.1, 0.9)}; break;
        case DistributionKind::Geometric: spec.params = {r(0.05, 0.6)}; break;
        case DistributionKind::NegativeBinomial: spec.params = {ri(2, 12), r(0.2, 0.8)}; break;
        case DistributionKind::DiscreteUniform: {
            double a = ri(0, 20);
            spec.params = {a, a + ri(5, 50)};
            break;
        }
        case DistributionKind::BimodalNormal:
            spec.params = {r(10, 40), r(2, 6), r(50, 90), r(2, 8), r(0.3, 0.7)};
            break;
    }
    return spec;
}

}  // namespace chartforge
