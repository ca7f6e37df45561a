#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "edist/matrix.hpp"

namespace edist {

enum class Family { normal, exponential, student_t, beta, gamma, bernoulli };

/// One seeded sampling family with closed-form moments.
///
/// Parameter meanings per family:
///   normal(mu, sigma)        p1 = mu, p2 = sigma (> 0)
///   exponential(rate)        p1 = rate (> 0); scale form accepted in parse
///   student_t(df)            p1 = df (> 0)
///   beta(alpha, beta)        p1, p2 > 0
///   gamma(k, theta)          p1 = shape, p2 = scale, both > 0
///   bernoulli(p)             p1 in (0, 1)
struct DistributionSpec {
    Family family = Family::normal;
    double p1 = 0.0;
    double p2 = 1.0;

    /// Parses forms like "normal(0,1)", "exp(1)", "exponential(rate=0.1)",
    /// "exp(scale=10)", "t(5)", "student_t(5)", "beta(0.5,0.5)",
    /// "gamma(1,2)", "bernoulli(0.05)". Throws on invalid parameters.
    static DistributionSpec parse(const std::string& text);
    std::string to_string() const;
};

/// Closed-form population moments. Kurtosis (and for low df the variance) of
/// the t family needs df > 4; df <= 4 throws "kurtosis undefined".
struct TheoreticalMoments {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double kurtosis_excess = 0.0;
};

TheoreticalMoments theoretical_moments(const DistributionSpec& spec);

/// Seeded i.i.d. sample, n rows by d columns. Row i draws from RNG substream
/// (seed, i), so generation can be partitioned by rows without changing the
/// output. Deterministic and platform-independent given (spec, n, d, seed).
DatasetMatrix sample(const DistributionSpec& spec, std::size_t n, std::size_t d,
                     std::uint64_t seed);

} // namespace edist
