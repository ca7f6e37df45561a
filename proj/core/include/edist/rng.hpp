#pragma once

#include <cmath>
#include <cstdint>

namespace edist {

/// 64-bit finalizer used by the splitmix64 generator.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

/// Deterministic splitmix64 stream with independently derived substreams.
///
/// The generator state advances by the golden-ratio constant and each output
/// is the mix64 finalizer of the state. Substream i of a seed starts from
/// mix64(mix64(seed + GOLDEN) ^ (SUBSTREAM_SALT * (i + 1))): the substream
/// index is pushed through the finalizer rather than added to the state, so
/// adjacent substreams are not shifted copies of one another.
///
/// Samplers (all fixed, documented, and platform-independent):
///   uniform      u = (next() >> 11) * 2^-53 in [0, 1)
///   normal       Box-Muller cosine branch, no caching; u1 forced nonzero
///   exponential  -log1p(-u) / rate
///   gamma        Marsaglia-Tsang squeeze for k >= 1; boost by u^(1/k) for k < 1
///   student_t    z / sqrt(chi2(df) / df), chi2 via gamma(df/2, scale 2)
///   beta         g_a / (g_a + g_b) from two unit-scale gammas
///   bernoulli    uniform() < p
class Stream {
public:
    static constexpr std::uint64_t GOLDEN = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t SUBSTREAM_SALT = 0xA0761D6478BD642Full;

    explicit Stream(std::uint64_t seed, std::uint64_t substream = 0)
        : state_(mix64(mix64(seed + GOLDEN) ^ (SUBSTREAM_SALT * (substream + 1)))) {}

    std::uint64_t next_u64() {
        state_ += GOLDEN;
        return mix64(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1); the low mantissa bit is forced on so that
    /// logarithms and fractional powers of the draw stay finite.
    double uniform_pos() {
        return static_cast<double>((next_u64() >> 11) | 1ull) * 0x1.0p-53;
    }

    double normal() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

    double exponential(double rate) {
        return -std::log1p(-uniform()) / rate;
    }

    /// Gamma(shape k, scale theta), k > 0.
    double gamma(double k, double theta) {
        if (k < 1.0) {
            const double g = gamma(k + 1.0, theta);
            return g * std::pow(uniform_pos(), 1.0 / k);
        }
        const double d = k - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            const double x = normal();
            const double t = 1.0 + c * x;
            if (t <= 0.0) {
                continue;
            }
            const double v = t * t * t;
            const double u = uniform_pos();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) {
                return d * v * theta;
            }
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
                return d * v * theta;
            }
        }
    }

    double student_t(double df) {
        const double z = normal();
        const double chi2 = gamma(0.5 * df, 2.0);
        return z / std::sqrt(chi2 / df);
    }

    double beta(double a, double b) {
        const double ga = gamma(a, 1.0);
        const double gb = gamma(b, 1.0);
        return ga / (ga + gb);
    }

    bool bernoulli(double p) {
        return uniform() < p;
    }

private:
    std::uint64_t state_;
};

} // namespace edist
