#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>

#include "edist/matrix.hpp"

namespace edist {

/// Two-sample permutation test result. The statistic is the empirical energy
/// statistic scaled by n*m/(n+m); the p-value uses the add-one rule
/// (1 + #{permuted >= observed}) / (B + 1) and therefore lies in (0, 1].
struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::uint64_t permutations = 0;
    std::uint64_t seed = 0;
    std::array<std::pair<double, bool>, 3> reject_at{{{0.01, false}, {0.05, false}, {0.10, false}}};
};

std::string to_json_string(const TestResult& r);

/// Permutation two-sample test of equal distributions. Pools the rows, sorts
/// them lexicographically (so the result is invariant to input row order),
/// and draws B uniform relabelings; replicate b uses RNG substream (seed, b+1).
/// Throws "insufficient permutations" for B < 99 and the usual dimension
/// mismatch error.
TestResult permutation_test(const DatasetMatrix& x, const DatasetMatrix& y,
                            std::uint64_t B, std::uint64_t seed);

} // namespace edist
