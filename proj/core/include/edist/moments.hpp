#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edist/matrix.hpp"

namespace edist {

/// Per-feature central-moment sums S_p = sum_i (x_i - mean)^p accumulated in a
/// single pass. Population (1/n) normalization is used for every derived
/// moment; order 6 tracking is opt-in.
struct MomentSummary {
    std::uint64_t n = 0;
    std::size_t d = 0;
    int order = 4; // 4 or 6
    std::vector<double> mean;
    std::vector<double> s2;
    std::vector<double> s3;
    std::vector<double> s4;
    std::vector<double> s5; // present iff order == 6
    std::vector<double> s6; // present iff order == 6

    bool operator==(const MomentSummary&) const = default;
};

/// Derived per-feature moments. With sigma = 0 the shape statistics are
/// reported as 0 and `degenerate` is set instead of producing NaN.
struct DerivedMoments {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double kurtosis_excess = 0.0;
    std::optional<double> sixth_cumulant; // set iff order == 6
    bool degenerate = false;
};

/// Single-pass summary of a dataset. Throws "empty input" or
/// "non-finite value at (row, col)"; order must be 4 or 6.
MomentSummary summarize(const DatasetMatrix& data, int order = 4);

/// Single-pass summary over a row source; `row(i)` must return a pointer to
/// the d values of row i and is invoked exactly once per row, in order.
template <class RowFn>
MomentSummary summarize_rows(std::size_t n, std::size_t d, int order, RowFn&& row);

/// Pools two summaries as if their raw data had been concatenated.
/// Throws on dimension or order mismatch.
MomentSummary merge(const MomentSummary& a, const MomentSummary& b);

/// Derived moments of feature i. Throws "insufficient samples for variance"
/// when n < 2.
DerivedMoments derived_moments(const MomentSummary& s, std::size_t i);

/// Sixth cumulant from population central moments m2, m3, m4, m6:
/// k6 = m6 - 15 m4 m2 - 10 m3^2 + 30 m2^3.
double sixth_cumulant(double m2, double m3, double m4, double m6);

/// Wire form: {"n","d","order","mean","s2","s3","s4"[,"s5","s6"]}, arrays of
/// length d, floats encoded as shortest round-trip decimals.
std::string to_json_string(const MomentSummary& s);
MomentSummary summary_from_json_string(const std::string& text);

namespace detail {

/// One accumulator per feature: central sums through order `order`.
struct MomentAccumulator {
    std::size_t d = 0;
    int order = 4;
    std::uint64_t n = 0;
    std::vector<double> mean, m2, m3, m4, m5, m6;

    MomentAccumulator(std::size_t dim, int ord);
    void push_row(const double* row);
    void merge_from(const MomentAccumulator& other);
    MomentSummary finish() const;
};

} // namespace detail

template <class RowFn>
MomentSummary summarize_rows(std::size_t n, std::size_t d, int order, RowFn&& row) {
    if (order != 4 && order != 6) {
        throw std::invalid_argument("order must be 4 or 6");
    }
    if (n == 0 || d == 0) {
        throw std::invalid_argument("empty input");
    }
    // Accumulate in fixed-size chunks merged pairwise; the chunked path is the
    // same code that powers the public merge, so pooling stays exact by
    // construction.
    constexpr std::size_t chunk_rows = 4096;
    detail::MomentAccumulator total(d, order);
    detail::MomentAccumulator chunk(d, order);
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = row(i);
        for (std::size_t j = 0; j < d; ++j) {
            if (!std::isfinite(r[j])) {
                throw std::invalid_argument("non-finite value at (" + std::to_string(i) +
                                            ", " + std::to_string(j) + ")");
            }
        }
        chunk.push_row(r);
        if (chunk.n == chunk_rows) {
            total.merge_from(chunk);
            chunk = detail::MomentAccumulator(d, order);
        }
    }
    if (chunk.n > 0) {
        total.merge_from(chunk);
    }
    return total.finish();
}

} // namespace edist
