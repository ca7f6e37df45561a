#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "edist/empirical.hpp"
#include "edist/synth.hpp"

namespace edist {

/// Benchmark grid: distribution pairs by sample sizes by methods, with
/// `repetitions` fresh-sample repeats per cell.
struct BenchConfig {
    std::vector<DistributionSpec> distributions;
    std::vector<std::pair<std::size_t, std::size_t>> pairs; // indices into distributions
    std::vector<std::size_t> sizes{100, 1000, 10000};
    std::vector<Method> methods{Method::empirical, Method::taylor};
    std::size_t d = 1;
    int repetitions = 5;
    std::uint64_t seed = 0;
    int threads = 1;
};

/// Parses the documented JSON config schema (see README). Unknown keys are
/// rejected; "pairs" defaults to every same-distribution pair.
BenchConfig config_from_json_string(const std::string& text);

struct BenchRow {
    std::string dist_a;
    std::string dist_b;
    std::size_t n = 0;
    Method method = Method::empirical;
    int rep = 0;
    double h = 0.0;
    EstimateFlags flags;
    std::uint64_t seed = 0;      // derived per row
    std::int64_t elapsed_ns = 0; // timing of the estimate call
};

/// Per (pair, n, method) aggregate over repetitions.
struct BenchCell {
    std::string dist_a;
    std::string dist_b;
    std::size_t n = 0;
    Method method = Method::empirical;
    double mean_h = 0.0;
    std::int64_t mean_elapsed_ns = 0;
    std::int64_t median_elapsed_ns = 0;
};

struct BenchReport {
    BenchConfig config;
    std::vector<BenchRow> rows;
    std::vector<BenchCell> cells;
};

/// Runs the whole grid. One warm-up estimate per cell precedes the timed
/// repetitions. Statistical fields are deterministic given (config, seed);
/// only the elapsed_ns fields vary between runs.
BenchReport run_bench(const BenchConfig& config);

std::string report_to_json_string(const BenchReport& r);
std::string report_to_csv_string(const BenchReport& r);

/// Median wall time in nanoseconds of `fn` over `reps` runs after one
/// warm-up call (steady clock).
std::int64_t time_median_ns(const std::function<void()>& fn, int reps);

} // namespace edist
