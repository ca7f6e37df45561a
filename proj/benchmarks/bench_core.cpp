#include <cstddef>

#include <benchmark/benchmark.h>

#include "edist/approx.hpp"
#include "edist/empirical.hpp"
#include "edist/moments.hpp"
#include "edist/synth.hpp"
#include "edist/testing.hpp"

namespace {

edist::DatasetMatrix gaussian_data(std::size_t n, std::size_t d, std::uint64_t seed) {
    return edist::sample(edist::DistributionSpec::parse("normal(0,1)"), n, d, seed);
}

void bm_summarize(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const edist::DatasetMatrix x = gaussian_data(n, 8, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(edist::summarize(x, 4));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                             static_cast<std::int64_t>(n * 8));
}

void bm_mean_pairwise(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const edist::DatasetMatrix x = gaussian_data(n, 8, 2);
    const edist::DatasetMatrix y = gaussian_data(n, 8, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(edist::mean_pairwise_distance(x, y, 1));
    }
    state.SetComplexityN(static_cast<std::int64_t>(n));
}

void bm_energy_statistic(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const edist::DatasetMatrix x = gaussian_data(n, 8, 4);
    const edist::DatasetMatrix y = gaussian_data(n, 8, 5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(edist::energy_statistic(x, y, 1));
    }
    state.SetComplexityN(static_cast<std::int64_t>(n));
}

void bm_energy_from_summaries(benchmark::State& state) {
    const edist::MomentSummary sx = edist::summarize(gaussian_data(4096, 8, 6), 4);
    const edist::MomentSummary sy = edist::summarize(gaussian_data(4096, 8, 7), 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(edist::energy_from_summaries(sx, sy, edist::Method::taylor));
    }
}

void bm_permutation_test(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const edist::DatasetMatrix x = gaussian_data(n, 1, 8);
    const edist::DatasetMatrix y = gaussian_data(n, 1, 9);
    for (auto _ : state) {
        benchmark::DoNotOptimize(edist::permutation_test(x, y, 99, 11));
    }
}

} // namespace

BENCHMARK(bm_summarize)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(bm_mean_pairwise)->RangeMultiplier(4)->Range(1 << 8, 1 << 12)->Complexity();
BENCHMARK(bm_energy_statistic)->RangeMultiplier(4)->Range(1 << 8, 1 << 12)->Complexity();
BENCHMARK(bm_energy_from_summaries);
BENCHMARK(bm_permutation_test)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
