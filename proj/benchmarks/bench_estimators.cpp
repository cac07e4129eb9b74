#include <benchmark/benchmark.h>

#include <vector>

#include "mom/bounds.hpp"
#include "mom/contamination.hpp"
#include "mom/estimators.hpp"
#include "mom/partitioning.hpp"
#include "mom/rng.hpp"

namespace {

mom::Sample gaussian_sample(long n) {
    mom::Rng rng(99);
    mom::Sample s;
    s.values.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) s.values.push_back(rng.normal());
    return s;
}

void bm_median_of_means(benchmark::State& state) {
    const long n = state.range(0);
    const mom::Sample s = gaussian_sample(n);
    const mom::BlockPartition part = mom::partition_contiguous(n, n / 100);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mom::median_of_means(s, part));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bm_median_of_means)->Arg(10000)->Arg(100000)->Arg(1000000);

void bm_partition_random(benchmark::State& state) {
    const long n = state.range(0);
    std::uint64_t seed = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mom::partition_random(n, n / 100, seed++));
    }
}
BENCHMARK(bm_partition_random)->Arg(10000)->Arg(100000);

void bm_u_statistic(benchmark::State& state) {
    const long n = state.range(0);
    const mom::Sample s = gaussian_sample(n);
    const mom::UKernel kernel = mom::variance_kernel();
    for (auto _ : state) {
        benchmark::DoNotOptimize(mom::u_statistic(s, kernel));
    }
    state.SetItemsProcessed(state.iterations() * n * (n - 1) / 2);
}
BENCHMARK(bm_u_statistic)->Arg(200)->Arg(1000)->Arg(2000);

void bm_median_of_u(benchmark::State& state) {
    const long n = state.range(0);
    const mom::Sample s = gaussian_sample(n);
    const mom::BlockPartition part = mom::partition_contiguous(n, n / 25);
    const mom::UKernel kernel = mom::variance_kernel();
    for (auto _ : state) {
        benchmark::DoNotOptimize(mom::median_of_u(s, kernel, part));
    }
}
BENCHMARK(bm_median_of_u)->Arg(10000)->Arg(100000);

void bm_mou2_diag(benchmark::State& state) {
    const long n = state.range(0);
    const mom::Sample x = gaussian_sample(n);
    const mom::Sample y = gaussian_sample(n);
    const mom::DiagonalPairing pairing = mom::diagonal_pairing(n, n, n / 10);
    const mom::CrossKernel kernel = mom::mann_whitney_kernel();
    for (auto _ : state) {
        benchmark::DoNotOptimize(mom::median_of_u2_diag(x, y, kernel, pairing));
    }
}
BENCHMARK(bm_mou2_diag)->Arg(10000)->Arg(100000);

void bm_variance_proxy(benchmark::State& state) {
    const mom::Sample s = gaussian_sample(2000);
    const mom::UKernel kernel = mom::variance_kernel();
    for (auto _ : state) {
        mom::Rng rng(7);
        benchmark::DoNotOptimize(mom::estimate_variance_proxy(s, kernel, rng));
    }
}
BENCHMARK(bm_variance_proxy);

}  // namespace

BENCHMARK_MAIN();
