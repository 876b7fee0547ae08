// Serial reference scans against the pivot kernel and its OpenMP driver.

#include "kglab/limsup.hpp"
#include "kglab/reference.hpp"
#include "kglab/sampling.hpp"

#include <benchmark/benchmark.h>

using namespace kglab;

namespace {

const PsiSpec kSpec = PsiSpec::power(0.25, 1);

void BM_MeasureReference(benchmark::State& state)
{
    const TruncationWindow w(10, state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(reference::estimate_measure(w, kSpec, 2, 2000, 1));
}

void BM_MeasureKernel(benchmark::State& state)
{
    const TruncationWindow w(10, state.range(0));
    const int threads = static_cast<int>(state.range(1));
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate_measure(w, kSpec, 2, 2000, 1, threads));
}

void BM_CountReference(benchmark::State& state)
{
    const auto pts = sample_points(3, 16, static_cast<int>(state.range(1)));
    for (auto _ : state)
        for (const auto& p : pts)
            benchmark::DoNotOptimize(reference::count_solutions(p, state.range(0), kSpec));
}

void BM_CountKernel(benchmark::State& state)
{
    const auto pts = sample_points(3, 16, static_cast<int>(state.range(1)));
    for (auto _ : state)
        for (const auto& p : pts)
            benchmark::DoNotOptimize(count_solutions(p, state.range(0), kSpec));
}

}  // namespace

BENCHMARK(BM_MeasureReference)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MeasureKernel)->Args({100, 1})->Args({500, 1})->Args({500, 0})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CountReference)->Args({50, 2})->Args({200, 2})->Args({20, 3})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CountKernel)->Args({50, 2})->Args({200, 2})->Args({20, 3})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
