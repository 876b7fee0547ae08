#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kglab {

/// Samples are grouped in fixed-size blocks; block b owns sample indices
/// [b * kSampleBlock, (b+1) * kSampleBlock) and has its own generator seeded
/// from (seed, b). Any assignment of blocks to workers therefore draws the
/// same points.
inline constexpr std::uint64_t kSampleBlock = 4096;

/// Uniform points in [0,1)^dim for one block of the sample stream.
class BlockSampler {
public:
    BlockSampler(std::uint64_t seed, std::uint64_t block, int dim)
        : dim_(dim)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                          static_cast<std::uint32_t>(dim)};
        engine_.seed(seq);
    }

    void draw(std::span<double> x)
    {
        for (int i = 0; i < dim_; ++i)
            x[static_cast<std::size_t>(i)] = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

private:
    std::mt19937_64 engine_;
    int dim_;
};

/// Calls visit(x) for sample indices [first, last) in order.
template <class Visit>
void for_each_sample(std::uint64_t seed, int dim, std::uint64_t first, std::uint64_t last,
                     Visit&& visit)
{
    std::vector<double> x(static_cast<std::size_t>(dim));
    for (std::uint64_t b = first / kSampleBlock; b * kSampleBlock < last; ++b) {
        BlockSampler sampler(seed, b, dim);
        const std::uint64_t lo = b * kSampleBlock;
        const std::uint64_t hi = std::min(last, lo + kSampleBlock);
        for (std::uint64_t i = lo; i < hi; ++i) {
            sampler.draw(x);
            if (i >= first)
                visit(std::span<const double>(x));
        }
    }
}

/// The first `count` points of the stream, materialized.
[[nodiscard]] inline std::vector<std::vector<double>> sample_points(std::uint64_t seed,
                                                                    std::uint64_t count, int dim)
{
    std::vector<std::vector<double>> out;
    out.reserve(count);
    for_each_sample(seed, dim, 0, count,
                    [&](std::span<const double> x) { out.emplace_back(x.begin(), x.end()); });
    return out;
}

/// Counts samples satisfying `pred`, one block at a time in index order.
template <class Pred>
[[nodiscard]] std::uint64_t count_hits_serial(std::uint64_t samples, std::uint64_t seed, int dim,
                                              Pred&& pred)
{
    std::uint64_t hits = 0;
    for_each_sample(seed, dim, 0, samples, [&](std::span<const double> x) {
        if (pred(x))
            ++hits;
    });
    return hits;
}

/// Parallel counterpart of count_hits_serial. Blocks are distributed over at
/// most `threads` OpenMP workers (0 = runtime default); per-worker counts are
/// summed, so the total does not depend on the schedule.
template <class Pred>
[[nodiscard]] std::uint64_t count_hits(std::uint64_t samples, std::uint64_t seed, int dim,
                                       int threads, Pred&& pred)
{
    const auto blocks = static_cast<std::int64_t>((samples + kSampleBlock - 1) / kSampleBlock);
    std::uint64_t hits = 0;
#ifdef _OPENMP
    const int workers = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) reduction(+ : hits) num_threads(workers)
#else
    (void)threads;
#endif
    for (std::int64_t b = 0; b < blocks; ++b) {
        const auto lo = static_cast<std::uint64_t>(b) * kSampleBlock;
        const auto hi = std::min(samples, lo + kSampleBlock);
        BlockSampler sampler(seed, static_cast<std::uint64_t>(b), dim);
        std::vector<double> x(static_cast<std::size_t>(dim));
        std::uint64_t local = 0;
        for (auto i = lo; i < hi; ++i) {
            sampler.draw(x);
            if (pred(std::span<const double>(x)))
                ++local;
        }
        hits += local;
    }
    return hits;
}

/// Histogram version of count_hits: `classify(x)` returns a bucket in
/// [0, buckets) or a negative value to skip the sample.
template <class Classify>
[[nodiscard]] std::vector<std::uint64_t> count_buckets(std::uint64_t samples, std::uint64_t seed,
                                                       int dim, int threads, std::size_t buckets,
                                                       Classify&& classify)
{
    const auto blocks = static_cast<std::int64_t>((samples + kSampleBlock - 1) / kSampleBlock);
    std::vector<std::uint64_t> totals(buckets, 0);
#ifdef _OPENMP
    const int workers = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel num_threads(workers)
#else
    (void)threads;
#endif
    {
        std::vector<std::uint64_t> local(buckets, 0);
        std::vector<double> x(static_cast<std::size_t>(dim));
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 1)
#endif
        for (std::int64_t b = 0; b < blocks; ++b) {
            const auto lo = static_cast<std::uint64_t>(b) * kSampleBlock;
            const auto hi = std::min(samples, lo + kSampleBlock);
            BlockSampler sampler(seed, static_cast<std::uint64_t>(b), dim);
            for (auto i = lo; i < hi; ++i) {
                sampler.draw(x);
                const auto c = classify(std::span<const double>(x));
                if (c >= 0)
                    ++local[static_cast<std::size_t>(c)];
            }
        }
#ifdef _OPENMP
#pragma omp critical(kglab_count_buckets)
#endif
        for (std::size_t i = 0; i < buckets; ++i)
            totals[i] += local[i];
    }
    return totals;
}

}  // namespace kglab
