#include "kglab/slab.hpp"

#include <algorithm>
#include <bit>

#include "kglab/numeric.hpp"
#include "kglab/sampling.hpp"

#include <gmpxx.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kglab {

Slab::Slab(LatticeVector q, double delta) : q_(std::move(q)), delta_(delta)
{
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw std::invalid_argument("slab half-width delta must be a positive finite real");
}

bool slab_contains(const Slab& s, std::span<const double> x)
{
    if (static_cast<int>(x.size()) != s.dim())
        throw std::domain_error("point has dimension " + std::to_string(x.size()) +
                                ", slab normal has dimension " + std::to_string(s.dim()));
    return std::fabs(compensated_dot(s.normal().coords(), x)) < s.delta();
}

double slab_volume_bound(const Slab& s) noexcept
{
    return std::min(1.0, 2.0 * s.delta() / static_cast<double>(s.normal().height()));
}

int height_multiplicity(const LatticeVector& q) noexcept
{
    int m = 0;
    for (const auto v : q.coords())
        if ((v < 0 ? -v : v) == q.height())
            ++m;
    return m;
}

namespace {

// Positive weights after dropping zeros and reflecting negative coordinates,
// with q.x = offset + w.y for the reflected point y.
struct SlicingProblem {
    std::vector<std::int64_t> weights;
    std::int64_t offset = 0;
    std::int64_t total = 0;
};

SlicingProblem reduce(const LatticeVector& q)
{
    SlicingProblem p;
    for (const auto v : q.coords()) {
        if (v == 0)
            continue;
        if (v < 0)
            p.offset += v;
        p.weights.push_back(v < 0 ? -v : v);
        p.total += v < 0 ? -v : v;
    }
    return p;
}

double factorial(int m)
{
    double f = 1.0;
    for (int i = 2; i <= m; ++i)
        f *= i;
    return f;
}

struct Bounded {
    double value;
    double error;
};

// Uniform-sum CDF P(w.y <= t) in doubles, with an a-priori error bound.
Bounded slicing_cdf(const SlicingProblem& p, double t)
{
    const auto W = static_cast<double>(p.total);
    if (t <= 0.0)
        return {0.0, 0.0};
    if (t >= W)
        return {1.0, 0.0};
    bool flipped = false;
    if (t > 0.5 * W) {
        t = W - t;
        flipped = true;
    }
    const int m = static_cast<int>(p.weights.size());
    double denom = factorial(m);
    for (const auto w : p.weights)
        denom *= static_cast<double>(w);

    CompensatedSum acc;
    double magnitude = 0.0;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        std::int64_t ws = 0;
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i))
                ws += p.weights[static_cast<std::size_t>(i)];
        const double base = t - static_cast<double>(ws);
        if (base <= 0.0)
            continue;
        const double term = std::pow(base, m) / denom;
        magnitude += term;
        acc += (std::popcount(mask) & 1) ? -term : term;
    }
    const double eps = std::numeric_limits<double>::epsilon();
    const double error = 2.0 * (2 * m + 4) * eps * magnitude;
    const double v = acc.value();
    return {flipped ? 1.0 - v : v, error};
}

mpq_class slicing_cdf_exact(const SlicingProblem& p, const mpq_class& t)
{
    if (t <= 0)
        return 0;
    if (t >= p.total)
        return 1;
    const int m = static_cast<int>(p.weights.size());
    mpz_class denom = 1;
    for (int i = 2; i <= m; ++i)
        denom *= i;
    for (const auto w : p.weights)
        denom *= static_cast<long>(w);

    mpq_class acc = 0;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        long ws = 0;
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i))
                ws += static_cast<long>(p.weights[static_cast<std::size_t>(i)]);
        const mpq_class base = t - ws;
        if (base <= 0)
            continue;
        mpq_class term = 1;
        for (int i = 0; i < m; ++i)
            term *= base;
        if (std::popcount(mask) & 1)
            acc -= term;
        else
            acc += term;
    }
    return acc / denom;
}

}  // namespace

double slab_volume_exact(const Slab& s)
{
    // q and -q give the same slab; fixing the sign makes the result exactly symmetric.
    const auto q = s.normal().canonical();
    if (q.dim() > kExactVolumeMaxDim || q.height() > kExactVolumeMaxHeight)
        throw std::range_error("exact slab volume supports n <= 8 and |q| <= 1000, got n=" +
                               std::to_string(q.dim()) + ", |q|=" + std::to_string(q.height()));
    const auto p = reduce(q);
    const double off = static_cast<double>(p.offset);
    const double delta = s.delta();

    const auto hi = slicing_cdf(p, delta - off);
    const auto lo = slicing_cdf(p, -delta - off);
    const double rounding = std::numeric_limits<double>::epsilon() * (std::fabs(delta) + std::fabs(off));
    if (hi.error + lo.error + rounding <= kExactVolumeTolerance)
        return std::clamp(hi.value - lo.value, 0.0, 1.0);

    const mpq_class d(delta);
    const mpq_class o(static_cast<long>(p.offset));
    const mpq_class v = slicing_cdf_exact(p, d - o) - slicing_cdf_exact(p, -d - o);
    return std::clamp(v.get_d(), 0.0, 1.0);
}

SlabVolumeEstimate slab_volume_monte_carlo(const Slab& s, std::uint64_t samples, std::uint64_t seed)
{
    if (samples == 0)
        throw std::invalid_argument("Monte-Carlo slab volume needs at least one sample");
    const auto hits = count_hits(samples, seed, s.dim(), 0,
                                 [&](std::span<const double> x) { return slab_contains(s, x); });
    const double v = static_cast<double>(hits) / static_cast<double>(samples);
    return {v, std::sqrt(v * (1.0 - v) / static_cast<double>(samples))};
}

}  // namespace kglab
