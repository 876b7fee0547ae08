#include "kglab/reference.hpp"

#include "kglab/sampling.hpp"
#include "kglab/slab.hpp"

#include <chrono>

namespace kglab::reference {

std::optional<LatticeVector> in_union(std::span<const double> x, TruncationWindow w,
                                      const PsiSpec& spec)
{
    const int n = static_cast<int>(x.size());
    require_unit_point(x, n);
    for (std::int64_t k = w.lo(); k <= w.hi(); ++k) {
        const double delta = eval_psi(spec, k);
        for (auto&& q : shell_iter(n, k))
            if (slab_contains(Slab(q, delta), x))
                return std::move(q);
    }
    return std::nullopt;
}

std::uint64_t count_solutions(std::span<const double> x, std::int64_t Q, const PsiSpec& spec)
{
    const int n = static_cast<int>(x.size());
    require_unit_point(x, n);
    std::uint64_t canonical = 0;
    for (std::int64_t k = 1; k <= Q; ++k) {
        const double delta = eval_psi(spec, k);
        for (auto&& q : shell_iter(n, k))
            if (slab_contains(Slab(q, delta), x))
                ++canonical;
    }
    return 2 * canonical;
}

Estimate estimate_measure(TruncationWindow w, const PsiSpec& spec, int n, std::uint64_t samples,
                          std::uint64_t seed)
{
    const auto start = std::chrono::steady_clock::now();
    const auto hits = count_hits_serial(samples, seed, n, [&](std::span<const double> x) {
        return reference::in_union(x, w, spec).has_value();
    });
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    return Estimate::from_hits(hits, samples, seed, dt.count());
}

}  // namespace kglab::reference
