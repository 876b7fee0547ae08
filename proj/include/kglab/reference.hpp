#pragma once

// Serial reference implementations: literal shell-by-shell scans over the
// canonical half-shells, kept to validate the pivot kernels in limsup.

#include "kglab/limsup.hpp"

#include <cstdint>
#include <optional>
#include <span>

namespace kglab::reference {

/// Scans shells lo..hi in order and returns the first canonical q whose slab
/// contains x.
[[nodiscard]] std::optional<LatticeVector> in_union(std::span<const double> x,
                                                    TruncationWindow w, const PsiSpec& spec);

/// Twice the number of canonical solutions with |q| <= Q.
[[nodiscard]] std::uint64_t count_solutions(std::span<const double> x, std::int64_t Q,
                                            const PsiSpec& spec);

/// Single-threaded estimate over the same sample stream as kglab::estimate_measure.
[[nodiscard]] Estimate estimate_measure(TruncationWindow w, const PsiSpec& spec, int n,
                                        std::uint64_t samples, std::uint64_t seed);

}  // namespace kglab::reference
