#pragma once

#include "kglab/lattice.hpp"

#include <cstdint>
#include <span>

namespace kglab {

/// B_delta(q) intersected with the unit cube: {x in [0,1]^n : |q.x| < delta}.
class Slab {
public:
    /// Throws std::invalid_argument unless delta is positive and finite.
    Slab(LatticeVector q, double delta);

    [[nodiscard]] const LatticeVector& normal() const noexcept { return q_; }
    [[nodiscard]] double delta() const noexcept { return delta_; }
    [[nodiscard]] int dim() const noexcept { return q_.dim(); }

private:
    LatticeVector q_;
    double delta_;
};

/// Strict |q.x| < delta with a compensated dot product.
/// Throws std::domain_error on dimension mismatch.
[[nodiscard]] bool slab_contains(const Slab& s, std::span<const double> x);

/// min(1, 2 delta / |q|).
[[nodiscard]] double slab_volume_bound(const Slab& s) noexcept;

/// Largest dimension and height accepted by slab_volume_exact.
inline constexpr int kExactVolumeMaxDim = 8;
inline constexpr std::int64_t kExactVolumeMaxHeight = 1000;

/// Exact Lebesgue volume of the slab by cube slicing.
///
/// Zero coordinates are dropped, negative ones are reflected (x_i -> 1 - x_i),
/// and the volume is the difference of the cumulative slicing function
///   F(t) = 1/(m! prod w) * sum_{S} (-1)^|S| max(0, t - sum_S w)^m
/// at the two slab faces. The double-precision sum carries a running error
/// bound; when that bound exceeds kExactVolumeTolerance the value is recomputed
/// in exact rational arithmetic (every double is a dyadic rational).
///
/// Throws std::range_error outside dim <= 8, |q| <= 1000.
[[nodiscard]] double slab_volume_exact(const Slab& s);

inline constexpr double kExactVolumeTolerance = 1e-13;

/// Seeded Monte-Carlo estimate of the slab volume, for callers outside the
/// exact envelope. Returns {value, standard error}.
struct SlabVolumeEstimate {
    double value;
    double std_error;
};
[[nodiscard]] SlabVolumeEstimate slab_volume_monte_carlo(const Slab& s, std::uint64_t samples,
                                                         std::uint64_t seed);

/// Number of coordinates of q whose magnitude equals |q|.
[[nodiscard]] int height_multiplicity(const LatticeVector& q) noexcept;

}  // namespace kglab
