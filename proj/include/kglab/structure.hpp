#pragma once

#include "kglab/lattice.hpp"
#include "kglab/limsup.hpp"
#include "kglab/psi.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace kglab {

/// Raised when a guarantee that must follow from validated preconditions
/// fails to hold. Never expected in a correct build.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// 1-based index j of the face F_j = {x_j = 1} and of the pyramid
/// P_j = {x : max_i x_i = x_j} over it.
class FaceIndex {
public:
    FaceIndex(int j, int n);
    [[nodiscard]] int value() const noexcept { return j_; }
    friend bool operator==(FaceIndex, FaceIndex) = default;

private:
    int j_;
};

/// min over integers p of |y - p|.
[[nodiscard]] double nearest_int_distance(double y) noexcept;

/// Canonical q_hat with lo <= |q_hat| <= hi and ||q_hat . x_hat|| < psi(|q_hat|) / scale,
/// first in canonical shell order. Throws std::invalid_argument for scale < 1.
[[nodiscard]] std::optional<LatticeVector> classical_membership(std::span<const double> x_hat,
                                                                TruncationWindow w,
                                                                const PsiSpec& spec, double scale);

/// A face point (x_hat, 1) together with a distance-to-integers witness q_hat
/// and the slow-decrease constant C > 1.
struct LiftInput {
    std::vector<double> x_hat;
    LatticeVector q_hat;
    double C;
};

enum class LiftCase {
    EqualHeight,  ///< |q| = |q_hat|
    TallLast,     ///< |q| = |q_n| > |q_hat|
};

struct LiftResult {
    LatticeVector q;
    double residual;  ///< |q . (x_hat, 1)|
    double psi_at_height;
    LiftCase kind;
    /// For TallLast: smallest 1-based j <= n-1 with |q_j| > |q| / n.
    std::optional<int> index_j;
};

/// Extends q_hat by q_n = -round(q_hat . x_hat) so that |q . (x_hat, 1)| < psi(|q|).
///
/// Throws std::invalid_argument when the input violates ||q_hat . x_hat|| <
/// psi(|q_hat|)/C, when C <= 1, or when psi(ceil(|q|/n)) <= C psi(|q|) fails at
/// the lifted height. Throws ContractViolation if the lifted vector does not
/// witness (x_hat, 1) or, in the tall case, no index j exists.
[[nodiscard]] LiftResult lift_witness(const LiftInput& input, const PsiSpec& spec, int n);

/// The lift placed on face F_j: coordinate j-1 carries q_n and the others
/// carry q_hat in order, matching the point with x_j = 1.
[[nodiscard]] LiftResult lift_witness_on_face(const LiftInput& input, const PsiSpec& spec, int n,
                                              FaceIndex face);

/// Slow-decrease constant at c = 1/n over heights up to k_max, from
/// slow_decrease_scan_reciprocal, raised by a relative 1e-9 so that strict
/// inequalities survive rounding. Throws std::invalid_argument when the scan
/// verdict is NotSlowlyDecreasing.
[[nodiscard]] double lift_constant(const PsiSpec& spec, int n, std::int64_t k_max);

/// Smallest j attaining max_i x_i.
[[nodiscard]] FaceIndex pyramid_of(std::span<const double> x);

/// Whether |q . (t x)| < psi(|q|), given that q witnesses x.
/// Throws std::invalid_argument when q does not witness x or t is outside [0,1].
[[nodiscard]] bool check_scaling(std::span<const double> x, const LatticeVector& q, double t,
                                 const PsiSpec& spec);

/// Monte-Carlo measure of V_{N,Q}(psi) intersected with each pyramid P_1..P_n.
[[nodiscard]] std::vector<Estimate> estimate_pyramid_measures(TruncationWindow w,
                                                              const PsiSpec& spec, int n,
                                                              std::uint64_t samples,
                                                              std::uint64_t seed, int threads = 0);

[[nodiscard]] std::string_view to_string(LiftCase c) noexcept;

}  // namespace kglab
