#pragma once

#include "kglab/lattice.hpp"
#include "kglab/psi.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kglab {

/// Height range [lo, hi] of the truncated union
///   V_{lo,hi}(psi) = union over lo <= |q| <= hi of B_{psi(|q|)}(q).
class TruncationWindow {
public:
    /// Throws std::invalid_argument unless 1 <= lo <= hi.
    TruncationWindow(std::int64_t lo, std::int64_t hi);

    [[nodiscard]] std::int64_t lo() const noexcept { return lo_; }
    [[nodiscard]] std::int64_t hi() const noexcept { return hi_; }

    friend bool operator==(const TruncationWindow&, const TruncationWindow&) = default;

private:
    std::int64_t lo_;
    std::int64_t hi_;
};

/// Binomial Monte-Carlo estimate.
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    double elapsed = 0.0;  // seconds

    [[nodiscard]] static Estimate from_hits(std::uint64_t hits, std::uint64_t samples,
                                            std::uint64_t seed, double elapsed = 0.0);
};

/// Outcome of a full solution count at one point.
struct SolutionCount {
    std::uint64_t count = 0;       // all q != 0, both signs
    std::uint64_t exact_zeros = 0; // q with q.x == 0 exactly
};

/// Membership kernel for one (window, psi, n).
///
/// For a point x it picks the coordinate of largest magnitude as pivot, walks
/// the remaining n-1 coordinates shell by shell in increasing sup norm, and
/// solves |s + q_p x_p| < psi for the pivot coordinate q_p directly. Every
/// candidate is then confirmed with the compensated dot product used by
/// slab_contains. Work per point is O(Q^(n-1)) instead of O(Q^n).
///
/// Instances are immutable after construction and may be shared by threads.
class WindowScanner {
public:
    WindowScanner(TruncationWindow window, const PsiSpec& spec, int n);

    /// Witness of smallest height, first in canonical shell order, or nullopt.
    [[nodiscard]] std::optional<LatticeVector> witness(std::span<const double> x) const;
    [[nodiscard]] bool contains(std::span<const double> x) const;
    /// Counts every q with |q| <= window.hi() (window.lo() is ignored).
    [[nodiscard]] SolutionCount count(std::span<const double> x) const;
    /// As count(), also filling by_height[h] with the number of solutions of height h.
    SolutionCount count_by_height(std::span<const double> x,
                                  std::vector<std::uint64_t>& by_height) const;

    [[nodiscard]] TruncationWindow window() const noexcept { return window_; }
    [[nodiscard]] int dim() const noexcept { return n_; }

private:
    enum class Mode { Exists, Witness, Count };
    template <Mode M, class Sink>
    void scan(std::span<const double> x, std::int64_t lo, Sink& sink) const;

    TruncationWindow window_;
    int n_;
    std::vector<double> psi_;         // psi_[k] for 1 <= k <= hi
    std::vector<double> suffix_max_;  // max psi_[h] over h >= k
};

/// Throws std::domain_error unless x lies in [0,1]^n with n = x.size().
void require_unit_point(std::span<const double> x, int n);

/// Canonical witness q with lo <= |q| <= hi and |q.x| < psi(|q|), taken from
/// the lowest shell that has one.
[[nodiscard]] std::optional<LatticeVector> in_union(std::span<const double> x,
                                                    TruncationWindow w, const PsiSpec& spec);

/// N(x, Q) = #{q in Z^n, q != 0, |q| <= Q : |q.x| < psi(|q|)}, counting q and -q.
[[nodiscard]] std::uint64_t count_solutions(std::span<const double> x, std::int64_t Q,
                                            const PsiSpec& spec);

/// Fraction of `samples` seeded uniform points that lie in the truncated
/// union. `threads` caps OpenMP workers (0 = runtime default) and does not
/// affect the result.
[[nodiscard]] Estimate estimate_measure(TruncationWindow w, const PsiSpec& spec, int n,
                                        std::uint64_t samples, std::uint64_t seed,
                                        int threads = 0);

/// sum_{k=lo}^{hi} shell_count(n,k) * min(1, 2 psi(k) / k).
[[nodiscard]] double union_bound(TruncationWindow w, const PsiSpec& spec, int n);

struct CountingRatioRow {
    std::int64_t Q = 0;
    double min_ratio = 0.0;
    double median_ratio = 0.0;
    std::size_t points_used = 0;
};

struct CountingRatioTable {
    std::vector<CountingRatioRow> rows;
    std::size_t points_excluded = 0;  // degenerate points dropped from every row
    std::optional<std::string> warning;
};

/// N(x,Q) / sum_{k<=Q} k^(n-2) psi(k) over `x_samples` seeded points, for each Q.
///
/// The same points are used for every Q. A point is degenerate, and dropped,
/// when q.x == 0 exactly for some nonzero q with |q| <= max Q.
[[nodiscard]] CountingRatioTable counting_ratio_stats(std::span<const std::int64_t> Q_list,
                                                      const PsiSpec& spec, int n,
                                                      std::uint64_t x_samples, std::uint64_t seed,
                                                      int threads = 0);

/// Same statistics over caller-supplied points.
[[nodiscard]] CountingRatioTable counting_ratio_stats(std::span<const std::int64_t> Q_list,
                                                      const PsiSpec& spec, int n,
                                                      const std::vector<std::vector<double>>& points,
                                                      int threads = 0);

}  // namespace kglab
