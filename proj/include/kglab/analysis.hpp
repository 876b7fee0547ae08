#pragma once

#include "kglab/limsup.hpp"
#include "kglab/psi.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kglab {

/// m linear forms in n variables with psi(k) = k^-tau.
struct DickinsonParams {
    int m;
    int n;
    double tau;
};

/// Hausdorff dimension of the absolute-value limsup set for m forms:
///   (m-1) n + m / (tau + 1)   if tau > m/n - 1
///   m n                       if 0 < tau <= m/n - 1
/// Throws std::invalid_argument unless m, n >= 1 and tau > 0.
[[nodiscard]] double dickinson_dimension(const DickinsonParams& p);

enum class Branch { MeasureZero, FullMeasure, Undetermined };
enum class Verdict { Consistent, Inconsistent, Inconclusive };

/// Height range scanned for the slow-decrease certificate in predict_branch.
inline constexpr std::int64_t kBranchScanLimit = 10000;

/// MeasureZero iff the critical sum converges; FullMeasure iff it diverges and
/// psi is slowly decreasing at c = 1/n; Undetermined otherwise.
[[nodiscard]] Branch predict_branch(int n, const PsiSpec& spec);

struct TheoremExperiment {
    int n = 2;
    PsiSpec spec;
    std::vector<TruncationWindow> schedule;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    int threads = 0;
    /// FullMeasure runs are Consistent only if the last estimate reaches this.
    std::optional<double> full_measure_threshold;
};

struct TheoremReport {
    int n = 2;
    std::string psi;
    std::vector<TruncationWindow> schedule;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::optional<double> threshold;
    Branch predicted = Branch::Undetermined;
    std::vector<Estimate> observed;
    std::vector<double> union_bounds;
    Verdict verdict = Verdict::Inconclusive;
    std::string rationale;
};

/// Runs estimate_measure along the schedule and judges the observed trend.
///
/// MeasureZero: windows must have non-decreasing N. Every estimate must stay
/// below min(1, union bound) and successive estimates may not rise, each
/// within a 3 sigma band. FullMeasure: windows share N and increase in Q;
/// successive estimates may not fall by more than 3 sigma and the last one
/// must reach the threshold, if any. A breach by 5 sigma or more gives
/// Inconsistent; any other failure gives Inconclusive. Undetermined
/// predictions are always Inconclusive. Sigma for a pair of estimates is
/// sqrt(s1^2 + s2^2), floored at 1/samples.
[[nodiscard]] TheoremReport run_theorem_experiment(const TheoremExperiment& exp);

/// JSON form of the report; the schedule is also embedded as CSV text under
/// "schedule_csv". Wall-clock times are included only when `with_timing`.
[[nodiscard]] nlohmann::json to_json(const TheoremReport& r, bool with_timing = false);
[[nodiscard]] std::string schedule_csv(const TheoremReport& r, bool with_timing = false);

[[nodiscard]] std::string_view to_string(Branch b) noexcept;
[[nodiscard]] std::string_view to_string(Verdict v) noexcept;

}  // namespace kglab
