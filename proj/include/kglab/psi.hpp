#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace kglab {

/// psi(k) = scale * k^-tau
struct PowerLaw {
    double scale;
    double tau;
};

/// psi(k) = scale / (k^s * ln(k+1)^p)
struct LogPowerLaw {
    double scale;
    double s;
    double p;
};

/// psi(k) = values[k-1] for 1 <= k <= values.size().
struct TabulatedPsi {
    std::vector<double> values;
    std::string source;  // path or label shown by to_string
};

/// A positive error function psi: N -> (0, inf), restricted to three families.
///
/// Construction validates positivity of every parameter. Tabulated functions
/// must be positive and non-increasing over the table.
class PsiSpec {
public:
    using Family = std::variant<PowerLaw, LogPowerLaw, TabulatedPsi>;

    static PsiSpec power(double scale, double tau);
    static PsiSpec log_power(double scale, double s, double p);
    static PsiSpec tabulated(std::vector<double> values, std::string source = "inline");

    [[nodiscard]] const Family& family() const noexcept { return family_; }

    /// Largest admissible argument, or nullopt for the parametric families.
    [[nodiscard]] std::optional<std::int64_t> domain_limit() const noexcept;

    /// True when psi is known to be non-increasing on its whole domain.
    [[nodiscard]] bool is_monotone() const noexcept;

    /// Returns a copy with every value multiplied by `factor` > 0.
    [[nodiscard]] PsiSpec scaled(double factor) const;

private:
    explicit PsiSpec(Family f) : family_(std::move(f)) {}
    Family family_;
};

/// Throws std::domain_error for k < 1 or k beyond a table.
[[nodiscard]] double eval_psi(const PsiSpec& spec, std::int64_t k);

/// psi sampled on 1..k_max, for kernels that evaluate psi many times.
class PsiTable {
public:
    PsiTable(const PsiSpec& spec, std::int64_t k_max);

    [[nodiscard]] double operator()(std::int64_t k) const noexcept { return values_[k]; }
    [[nodiscard]] std::int64_t k_max() const noexcept
    {
        return static_cast<std::int64_t>(values_.size()) - 1;
    }
    /// max psi(k) over lo <= k <= hi (clamped to the table).
    [[nodiscard]] double max_over(std::int64_t lo, std::int64_t hi) const noexcept;

private:
    std::vector<double> values_;  // values_[0] unused
};

enum class SlowDecreaseVerdict { SlowlyDecreasing, NotSlowlyDecreasing, Inconclusive };

struct SlowDecreaseCertificate {
    double c = 0.0;
    double empirical_K = 1.0;
    std::optional<double> analytic_K;
    SlowDecreaseVerdict verdict = SlowDecreaseVerdict::Inconclusive;
    std::int64_t k_scanned = 0;
};

/// Scans max psi(ceil(c k)) / psi(k) over 1 <= k <= k_max.
///
/// ceil(c k) is taken on the exact product of the double `c` with k. A table
/// shorter than k_max limits the scan. `growth_threshold` controls the
/// NotSlowlyDecreasing detection: the maximal ratio over the second half of
/// the scan must exceed that of the first half by at least this factor.
[[nodiscard]] SlowDecreaseCertificate slow_decrease_scan(const PsiSpec& spec, double c,
                                                         std::int64_t k_max,
                                                         double growth_threshold = 2.0);

/// Same scan for c = 1/divisor, using exact integer ceil(k / divisor).
[[nodiscard]] SlowDecreaseCertificate slow_decrease_scan_reciprocal(const PsiSpec& spec,
                                                                    int divisor,
                                                                    std::int64_t k_max,
                                                                    double growth_threshold = 2.0);

enum class SeriesClass { Converges, Diverges, Unknown };

/// sum_{k=1}^{K} k^(n-2) psi(k), compensated. Throws std::range_error when
/// the sum leaves the finite doubles.
[[nodiscard]] double critical_partial_sum(int n, const PsiSpec& spec, std::int64_t K);

[[nodiscard]] SeriesClass classify_critical_sum(int n, const PsiSpec& spec);

/// Parses `pow:c=<real>,tau=<real>`, `logpow:c=<real>,s=<real>,p=<real>` or
/// `table:<path>` (one positive real per line, k = 1 first).
/// Throws std::invalid_argument on malformed text.
[[nodiscard]] PsiSpec parse_psi(std::string_view text);

[[nodiscard]] std::string to_string(const PsiSpec& spec);
[[nodiscard]] std::string_view to_string(SeriesClass c) noexcept;
[[nodiscard]] std::string_view to_string(SlowDecreaseVerdict v) noexcept;

}  // namespace kglab
