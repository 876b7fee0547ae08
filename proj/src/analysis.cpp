#include "kglab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kglab {

double dickinson_dimension(const DickinsonParams& p)
{
    if (p.m < 1 || p.n < 1)
        throw std::invalid_argument("Dickinson dimension needs m, n >= 1");
    if (!(p.tau > 0.0) || !std::isfinite(p.tau))
        throw std::invalid_argument("Dickinson dimension needs tau > 0");
    const double m = p.m;
    const double n = p.n;
    if (p.tau > m / n - 1.0)
        return (m - 1.0) * n + m / (p.tau + 1.0);
    return m * n;
}

Branch predict_branch(int n, const PsiSpec& spec)
{
    switch (classify_critical_sum(n, spec)) {
    case SeriesClass::Converges:
        return Branch::MeasureZero;
    case SeriesClass::Diverges: {
        const auto cert = slow_decrease_scan_reciprocal(spec, n, kBranchScanLimit);
        return cert.verdict == SlowDecreaseVerdict::SlowlyDecreasing ? Branch::FullMeasure
                                                                      : Branch::Undetermined;
    }
    case SeriesClass::Unknown:
        break;
    }
    return Branch::Undetermined;
}

namespace {

void validate_schedule(Branch b, const std::vector<TruncationWindow>& s)
{
    if (s.empty())
        throw std::invalid_argument("theorem experiment needs a non-empty window schedule");
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (b == Branch::MeasureZero && s[i].lo() < s[i - 1].lo())
            throw std::invalid_argument("convergence schedule must have non-decreasing N");
        if (b == Branch::FullMeasure && (s[i].lo() != s[0].lo() || s[i].hi() <= s[i - 1].hi()))
            throw std::invalid_argument("divergence schedule must fix N and increase Q");
    }
}

enum class Check { Pass, Soft, Hard };

// excess measured in units of sigma: <= 3 passes, >= 5 is a hard failure.
Check grade(double excess, double sigma)
{
    if (excess <= 3.0 * sigma)
        return Check::Pass;
    return excess >= 5.0 * sigma ? Check::Hard : Check::Soft;
}

}  // namespace

TheoremReport run_theorem_experiment(const TheoremExperiment& exp)
{
    TheoremReport r;
    r.n = exp.n;
    r.psi = to_string(exp.spec);
    r.schedule = exp.schedule;
    r.samples = exp.samples;
    r.seed = exp.seed;
    r.threshold = exp.full_measure_threshold;
    r.predicted = predict_branch(exp.n, exp.spec);
    validate_schedule(r.predicted, exp.schedule);

    for (const auto& w : exp.schedule) {
        r.observed.push_back(estimate_measure(w, exp.spec, exp.n, exp.samples, exp.seed, exp.threads));
        r.union_bounds.push_back(union_bound(w, exp.spec, exp.n));
    }

    if (r.predicted == Branch::Undetermined) {
        r.verdict = Verdict::Inconclusive;
        r.rationale = "no prediction: critical sum class or slow decrease undetermined";
        return r;
    }

    const double floor_sigma = 1.0 / static_cast<double>(exp.samples);
    auto sigma_of = [&](std::size_t i) { return std::max(r.observed[i].std_error, floor_sigma); };
    auto pair_sigma = [&](std::size_t i, std::size_t j) {
        return std::max(std::hypot(r.observed[i].std_error, r.observed[j].std_error), floor_sigma);
    };

    Check worst = Check::Pass;
    std::ostringstream why;
    auto note = [&](Check c, const std::string& msg) {
        if (c == Check::Pass)
            return;
        worst = std::max(worst, c);
        why << (c == Check::Hard ? "[>=5 sigma] " : "[>3 sigma] ") << msg << "; ";
    };

    if (r.predicted == Branch::MeasureZero) {
        for (std::size_t i = 0; i < r.observed.size(); ++i) {
            const double bound = std::min(1.0, r.union_bounds[i]);
            note(grade(r.observed[i].value - bound, sigma_of(i)),
                 "estimate " + std::to_string(i) + " exceeds union bound");
        }
        for (std::size_t i = 1; i < r.observed.size(); ++i)
            note(grade(r.observed[i].value - r.observed[i - 1].value, pair_sigma(i - 1, i)),
                 "estimate rises from window " + std::to_string(i - 1) + " to " + std::to_string(i));
    } else {
        for (std::size_t i = 1; i < r.observed.size(); ++i)
            note(grade(r.observed[i - 1].value - r.observed[i].value, pair_sigma(i - 1, i)),
                 "estimate falls from window " + std::to_string(i - 1) + " to " + std::to_string(i));
        if (r.threshold && r.observed.back().value < *r.threshold)
            note(Check::Soft, "final estimate below threshold");
    }

    switch (worst) {
    case Check::Pass:
        r.verdict = Verdict::Consistent;
        r.rationale = r.predicted == Branch::MeasureZero
                          ? "estimates within union bounds and non-increasing in N"
                          : "estimates non-decreasing in Q" +
                                std::string(r.threshold ? " and final estimate reaches threshold" : "");
        break;
    case Check::Soft:
        r.verdict = Verdict::Inconclusive;
        r.rationale = why.str();
        break;
    case Check::Hard:
        r.verdict = Verdict::Inconsistent;
        r.rationale = why.str();
        break;
    }
    return r;
}

std::string schedule_csv(const TheoremReport& r, bool with_timing)
{
    std::ostringstream os;
    os.precision(17);
    os << "N,Q,value,std_error,union_bound" << (with_timing ? ",elapsed_s" : "") << '\n';
    for (std::size_t i = 0; i < r.observed.size(); ++i) {
        os << r.schedule[i].lo() << ',' << r.schedule[i].hi() << ',' << r.observed[i].value << ','
           << r.observed[i].std_error << ',' << r.union_bounds[i];
        if (with_timing)
            os << ',' << r.observed[i].elapsed;
        os << '\n';
    }
    return os.str();
}

nlohmann::json to_json(const TheoremReport& r, bool with_timing)
{
    nlohmann::json estimates = nlohmann::json::array();
    for (std::size_t i = 0; i < r.observed.size(); ++i) {
        nlohmann::json e = {{"N", r.schedule[i].lo()},
                            {"Q", r.schedule[i].hi()},
                            {"value", r.observed[i].value},
                            {"std_error", r.observed[i].std_error},
                            {"union_bound", r.union_bounds[i]}};
        if (with_timing)
            e["elapsed_s"] = r.observed[i].elapsed;
        estimates.push_back(std::move(e));
    }
    nlohmann::json j = {{"n", r.n},
                        {"psi", r.psi},
                        {"samples", r.samples},
                        {"seed", r.seed},
                        {"predicted_branch", std::string(to_string(r.predicted))},
                        {"verdict", std::string(to_string(r.verdict))},
                        {"rationale", r.rationale},
                        {"estimates", std::move(estimates)},
                        {"schedule_csv", schedule_csv(r, with_timing)}};
    j["threshold"] = r.threshold ? nlohmann::json(*r.threshold) : nlohmann::json(nullptr);
    return j;
}

std::string_view to_string(Branch b) noexcept
{
    switch (b) {
    case Branch::MeasureZero: return "MeasureZero";
    case Branch::FullMeasure: return "FullMeasure";
    case Branch::Undetermined: break;
    }
    return "Undetermined";
}

std::string_view to_string(Verdict v) noexcept
{
    switch (v) {
    case Verdict::Consistent: return "Consistent";
    case Verdict::Inconsistent: return "Inconsistent";
    case Verdict::Inconclusive: break;
    }
    return "Inconclusive";
}

}  // namespace kglab
