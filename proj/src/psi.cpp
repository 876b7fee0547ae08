#include "kglab/psi.hpp"

#include "kglab/numeric.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace kglab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

void require_positive(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string(what) + " must be a positive finite real");
}

// psi(a) / psi(b), evaluated in closed form where one exists.
double psi_ratio(const PsiSpec& spec, std::int64_t a, std::int64_t b)
{
    const double ad = static_cast<double>(a);
    const double bd = static_cast<double>(b);
    return std::visit(
        Overloaded{
            [&](const PowerLaw& f) { return std::pow(bd / ad, f.tau); },
            [&](const LogPowerLaw& f) {
                return std::pow(bd / ad, f.s) *
                       std::pow(std::log1p(bd) / std::log1p(ad), f.p);
            },
            [&](const TabulatedPsi&) { return eval_psi(spec, a) / eval_psi(spec, b); },
        },
        spec.family());
}

// Exact ceil(c * k) for a double c, using the fma residual of the product.
std::int64_t exact_ceil_product(double c, std::int64_t k)
{
    const double kd = static_cast<double>(k);
    const double p = c * kd;
    const double err = std::fma(c, kd, -p);
    const double up = std::ceil(p);
    if (up == p && err > 0.0)
        return static_cast<std::int64_t>(up) + 1;
    return static_cast<std::int64_t>(up);
}

template <class Contract>
SlowDecreaseCertificate scan_impl(const PsiSpec& spec, double c, std::int64_t k_max,
                                  double growth_threshold, Contract contract,
                                  std::optional<double> analytic)
{
    if (k_max < 2)
        throw std::invalid_argument("slow-decrease scan needs k_max >= 2");
    if (!(growth_threshold > 1.0))
        throw std::invalid_argument("growth threshold must exceed 1");
    if (const auto lim = spec.domain_limit())
        k_max = std::min(k_max, *lim);

    SlowDecreaseCertificate cert;
    cert.c = c;
    cert.k_scanned = k_max;
    cert.analytic_K = analytic;

    const std::int64_t half = k_max / 2;
    double first_half_max = 1.0;
    double second_half_max = 1.0;
    for (std::int64_t k = 1; k <= k_max; ++k) {
        const std::int64_t j = std::max<std::int64_t>(1, contract(k));
        const double r = psi_ratio(spec, j, k);
        if (k <= half)
            first_half_max = std::max(first_half_max, r);
        else
            second_half_max = std::max(second_half_max, r);
    }
    cert.empirical_K = std::max(first_half_max, second_half_max);

    if (analytic)
        cert.verdict = SlowDecreaseVerdict::SlowlyDecreasing;
    else if (k_max >= 4 && second_half_max >= growth_threshold * first_half_max)
        cert.verdict = SlowDecreaseVerdict::NotSlowlyDecreasing;
    else
        cert.verdict = SlowDecreaseVerdict::Inconclusive;
    return cert;
}

// Closed-form sup_k psi(c k) / psi(k) for the parametric families (p >= 0).
// ln(1+k)/ln(1+ck) decreases in k, so the log factor peaks at k = 1.
std::optional<double> analytic_constant(const PsiSpec& spec, double c)
{
    return std::visit(
        Overloaded{
            [&](const PowerLaw& f) -> std::optional<double> { return std::pow(c, -f.tau); },
            [&](const LogPowerLaw& f) -> std::optional<double> {
                if (f.p < 0.0)
                    return std::nullopt;
                return std::pow(c, -f.s) * std::pow(std::log(2.0) / std::log1p(c), f.p);
            },
            [](const TabulatedPsi&) -> std::optional<double> { return std::nullopt; },
        },
        spec.family());
}

double parse_real(std::string_view text, std::string_view what)
{
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw std::invalid_argument("psi: cannot parse " + std::string(what) + " from '" +
                                    std::string(text) + "'");
    return v;
}

std::map<std::string, double, std::less<>> parse_params(std::string_view body)
{
    std::map<std::string, double, std::less<>> out;
    while (!body.empty()) {
        const auto comma = body.find(',');
        const auto item = body.substr(0, comma);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("psi: expected key=value, got '" + std::string(item) + "'");
        const auto key = item.substr(0, eq);
        out[std::string(key)] = parse_real(item.substr(eq + 1), key);
        if (comma == std::string_view::npos)
            break;
        body.remove_prefix(comma + 1);
    }
    return out;
}

double take(std::map<std::string, double, std::less<>>& params, std::string_view key)
{
    auto it = params.find(key);
    if (it == params.end())
        throw std::invalid_argument("psi: missing parameter '" + std::string(key) + "'");
    const double v = it->second;
    params.erase(it);
    return v;
}

void reject_extra(const std::map<std::string, double, std::less<>>& params)
{
    if (!params.empty())
        throw std::invalid_argument("psi: unknown parameter '" + params.begin()->first + "'");
}

std::string format_real(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

PsiSpec PsiSpec::power(double scale, double tau)
{
    require_positive(scale, "psi scale c");
    require_positive(tau, "psi exponent tau");
    return PsiSpec(PowerLaw{scale, tau});
}

PsiSpec PsiSpec::log_power(double scale, double s, double p)
{
    require_positive(scale, "psi scale c");
    require_positive(s, "psi exponent s");
    if (!std::isfinite(p))
        throw std::invalid_argument("psi log exponent p must be finite");
    return PsiSpec(LogPowerLaw{scale, s, p});
}

PsiSpec PsiSpec::tabulated(std::vector<double> values, std::string source)
{
    if (values.empty())
        throw std::invalid_argument("tabulated psi needs at least one value");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0) || !std::isfinite(values[i]))
            throw std::invalid_argument("tabulated psi value at k=" + std::to_string(i + 1) +
                                        " is not a positive finite real");
        if (i > 0 && values[i] > values[i - 1])
            throw std::invalid_argument("tabulated psi increases at k=" + std::to_string(i + 1));
    }
    return PsiSpec(TabulatedPsi{std::move(values), std::move(source)});
}

std::optional<std::int64_t> PsiSpec::domain_limit() const noexcept
{
    if (const auto* t = std::get_if<TabulatedPsi>(&family_))
        return static_cast<std::int64_t>(t->values.size());
    return std::nullopt;
}

bool PsiSpec::is_monotone() const noexcept
{
    if (const auto* f = std::get_if<LogPowerLaw>(&family_))
        return f->p >= 0.0;
    return true;
}

PsiSpec PsiSpec::scaled(double factor) const
{
    require_positive(factor, "scaling factor");
    return std::visit(
        Overloaded{
            [&](const PowerLaw& f) { return power(f.scale * factor, f.tau); },
            [&](const LogPowerLaw& f) { return log_power(f.scale * factor, f.s, f.p); },
            [&](const TabulatedPsi& f) {
                auto v = f.values;
                for (auto& x : v)
                    x *= factor;
                return tabulated(std::move(v), f.source + "*" + format_real(factor));
            },
        },
        family_);
}

double eval_psi(const PsiSpec& spec, std::int64_t k)
{
    if (k < 1)
        throw std::domain_error("psi is defined for k >= 1, got k=" + std::to_string(k));
    const double kd = static_cast<double>(k);
    return std::visit(
        Overloaded{
            [&](const PowerLaw& f) { return f.scale * std::pow(kd, -f.tau); },
            [&](const LogPowerLaw& f) {
                return f.scale / (std::pow(kd, f.s) * std::pow(std::log1p(kd), f.p));
            },
            [&](const TabulatedPsi& f) {
                if (k > static_cast<std::int64_t>(f.values.size()))
                    throw std::domain_error("psi table has " + std::to_string(f.values.size()) +
                                            " entries, requested k=" + std::to_string(k));
                return f.values[static_cast<std::size_t>(k - 1)];
            },
        },
        spec.family());
}

PsiTable::PsiTable(const PsiSpec& spec, std::int64_t k_max)
{
    if (k_max < 1)
        throw std::domain_error("psi table needs k_max >= 1");
    values_.resize(static_cast<std::size_t>(k_max) + 1, 0.0);
    for (std::int64_t k = 1; k <= k_max; ++k)
        values_[static_cast<std::size_t>(k)] = eval_psi(spec, k);
}

double PsiTable::max_over(std::int64_t lo, std::int64_t hi) const noexcept
{
    lo = std::max<std::int64_t>(lo, 1);
    hi = std::min(hi, k_max());
    double m = 0.0;
    for (std::int64_t k = lo; k <= hi; ++k)
        m = std::max(m, values_[static_cast<std::size_t>(k)]);
    return m;
}

SlowDecreaseCertificate slow_decrease_scan(const PsiSpec& spec, double c, std::int64_t k_max,
                                           double growth_threshold)
{
    if (!(c > 0.0 && c < 1.0))
        throw std::invalid_argument("slow-decrease scan needs c in (0,1)");
    const auto analytic = spec.is_monotone() ? analytic_constant(spec, c) : std::nullopt;
    return scan_impl(
        spec, c, k_max, growth_threshold,
        [c](std::int64_t k) { return exact_ceil_product(c, k); }, analytic);
}

SlowDecreaseCertificate slow_decrease_scan_reciprocal(const PsiSpec& spec, int divisor,
                                                      std::int64_t k_max,
                                                      double growth_threshold)
{
    if (divisor < 2)
        throw std::invalid_argument("reciprocal slow-decrease scan needs divisor >= 2");
    const double c = 1.0 / divisor;
    std::optional<double> analytic;
    if (spec.is_monotone()) {
        if (const auto* f = std::get_if<PowerLaw>(&spec.family()))
            analytic = std::pow(static_cast<double>(divisor), f->tau);
        else if (const auto* g = std::get_if<LogPowerLaw>(&spec.family()))
            analytic = std::pow(static_cast<double>(divisor), g->s) *
                       std::pow(std::log(2.0) / std::log1p(c), g->p);
    }
    const std::int64_t d = divisor;
    return scan_impl(
        spec, c, k_max, growth_threshold, [d](std::int64_t k) { return (k + d - 1) / d; },
        analytic);
}

double critical_partial_sum(int n, const PsiSpec& spec, std::int64_t K)
{
    if (n < 2)
        throw std::invalid_argument("critical sum needs n >= 2");
    if (K < 1)
        throw std::invalid_argument("critical sum needs K >= 1");
    CompensatedSum acc;
    for (std::int64_t k = 1; k <= K; ++k)
        acc += std::pow(static_cast<double>(k), n - 2) * eval_psi(spec, k);
    const double v = acc.value();
    if (!std::isfinite(v))
        throw std::range_error("critical partial sum overflows for n=" + std::to_string(n) +
                               ", K=" + std::to_string(K));
    return v;
}

SeriesClass classify_critical_sum(int n, const PsiSpec& spec)
{
    if (n < 2)
        throw std::invalid_argument("critical sum needs n >= 2");
    const double edge = n - 1;
    return std::visit(
        Overloaded{
            [&](const PowerLaw& f) {
                return f.tau > edge ? SeriesClass::Converges : SeriesClass::Diverges;
            },
            [&](const LogPowerLaw& f) {
                if (f.s > edge || (f.s == edge && f.p > 1.0))
                    return SeriesClass::Converges;
                return SeriesClass::Diverges;
            },
            [](const TabulatedPsi&) { return SeriesClass::Unknown; },
        },
        spec.family());
}

PsiSpec parse_psi(std::string_view text)
{
    const auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw std::invalid_argument("psi: expected '<family>:<params>', got '" + std::string(text) +
                                    "'");
    const auto family = text.substr(0, colon);
    const auto body = text.substr(colon + 1);

    if (family == "pow") {
        auto params = parse_params(body);
        const double c = take(params, "c");
        const double tau = take(params, "tau");
        reject_extra(params);
        return PsiSpec::power(c, tau);
    }
    if (family == "logpow") {
        auto params = parse_params(body);
        const double c = take(params, "c");
        const double s = take(params, "s");
        const double p = take(params, "p");
        reject_extra(params);
        return PsiSpec::log_power(c, s, p);
    }
    if (family == "table") {
        const std::string path(body);
        std::ifstream in(path);
        if (!in)
            throw std::invalid_argument("psi: cannot open table file '" + path + "'");
        std::vector<double> values;
        std::string line;
        while (std::getline(in, line)) {
            const auto b = line.find_first_not_of(" \t\r");
            if (b == std::string::npos)
                continue;
            const auto e = line.find_last_not_of(" \t\r");
            values.push_back(parse_real(std::string_view(line).substr(b, e - b + 1), "table value"));
        }
        return PsiSpec::tabulated(std::move(values), path);
    }
    throw std::invalid_argument("psi: unknown family '" + std::string(family) + "'");
}

std::string to_string(const PsiSpec& spec)
{
    return std::visit(
        Overloaded{
            [](const PowerLaw& f) {
                return "pow:c=" + format_real(f.scale) + ",tau=" + format_real(f.tau);
            },
            [](const LogPowerLaw& f) {
                return "logpow:c=" + format_real(f.scale) + ",s=" + format_real(f.s) +
                       ",p=" + format_real(f.p);
            },
            [](const TabulatedPsi& f) { return "table:" + f.source; },
        },
        spec.family());
}

std::string_view to_string(SeriesClass c) noexcept
{
    switch (c) {
    case SeriesClass::Converges: return "Converges";
    case SeriesClass::Diverges: return "Diverges";
    case SeriesClass::Unknown: break;
    }
    return "Unknown";
}

std::string_view to_string(SlowDecreaseVerdict v) noexcept
{
    switch (v) {
    case SlowDecreaseVerdict::SlowlyDecreasing: return "SlowlyDecreasing";
    case SlowDecreaseVerdict::NotSlowlyDecreasing: return "NotSlowlyDecreasing";
    case SlowDecreaseVerdict::Inconclusive: break;
    }
    return "Inconclusive";
}

}  // namespace kglab
