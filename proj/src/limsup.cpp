#include "kglab/limsup.hpp"

#include "kglab/numeric.hpp"
#include "kglab/sampling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace kglab {

TruncationWindow::TruncationWindow(std::int64_t lo, std::int64_t hi) : lo_(lo), hi_(hi)
{
    if (lo < 1 || hi < lo)
        throw std::invalid_argument("truncation window needs 1 <= N <= Q, got [" +
                                    std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

Estimate Estimate::from_hits(std::uint64_t hits, std::uint64_t samples, std::uint64_t seed,
                             double elapsed)
{
    Estimate e;
    e.samples = samples;
    e.seed = seed;
    e.elapsed = elapsed;
    e.value = static_cast<double>(hits) / static_cast<double>(samples);
    e.std_error = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(samples));
    return e;
}

void require_unit_point(std::span<const double> x, int n)
{
    if (static_cast<int>(x.size()) != n)
        throw std::domain_error("point has dimension " + std::to_string(x.size()) + ", expected " +
                                std::to_string(n));
    for (const double v : x)
        if (!(v >= 0.0 && v <= 1.0))
            throw std::domain_error("point coordinates must lie in [0,1]");
}

WindowScanner::WindowScanner(TruncationWindow window, const PsiSpec& spec, int n)
    : window_(window), n_(n)
{
    if (n < 2)
        throw std::invalid_argument("truncated union needs n >= 2");
    const auto hi = window.hi();
    const PsiTable table(spec, hi);
    psi_.resize(static_cast<std::size_t>(hi) + 2, 0.0);
    suffix_max_.resize(static_cast<std::size_t>(hi) + 2, 0.0);
    for (std::int64_t k = 1; k <= hi; ++k)
        psi_[static_cast<std::size_t>(k)] = table(k);
    for (std::int64_t k = hi; k >= 1; --k)
        suffix_max_[static_cast<std::size_t>(k)] =
            std::max(psi_[static_cast<std::size_t>(k)], suffix_max_[static_cast<std::size_t>(k) + 1]);
}

namespace {

struct ExistsSink {
    bool found = false;
    bool done(std::int64_t) const noexcept { return found; }
    void hit(std::span<const std::int64_t>, std::int64_t, double) noexcept { found = true; }
};

struct WitnessSink {
    std::vector<std::int64_t> best;
    std::int64_t best_height = 0;
    std::vector<std::int64_t> scratch;

    // Once a witness of height h is known, radii beyond h cannot beat it.
    bool done(std::int64_t r) const noexcept { return !best.empty() && r > best_height; }
    void hit(std::span<const std::int64_t> q, std::int64_t h, double)
    {
        scratch.assign(q.begin(), q.end());
        const auto first = std::find_if(scratch.begin(), scratch.end(),
                                        [](std::int64_t v) { return v != 0; });
        if (first != scratch.end() && *first < 0)
            for (auto& v : scratch)
                v = -v;
        if (best.empty() || shell_order_less(scratch, best)) {
            best = scratch;
            best_height = h;
        }
    }
};

struct CountSink {
    SolutionCount result;
    std::vector<std::uint64_t>* by_height = nullptr;
    bool done(std::int64_t) const noexcept { return false; }
    void hit(std::span<const std::int64_t>, std::int64_t h, double dot) noexcept
    {
        ++result.count;
        if (dot == 0.0)
            ++result.exact_zeros;
        if (by_height)
            ++(*by_height)[static_cast<std::size_t>(h)];
    }
};

}  // namespace

template <WindowScanner::Mode M, class Sink>
void WindowScanner::scan(std::span<const double> x, std::int64_t lo, Sink& sink) const
{
    const std::int64_t hi = window_.hi();
    const int n = n_;
    int pivot = 0;
    for (int i = 1; i < n; ++i)
        if (std::fabs(x[static_cast<std::size_t>(i)]) > std::fabs(x[static_cast<std::size_t>(pivot)]))
            pivot = i;
    const double xp = x[static_cast<std::size_t>(pivot)];
    const double axp = std::fabs(xp);

    std::vector<int> others;
    others.reserve(static_cast<std::size_t>(n - 1));
    for (int i = 0; i < n; ++i)
        if (i != pivot)
            others.push_back(i);

    std::vector<std::int64_t> q(static_cast<std::size_t>(n), 0);
    const int m = n - 1;
    ShellCursor cursor(m, 1, ShellHalf::Full);

    // Tries every pivot value that can satisfy the inequality for the
    // current non-pivot coordinates (already written into q) of radius r.
    auto try_pivot = [&](std::int64_t r, double partial, std::int64_t abs_sum) -> void {
        const double cap = suffix_max_[static_cast<std::size_t>(std::max(r, lo))];
        std::int64_t qlo = -hi;
        std::int64_t qhi = hi;
        if (axp > 0.0) {
            const double a = (-cap - partial) / xp;
            const double b = (cap - partial) / xp;
            const double fl = std::floor(std::min(a, b));
            const double cl = std::ceil(std::max(a, b));
            if (fl > static_cast<double>(hi) || cl < static_cast<double>(-hi))
                return;
            qlo = std::max(qlo, static_cast<std::int64_t>(std::max(fl, static_cast<double>(-hi))));
            qhi = std::min(qhi, static_cast<std::int64_t>(std::min(cl, static_cast<double>(hi))));
        }
        for (std::int64_t qp = qlo; qp <= qhi; ++qp) {
            const std::int64_t aqp = qp < 0 ? -qp : qp;
            const std::int64_t h = std::max(r, aqp);
            if (h < lo || h == 0)
                continue;
            const double delta = psi_[static_cast<std::size_t>(h)];
            const double rough = partial + static_cast<double>(qp) * xp;
            const double margin = 1e-10 * static_cast<double>(1 + abs_sum + aqp);
            if (std::fabs(rough) >= delta + margin)
                continue;
            q[static_cast<std::size_t>(pivot)] = qp;
            const double dot = compensated_dot(q, x);
            if (std::fabs(dot) < delta) {
                sink.hit(q, h, dot);
                if constexpr (M == Mode::Exists)
                    return;
            }
        }
    };

    for (std::int64_t r = 0; r <= hi; ++r) {
        if (sink.done(r))
            return;
        if (r == 0) {
            for (const int o : others)
                q[static_cast<std::size_t>(o)] = 0;
            try_pivot(0, 0.0, 0);
            continue;
        }
        if (m == 1) {
            const int o = others[0];
            const double xo = x[static_cast<std::size_t>(o)];
            for (const std::int64_t v : {-r, r}) {
                q[static_cast<std::size_t>(o)] = v;
                try_pivot(r, static_cast<double>(v) * xo, r);
                if (sink.done(hi + 1) && M == Mode::Exists)
                    return;
            }
            continue;
        }
        cursor.reset(r);
        while (cursor.next()) {
            const auto c = cursor.current();
            double partial = 0.0;
            std::int64_t abs_sum = 0;
            for (int j = 0; j < m; ++j) {
                const auto o = static_cast<std::size_t>(others[static_cast<std::size_t>(j)]);
                q[o] = c[static_cast<std::size_t>(j)];
                partial += static_cast<double>(q[o]) * x[o];
                abs_sum += q[o] < 0 ? -q[o] : q[o];
            }
            try_pivot(r, partial, abs_sum);
            if (sink.done(hi + 1) && M == Mode::Exists)
                return;
        }
    }
}

std::optional<LatticeVector> WindowScanner::witness(std::span<const double> x) const
{
    WitnessSink sink;
    scan<Mode::Witness>(x, window_.lo(), sink);
    if (sink.best.empty())
        return std::nullopt;
    return LatticeVector(std::move(sink.best));
}

bool WindowScanner::contains(std::span<const double> x) const
{
    ExistsSink sink;
    scan<Mode::Exists>(x, window_.lo(), sink);
    return sink.found;
}

SolutionCount WindowScanner::count(std::span<const double> x) const
{
    CountSink sink;
    scan<Mode::Count>(x, 1, sink);
    return sink.result;
}

SolutionCount WindowScanner::count_by_height(std::span<const double> x,
                                             std::vector<std::uint64_t>& by_height) const
{
    by_height.assign(static_cast<std::size_t>(window_.hi()) + 1, 0);
    CountSink sink;
    sink.by_height = &by_height;
    scan<Mode::Count>(x, 1, sink);
    return sink.result;
}

std::optional<LatticeVector> in_union(std::span<const double> x, TruncationWindow w,
                                      const PsiSpec& spec)
{
    const int n = static_cast<int>(x.size());
    require_unit_point(x, n);
    return WindowScanner(w, spec, n).witness(x);
}

std::uint64_t count_solutions(std::span<const double> x, std::int64_t Q, const PsiSpec& spec)
{
    const int n = static_cast<int>(x.size());
    require_unit_point(x, n);
    return WindowScanner(TruncationWindow(1, Q), spec, n).count(x).count;
}

Estimate estimate_measure(TruncationWindow w, const PsiSpec& spec, int n, std::uint64_t samples,
                          std::uint64_t seed, int threads)
{
    if (samples == 0)
        throw std::invalid_argument("estimate_measure needs samples >= 1");
    const auto start = std::chrono::steady_clock::now();
    const WindowScanner scanner(w, spec, n);
    const auto hits = count_hits(samples, seed, n, threads,
                                 [&](std::span<const double> x) { return scanner.contains(x); });
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    return Estimate::from_hits(hits, samples, seed, dt.count());
}

double union_bound(TruncationWindow w, const PsiSpec& spec, int n)
{
    if (n < 2)
        throw std::invalid_argument("union bound needs n >= 2");
    CompensatedSum acc;
    for (std::int64_t k = w.lo(); k <= w.hi(); ++k) {
        const double per_slab = std::min(1.0, 2.0 * eval_psi(spec, k) / static_cast<double>(k));
        acc += static_cast<double>(shell_count(n, k)) * per_slab;
    }
    const double v = acc.value();
    if (!std::isfinite(v))
        throw std::range_error("union bound overflows");
    return v;
}

namespace {

double median_of(std::vector<double> v)
{
    const auto mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2)
        return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

}  // namespace

CountingRatioTable counting_ratio_stats(std::span<const std::int64_t> Q_list, const PsiSpec& spec,
                                        int n, const std::vector<std::vector<double>>& points,
                                        int threads)
{
    if (Q_list.empty())
        throw std::invalid_argument("counting ratio needs at least one Q");
    for (std::size_t i = 0; i < Q_list.size(); ++i)
        if (Q_list[i] < 1 || (i > 0 && Q_list[i] <= Q_list[i - 1]))
            throw std::invalid_argument("Q list must be strictly increasing positive integers");
    for (const auto& x : points)
        require_unit_point(x, n);

    CountingRatioTable table;
    if (classify_critical_sum(n, spec) != SeriesClass::Diverges)
        table.warning = "critical sum is not known to diverge for " + to_string(spec) +
                        "; the counting lower bound need not hold";

    const std::int64_t q_max = Q_list.back();
    const WindowScanner scanner(TruncationWindow(1, q_max), spec, n);

    // counts[i][j] = N(points[i], Q_list[j]); degenerate[i] marks exact zeros.
    const auto npts = static_cast<std::int64_t>(points.size());
    std::vector<std::vector<std::uint64_t>> counts(points.size());
    std::vector<char> degenerate(points.size(), 0);
#ifdef _OPENMP
    const int workers = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
#else
    (void)threads;
#endif
    for (std::int64_t i = 0; i < npts; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        std::vector<std::uint64_t> by_height;
        const auto result = scanner.count_by_height(points[ui], by_height);
        std::vector<std::uint64_t> row;
        row.reserve(Q_list.size());
        std::uint64_t running = 0;
        std::size_t j = 0;
        for (std::int64_t h = 1; h <= q_max && j < Q_list.size(); ++h) {
            running += by_height[static_cast<std::size_t>(h)];
            if (h == Q_list[j]) {
                row.push_back(running);
                ++j;
            }
        }
        counts[ui] = std::move(row);
        degenerate[ui] = result.exact_zeros > 0;
    }

    for (std::size_t j = 0; j < Q_list.size(); ++j) {
        const double denom = critical_partial_sum(n, spec, Q_list[j]);
        std::vector<double> ratios;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (!degenerate[i])
                ratios.push_back(static_cast<double>(counts[i][j]) / denom);
        CountingRatioRow row;
        row.Q = Q_list[j];
        row.points_used = ratios.size();
        if (!ratios.empty()) {
            row.min_ratio = *std::min_element(ratios.begin(), ratios.end());
            row.median_ratio = median_of(std::move(ratios));
        }
        table.rows.push_back(row);
    }
    table.points_excluded = static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 1));
    return table;
}

CountingRatioTable counting_ratio_stats(std::span<const std::int64_t> Q_list, const PsiSpec& spec,
                                        int n, std::uint64_t x_samples, std::uint64_t seed,
                                        int threads)
{
    if (x_samples == 0)
        throw std::invalid_argument("counting ratio needs x_samples >= 1");
    return counting_ratio_stats(Q_list, spec, n, sample_points(seed, x_samples, n), threads);
}

}  // namespace kglab
