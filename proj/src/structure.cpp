#include "kglab/structure.hpp"

#include "kglab/numeric.hpp"
#include "kglab/sampling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace kglab {

FaceIndex::FaceIndex(int j, int n) : j_(j)
{
    if (j < 1 || j > n)
        throw std::invalid_argument("face index must lie in [1, " + std::to_string(n) + "], got " +
                                    std::to_string(j));
}

double nearest_int_distance(double y) noexcept
{
    return std::fabs(y - std::nearbyint(y));
}

std::optional<LatticeVector> classical_membership(std::span<const double> x_hat, TruncationWindow w,
                                                  const PsiSpec& spec, double scale)
{
    if (!(scale >= 1.0))
        throw std::invalid_argument("classical membership needs scale >= 1");
    const int m = static_cast<int>(x_hat.size());
    require_unit_point(x_hat, m);
    if (m < 1)
        throw std::domain_error("face point needs at least one coordinate");
    for (std::int64_t k = w.lo(); k <= w.hi(); ++k) {
        const double bound = eval_psi(spec, k) / scale;
        ShellCursor cursor(m, k, ShellHalf::Canonical);
        while (cursor.next()) {
            const auto q = cursor.current();
            if (nearest_int_distance(compensated_dot(q, x_hat)) < bound)
                return LatticeVector({q.begin(), q.end()});
        }
    }
    return std::nullopt;
}

LiftResult lift_witness(const LiftInput& input, const PsiSpec& spec, int n)
{
    if (n < 2)
        throw std::invalid_argument("lift needs n >= 2");
    if (static_cast<int>(input.x_hat.size()) != n - 1 || input.q_hat.dim() != n - 1)
        throw std::invalid_argument("lift needs x_hat and q_hat of dimension n-1 = " +
                                    std::to_string(n - 1));
    require_unit_point(input.x_hat, n - 1);
    if (!(input.C > 1.0) || !std::isfinite(input.C))
        throw std::invalid_argument("lift needs a slow-decrease constant C > 1");

    const double inner = compensated_dot(input.q_hat.coords(), input.x_hat);
    const double psi_hat = eval_psi(spec, input.q_hat.height());
    if (!(nearest_int_distance(inner) < psi_hat / input.C))
        throw std::invalid_argument("lift precondition ||q_hat . x_hat|| < psi(|q_hat|)/C fails for q_hat=" +
                                    to_string(input.q_hat));

    std::vector<std::int64_t> coords(input.q_hat.coords().begin(), input.q_hat.coords().end());
    const auto qn = -static_cast<std::int64_t>(std::llround(inner));
    coords.push_back(qn);
    LatticeVector q(std::move(coords));

    std::vector<double> x(input.x_hat);
    x.push_back(1.0);
    const double residual = std::fabs(compensated_dot(q.coords(), x));
    const double psi_q = eval_psi(spec, q.height());

    const auto abs_qn = qn < 0 ? -qn : qn;
    const bool tall = abs_qn > input.q_hat.height();
    std::optional<int> index_j;
    if (tall) {
        // Slow decrease at the lifted height: psi(ceil(|q|/n)) <= C psi(|q|).
        const std::int64_t contracted = (q.height() + n - 1) / n;
        if (!(eval_psi(spec, contracted) <= input.C * psi_q))
            throw std::invalid_argument("C does not certify psi(ceil(k/n)) <= C psi(k) at k=" +
                                        std::to_string(q.height()));
        for (int j = 0; j < n - 1; ++j) {
            const auto v = q[static_cast<std::size_t>(j)];
            if ((v < 0 ? -v : v) * n > q.height()) {
                index_j = j + 1;
                break;
            }
        }
        if (!index_j)
            throw ContractViolation("tall lift " + to_string(q) +
                                    " has no coordinate j < n with |q_j| > |q|/n");
    }
    if (!(residual < psi_q))
        throw ContractViolation("lifted vector " + to_string(q) + " misses: |q.x| = " +
                                std::to_string(residual) + " >= psi(|q|) = " + std::to_string(psi_q));

    return {std::move(q), residual, psi_q, tall ? LiftCase::TallLast : LiftCase::EqualHeight, index_j};
}

LiftResult lift_witness_on_face(const LiftInput& input, const PsiSpec& spec, int n, FaceIndex face)
{
    auto r = lift_witness(input, spec, n);
    const int j = face.value() - 1;
    std::vector<std::int64_t> coords(r.q.coords().begin(), r.q.coords().end());
    std::rotate(coords.begin() + j, coords.end() - 1, coords.end());
    r.q = LatticeVector(std::move(coords));
    return r;
}

double lift_constant(const PsiSpec& spec, int n, std::int64_t k_max)
{
    const auto cert = slow_decrease_scan_reciprocal(spec, n, std::max<std::int64_t>(k_max, 2));
    if (cert.verdict == SlowDecreaseVerdict::NotSlowlyDecreasing)
        throw std::invalid_argument("psi " + to_string(spec) +
                                    " is not slowly decreasing at c = 1/" + std::to_string(n));
    return std::max(cert.empirical_K, 1.0) * (1.0 + 1e-9);
}

FaceIndex pyramid_of(std::span<const double> x)
{
    const int n = static_cast<int>(x.size());
    require_unit_point(x, n);
    if (n < 1)
        throw std::domain_error("pyramid_of needs a nonempty point");
    const auto it = std::max_element(x.begin(), x.end());
    return FaceIndex(static_cast<int>(it - x.begin()) + 1, n);
}

bool check_scaling(std::span<const double> x, const LatticeVector& q, double t, const PsiSpec& spec)
{
    if (q.dim() != static_cast<int>(x.size()))
        throw std::invalid_argument("check_scaling: dimension mismatch");
    if (!(t >= 0.0 && t <= 1.0))
        throw std::invalid_argument("check_scaling needs t in [0,1]");
    const double psi = eval_psi(spec, q.height());
    if (!(std::fabs(compensated_dot(q.coords(), x)) < psi))
        throw std::invalid_argument("check_scaling: " + to_string(q) + " does not witness x");
    std::vector<double> tx(x.begin(), x.end());
    for (auto& v : tx)
        v *= t;
    return std::fabs(compensated_dot(q.coords(), tx)) < psi;
}

std::vector<Estimate> estimate_pyramid_measures(TruncationWindow w, const PsiSpec& spec, int n,
                                                std::uint64_t samples, std::uint64_t seed,
                                                int threads)
{
    if (samples == 0)
        throw std::invalid_argument("pyramid measure needs samples >= 1");
    const auto start = std::chrono::steady_clock::now();
    const WindowScanner scanner(w, spec, n);
    const auto hits = count_buckets(samples, seed, n, threads, static_cast<std::size_t>(n),
                                    [&](std::span<const double> x) -> int {
                                        if (!scanner.contains(x))
                                            return -1;
                                        const auto it = std::max_element(x.begin(), x.end());
                                        return static_cast<int>(it - x.begin());
                                    });
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    std::vector<Estimate> out;
    for (const auto h : hits)
        out.push_back(Estimate::from_hits(h, samples, seed, dt.count()));
    return out;
}

std::string_view to_string(LiftCase c) noexcept
{
    return c == LiftCase::TallLast ? "tall-q_n" : "equal-height";
}

}  // namespace kglab
