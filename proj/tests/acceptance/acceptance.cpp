// Acceptance suite: one PASS/FAIL line per criterion. Every randomized
// criterion uses kSeed, fixed before any of them was run.

#include "kglab/analysis.hpp"
#include "kglab/cli.hpp"
#include "kglab/lattice.hpp"
#include "kglab/limsup.hpp"
#include "kglab/numeric.hpp"
#include "kglab/psi.hpp"
#include "kglab/reference.hpp"
#include "kglab/sampling.hpp"
#include "kglab/slab.hpp"
#include "kglab/structure.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace kglab;

namespace {

constexpr std::uint64_t kSeed = 42;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::uint64_t mix(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Order-independent fingerprint of a set of vectors with entries in [-k, k].
struct Fingerprint {
    std::uint64_t count = 0, a = 0, b = 0;
    void add(std::span<const std::int64_t> q, std::int64_t k)
    {
        std::uint64_t code = 0;
        for (const auto v : q)
            code = code * static_cast<std::uint64_t>(2 * k + 1) + static_cast<std::uint64_t>(v + k);
        ++count;
        a += mix(code);
        b += mix(code ^ 0x5555555555555555ULL);
    }
    bool operator==(const Fingerprint&) const = default;
};

// Oracle: lexicographic walk over prefixes in [-k,k]^(n-1); the last entry
// ranges over [-k,k] when the prefix already reaches k, else only +-k.
Fingerprint oracle_shell(int n, std::int64_t k, std::set<std::vector<std::int64_t>>* keep)
{
    Fingerprint fp;
    std::vector<std::int64_t> q(n, -k);
    while (true) {
        std::int64_t pmax = 0;
        for (int i = 0; i + 1 < n; ++i)
            pmax = std::max(pmax, std::abs(q[i]));
        auto emit = [&](std::int64_t last) {
            q[n - 1] = last;
            const auto nz = std::find_if(q.begin(), q.end(), [](auto v) { return v != 0; });
            if (nz == q.end() || *nz < 0)
                return;
            fp.add(q, k);
            if (keep)
                keep->insert(q);
        };
        if (pmax == k) {
            for (std::int64_t v = -k; v <= k; ++v)
                emit(v);
        } else {
            emit(-k);
            emit(k);
        }
        int i = n - 2;
        while (i >= 0 && q[i] == k)
            q[i--] = -k;
        if (i < 0)
            break;
        ++q[i];
    }
    return fp;
}

Outcome shell_identity()
{
    std::uint64_t vectors = 0;
    for (int n = 2; n <= 5; ++n)
        for (std::int64_t k = 1; k <= 30; ++k) {
            const bool small = std::pow(2.0 * k + 1, n) < 2e5;
            std::set<std::vector<std::int64_t>> want_set;
            std::set<std::vector<std::int64_t>> got_set;
            const auto want = oracle_shell(n, k, small ? &want_set : nullptr);
            Fingerprint got;
            ShellCursor cursor(n, k, ShellHalf::Canonical);
            while (cursor.next()) {
                const auto q = cursor.current();
                if (sup_norm(q) != k)
                    return {false, fmt("n=%d k=%lld: vector of wrong height", n, (long long)k)};
                const auto nz = std::find_if(q.begin(), q.end(), [](auto v) { return v != 0; });
                if (*nz <= 0)
                    return {false, fmt("n=%d k=%lld: non-canonical vector", n, (long long)k)};
                got.add(q, k);
                if (small)
                    got_set.emplace(q.begin(), q.end());
            }
            vectors += got.count;
            if (2 * WideCount(got.count) != shell_count(n, k) || !(got == want))
                return {false, fmt("n=%d k=%lld: yielded %llu, shell_count/2 = %s", n, (long long)k,
                                   (unsigned long long)got.count, to_string(shell_count(n, k) / 2).c_str())};
            if (small && (got_set != want_set || got_set.size() != got.count))
                return {false, fmt("n=%d k=%lld: set differs from oracle", n, (long long)k)};
        }
    return {true, fmt("%llu canonical vectors, n=2..5, k<=30", (unsigned long long)vectors)};
}

Outcome slab_geometry()
{
    std::mt19937_64 rng(kSeed);
    std::uniform_int_distribution<std::int64_t> coord(-10, 10);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int outside = 0;
    double worst = 0.0;
    for (int n = 2; n <= 5; ++n)
        for (int i = 0; i < 50; ++i) {
            std::vector<std::int64_t> q(n);
            do {
                for (auto& v : q)
                    v = coord(rng);
            } while (std::all_of(q.begin(), q.end(), [](auto v) { return v == 0; }));
            double l1 = 0;
            for (auto v : q)
                l1 += std::abs(v);
            double delta = 0.0;
            while (delta <= 0.0)
                delta = 0.5 * l1 * unit(rng);
            const Slab s(LatticeVector(q), delta);
            const double exact = slab_volume_exact(s);
            if (!(exact <= slab_volume_bound(s)))
                return {false, fmt("dominance fails for %s delta=%.17g", to_string(s.normal()).c_str(), delta)};

            constexpr int kSamples = 1000000;
            std::mt19937_64 mc(mix(kSeed + 1000 * n + i));
            std::vector<double> x(n);
            int hits = 0;
            for (int j = 0; j < kSamples; ++j) {
                double dot = 0.0;
                for (int d = 0; d < n; ++d)
                    dot += static_cast<double>(q[d]) * std::generate_canonical<double, 53>(mc);
                hits += std::fabs(dot) < delta;
            }
            const double p = double(hits) / kSamples;
            const double se = std::sqrt(std::max(exact * (1 - exact), 1.0 / kSamples) / kSamples);
            const double z = std::fabs(p - exact) / se;
            worst = std::max(worst, z);
            if (z > 3.0)
                ++outside;
        }
    return {outside == 0, fmt("200 slabs, dominance exact; %d outside 3 SE, worst %.2f SE", outside, worst)};
}

Outcome shell_constant()
{
    // E(k)/k^(n-3) = (2 shell_count - 2^(n+1) n k^(n-1)) / k^(n-2), kept as an exact fraction.
    std::string detail;
    for (int n = 2; n <= 4; ++n) {
        auto ratio_ge = [&](std::int64_t k1, std::int64_t k2) {
            // |num(k1)|/k1^(n-2) >= |num(k2)|/k2^(n-2)
            auto num = [&](std::int64_t k) {
                __int128 lead = (__int128(1) << (n + 1)) * n;
                for (int i = 0; i < n - 1; ++i)
                    lead *= k;
                __int128 v = 2 * static_cast<__int128>(shell_count(n, k)) - lead;
                return v < 0 ? -v : v;
            };
            auto pw = [&](std::int64_t k) {
                __int128 p = 1;
                for (int i = 0; i < n - 2; ++i)
                    p *= k;
                return p;
            };
            return num(k1) * pw(k2) >= num(k2) * pw(k1);
        };
        std::int64_t arg_first = 1;
        for (std::int64_t k = 1; k <= 500; ++k)
            if (!ratio_ge(arg_first, k))
                arg_first = k;
        std::int64_t arg_second = 501;
        for (std::int64_t k = 501; k <= 1000; ++k)
            if (!ratio_ge(arg_second, k))
                arg_second = k;
        if (!ratio_ge(arg_first, arg_second))
            return {false, fmt("n=%d: remainder grows (max at k=%lld beyond k<=500)", n, (long long)arg_second)};
        const double first = (2.0 * double(shell_count(n, arg_first)) -
                              std::ldexp(double(n), n + 1) * std::pow(double(arg_first), n - 1)) /
                             std::pow(double(arg_first), n - 2);
        detail += fmt("n=%d sup %.3g; ", n, std::fabs(first));
    }
    return {true, detail + "no growth over k<=1000"};
}

Outcome convergence_branch()
{
    const auto spec = PsiSpec::power(1, 2);
    const std::int64_t Ns[] = {10, 20, 50, 100};
    std::vector<Estimate> e;
    std::string detail;
    bool ok = true;
    for (const auto N : Ns) {
        e.push_back(estimate_measure({N, 2000}, spec, 2, 100000, kSeed));
        const auto& last = e.back();
        detail += fmt("N=%lld %.5f; ", (long long)N, last.value);
        if (last.value > 16.0 / N + 3 * last.std_error) {
            ok = false;
            detail += "above 16/N + 3 sigma; ";
        }
        if (e.size() > 1) {
            const auto& prev = e[e.size() - 2];
            if (last.value > prev.value + 3 * std::hypot(last.std_error, prev.std_error)) {
                ok = false;
                detail += "rises; ";
            }
        }
    }
    return {ok, detail};
}

Outcome divergence_branch()
{
    std::ifstream in(KGLAB_FIXTURE_DIR "/pilot_divergence.json");
    if (!in)
        return {false, "missing pilot fixture"};
    const auto pilot = nlohmann::json::parse(in);
    const double threshold = pilot.at("threshold").get<double>();
    const auto spec = parse_psi(pilot.at("psi").get<std::string>());
    const std::int64_t Qs[] = {50, 200, 1000};
    std::vector<Estimate> e;
    std::string detail;
    bool ok = true;
    for (const auto Q : Qs) {
        e.push_back(estimate_measure({10, Q}, spec, 2, 100000, kSeed));
        detail += fmt("Q=%lld %.5f; ", (long long)Q, e.back().value);
        if (e.size() > 1) {
            const auto& prev = e[e.size() - 2];
            if (e.back().value < prev.value - 3 * std::hypot(e.back().std_error, prev.std_error)) {
                ok = false;
                detail += "falls; ";
            }
        }
    }
    if (!(e.back().value > threshold))
        ok = false;
    return {ok, detail + fmt("pilot threshold %.6f", threshold)};
}

Outcome exact_union()
{
    // Quadrature oracle: midpoint grid over the union of the four height-1 slabs.
    const int g = 2000;
    const std::vector<std::pair<int, int>> qs{{1, -1}, {1, 0}, {1, 1}, {0, 1}};
    std::int64_t inside = 0;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) {
            const double x = (i + 0.5) / g;
            const double y = (j + 0.5) / g;
            bool hit = false;
            for (const auto& [a, b] : qs)
                hit = hit || std::fabs(a * x + b * y) < 0.25;
            inside += hit;
        }
    const double grid = double(inside) / (double(g) * g);
    if (std::fabs(grid - 0.75) > 1e-3)
        return {false, fmt("grid oracle %.6f", grid)};
    const auto e = estimate_measure({1, 1}, PsiSpec::tabulated({0.25}), 2, 1000000, kSeed);
    const bool ok = std::fabs(e.value - 0.75) <= 3 * e.std_error;
    return {ok, fmt("grid %.6f, Monte-Carlo %.6f +- %.6f", grid, e.value, e.std_error)};
}

Outcome witness_lift()
{
    constexpr int kTarget = 10000;
    int lifts = 0;
    int tall = 0;
    std::mt19937_64 rng(kSeed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::tuple<int, PsiSpec, std::int64_t>> configs;
    for (int n = 2; n <= 4; ++n)
        for (const double tau : {0.5, 1.0, 1.5})
            for (const double c : {0.5, 1.0})
                configs.emplace_back(n, PsiSpec::power(c, tau / (n - 1)), n == 2 ? 40 : (n == 3 ? 12 : 6));
    const int per = (kTarget + static_cast<int>(configs.size()) - 1) / static_cast<int>(configs.size());
    for (const auto& [n, spec, Q] : configs) {
        const TruncationWindow w(1, Q);
        const double C = lift_constant(spec, n, n * Q + 1);
        std::vector<double> x(n - 1);
        int got = 0;
        for (int attempt = 0; got < per && attempt < 200 * per; ++attempt) {
            for (auto& v : x)
                v = unit(rng);
            const auto qh = classical_membership(x, w, spec, C);
            if (!qh)
                continue;
            LiftResult r = [&] {
                try {
                    return lift_witness({x, *qh, C}, spec, n);
                } catch (const ContractViolation& e) {
                    throw std::runtime_error(std::string("contract violation: ") + e.what());
                }
            }();
            std::vector<double> full(x);
            full.push_back(1.0);
            if (!(std::fabs(compensated_dot(r.q.coords(), full)) < eval_psi(spec, r.q.height())))
                return {false, "lift misses at " + to_string(r.q)};
            const auto qn = std::abs(r.q[n - 1]);
            if (qn == r.q.height() && qn > qh->height()) {
                ++tall;
                bool found = false;
                for (int j = 0; j < n - 1; ++j)
                    found = found || std::abs(r.q[j]) * n > r.q.height();
                if (!found || !r.index_j)
                    return {false, "tall lift without index j: " + to_string(r.q)};
            }
            ++got;
            ++lifts;
        }
    }
    return {lifts >= kTarget, fmt("%d lifts, %d tall, all witnessed", lifts, tall)};
}

Outcome scaling_closure()
{
    std::mt19937_64 rng(kSeed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int triples = 0;
    std::uint64_t stream = 0;
    while (triples < 10000) {
        const int n = 2 + triples % 3;
        const auto spec = PsiSpec::power(0.25, n - 1.0);
        std::vector<double> x(n);
        for (auto& v : x)
            v = unit(rng);
        ++stream;
        const auto q = in_union(x, {1, n == 2 ? 50 : 10}, spec);
        if (!q)
            continue;
        const double t = triples % 100 == 0 ? 0.0 : (triples % 100 == 1 ? 1.0 : unit(rng));
        if (!check_scaling(x, *q, t, spec))
            return {false, fmt("fails at t=%.17g for %s", t, to_string(*q).c_str())};
        ++triples;
    }
    return {true, fmt("%d triples from %llu points", triples, (unsigned long long)stream)};
}

Outcome counting_bound()
{
    const std::int64_t Qs[] = {100, 300, 1000};
    const auto t = counting_ratio_stats(Qs, PsiSpec::power(0.25, 1), 2, 100, kSeed);
    double lo = INFINITY;
    double hi = 0.0;
    std::string detail;
    for (const auto& r : t.rows) {
        detail += fmt("Q=%lld min %.4f; ", (long long)r.Q, r.min_ratio);
        lo = std::min(lo, r.min_ratio);
        hi = std::max(hi, r.min_ratio);
    }
    const bool ok = lo > 0.0 && hi < 3.0 * lo;
    return {ok, detail + fmt("%zu excluded", t.points_excluded)};
}

Outcome dickinson()
{
    const double a = dickinson_dimension({1, 2, 3.0});
    const double b = dickinson_dimension({3, 2, 0.4});
    const double c = dickinson_dimension({2, 3, 1.0});
    return {a == 0.25 && b == 6.0 && c == 4.0, fmt("%.17g, %.17g, %.17g", a, b, c)};
}

Outcome determinism()
{
    const std::vector<std::vector<std::string>> configs{
        {"measure", "--n", "2", "--psi", "pow:c=0.25,tau=1", "--window", "10,500", "--samples", "100000"},
        {"measure", "--n", "3", "--psi", "pow:c=0.1,tau=2", "--window", "2,20", "--samples", "30000"},
    };
    int runs = 0;
    for (const auto& base : configs) {
        std::string first;
        for (const int threads : {1, 2, 3, 8})
            for (int rep = 0; rep < 2; ++rep) {
                auto args = base;
                args.insert(args.begin(), "kg-lab");
                args.insert(args.end(), {"--seed", std::to_string(kSeed), "--threads", std::to_string(threads)});
                std::ostringstream out;
                std::ostringstream err;
                if (cli::parse_and_dispatch(args, out, err) != 0)
                    return {false, "measure failed: " + err.str()};
                if (first.empty())
                    first = out.str();
                else if (out.str() != first)
                    return {false, fmt("output differs at threads=%d", threads)};
                ++runs;
            }
    }
    // Parallel kernel against the serial reference on the same stream.
    const auto spec = PsiSpec::power(0.25, 1);
    const auto fast = estimate_measure({10, 500}, spec, 2, 50000, kSeed, 4);
    const auto ref = reference::estimate_measure({10, 500}, spec, 2, 50000, kSeed);
    if (fast.value != ref.value)
        return {false, "parallel and serial estimates differ"};
    return {true, fmt("%d runs byte-identical; serial reference agrees", runs)};
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"shell identity", shell_identity},
        {"slab geometry", slab_geometry},
        {"shell leading constant", shell_constant},
        {"convergence branch", convergence_branch},
        {"divergence branch", divergence_branch},
        {"exact union cross-check", exact_union},
        {"witness lift", witness_lift},
        {"scaling closure", scaling_closure},
        {"counting bound proxy", counting_bound},
        {"dimension evaluator", dickinson},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
        std::printf("%s %2zu %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), dt.count());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
