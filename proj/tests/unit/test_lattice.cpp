#include "kglab/lattice.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace kglab;

namespace {

using Vec = std::vector<std::int64_t>;

// Every vector of [-k,k]^n with sup norm k and positive first nonzero entry.
std::set<Vec> brute_canonical(int n, std::int64_t k)
{
    std::set<Vec> out;
    Vec q(n, -k);
    while (true) {
        if (sup_norm(q) == k) {
            const auto nz = std::find_if(q.begin(), q.end(), [](auto v) { return v != 0; });
            if (*nz > 0)
                out.insert(q);
        }
        int i = n - 1;
        while (i >= 0 && q[i] == k)
            q[i--] = -k;
        if (i < 0)
            break;
        ++q[i];
    }
    return out;
}

std::set<Vec> collect(int n, std::int64_t k)
{
    std::set<Vec> out;
    for (auto&& q : shell_iter(n, k))
        out.emplace(q.coords().begin(), q.coords().end());
    return out;
}

}  // namespace

TEST(LatticeVector, Basics)
{
    const LatticeVector q({3, -7, 2});
    EXPECT_EQ(q.height(), 7);
    EXPECT_EQ(q.dim(), 3);
    EXPECT_TRUE(q.is_canonical());
    EXPECT_FALSE(q.negated().is_canonical());
    EXPECT_EQ(q.negated().canonical(), q);
    EXPECT_EQ(to_string(q), "(3,-7,2)");
    EXPECT_THROW(LatticeVector({0, 0}), std::invalid_argument);
    EXPECT_THROW(LatticeVector(Vec{}), std::invalid_argument);
}

TEST(ShellCount, Examples)
{
    EXPECT_EQ(shell_count(2, 1), WideCount(8));
    EXPECT_EQ(shell_count(2, 3), WideCount(24));
    EXPECT_EQ(shell_count(3, 2), WideCount(98));
    EXPECT_EQ(shell_count(1, 5), WideCount(2));
}

TEST(ShellCount, WideAndOverflow)
{
    // (2k+1)^n does not fit in 64 bits here but the difference is exact.
    const auto c = shell_count(4, 1000000);
    const WideCount a = WideCount(2000001) * 2000001 * 2000001 * 2000001;
    const WideCount b = WideCount(1999999) * 1999999 * 1999999 * 1999999;
    EXPECT_EQ(c, a - b);
    EXPECT_THROW((void)shell_count(60, 1000), std::range_error);
    EXPECT_THROW((void)shell_count(2, 0), std::invalid_argument);
    EXPECT_EQ(to_string(WideCount(1) << 100), "1267650600228229401496703205376");
}

TEST(ShellIter, ExampleOrder)
{
    std::vector<Vec> got;
    for (auto&& q : shell_iter(2, 1))
        got.emplace_back(q.coords().begin(), q.coords().end());
    const std::vector<Vec> want{{1, -1}, {1, 0}, {1, 1}, {0, 1}};
    EXPECT_EQ(got, want);
}

TEST(ShellIter, SmallSizes)
{
    EXPECT_EQ(collect(2, 2).size(), 8u);
    EXPECT_EQ(collect(3, 1).size(), 13u);
}

TEST(ShellIter, MatchesBruteForce)
{
    for (int n = 2; n <= 4; ++n)
        for (std::int64_t k = 1; k <= (n == 4 ? 6 : 12); ++k) {
            const auto got = collect(n, k);
            EXPECT_EQ(got, brute_canonical(n, k)) << "n=" << n << " k=" << k;
            EXPECT_EQ(2 * WideCount(got.size()), shell_count(n, k));
        }
}

TEST(ShellIter, EveryVectorHasHeightAndSign)
{
    std::size_t seen = 0;
    for (auto&& q : shell_iter(3, 5)) {
        EXPECT_EQ(q.height(), 5);
        EXPECT_TRUE(q.is_canonical());
        ++seen;
    }
    EXPECT_EQ(seen, 602u / 2);
}

TEST(ShellCursor, FullHalfHasBothSigns)
{
    std::set<Vec> full;
    ShellCursor c(3, 2, ShellHalf::Full);
    while (c.next()) {
        const auto q = c.current();
        EXPECT_TRUE(full.emplace(q.begin(), q.end()).second);
        EXPECT_EQ(c.face(), shell_face(q));
    }
    EXPECT_EQ(WideCount(full.size()), shell_count(3, 2));
    for (const auto& q : full) {
        Vec neg(q);
        for (auto& v : neg)
            v = -v;
        EXPECT_TRUE(full.count(neg));
    }
}

TEST(ShellCursor, ResetReuses)
{
    ShellCursor c(2, 1);
    while (c.next()) {
    }
    c.reset(3);
    std::size_t count = 0;
    while (c.next())
        ++count;
    EXPECT_EQ(count, 12u);
}

TEST(ShellOrder, AgreesWithIteration)
{
    for (int n = 2; n <= 4; ++n) {
        std::vector<Vec> seq;
        for (std::int64_t k = 1; k <= 4; ++k)
            for (auto&& q : shell_iter(n, k))
                seq.emplace_back(q.coords().begin(), q.coords().end());
        for (std::size_t i = 1; i < seq.size(); ++i) {
            EXPECT_TRUE(shell_order_less(seq[i - 1], seq[i]));
            EXPECT_FALSE(shell_order_less(seq[i], seq[i - 1]));
        }
    }
}

TEST(ShellVectors, Helper)
{
    EXPECT_EQ(shell_vectors(2, 3).size(), 12u);
}
