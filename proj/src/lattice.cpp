#include "kglab/lattice.hpp"

#include <algorithm>
#include <stdexcept>

namespace kglab {

std::int64_t sup_norm(std::span<const std::int64_t> q) noexcept
{
    std::int64_t h = 0;
    for (const auto v : q)
        h = std::max(h, v < 0 ? -v : v);
    return h;
}

LatticeVector::LatticeVector(std::vector<std::int64_t> coords)
    : coords_(std::move(coords)), height_(sup_norm(coords_))
{
    if (coords_.empty())
        throw std::invalid_argument("lattice vector needs at least one coordinate");
    if (height_ == 0)
        throw std::invalid_argument("lattice vector must be nonzero");
}

bool LatticeVector::is_canonical() const noexcept
{
    for (const auto v : coords_)
        if (v != 0)
            return v > 0;
    return false;
}

LatticeVector LatticeVector::canonical() const
{
    return is_canonical() ? *this : negated();
}

LatticeVector LatticeVector::negated() const
{
    auto c = coords_;
    for (auto& v : c)
        v = -v;
    return LatticeVector(std::move(c));
}

std::string to_string(const LatticeVector& q)
{
    std::string out = "(";
    for (int i = 0; i < q.dim(); ++i) {
        if (i)
            out += ',';
        out += std::to_string(q[static_cast<std::size_t>(i)]);
    }
    return out + ")";
}

namespace {

WideCount checked_pow(WideCount base, int exp, int n, std::int64_t k)
{
    WideCount r = 1;
    for (int i = 0; i < exp; ++i)
        if (__builtin_mul_overflow(r, base, &r))
            throw std::range_error("shell_count(" + std::to_string(n) + ", " + std::to_string(k) +
                                   ") exceeds 128 bits");
    return r;
}

}  // namespace

WideCount shell_count(int n, std::int64_t k)
{
    if (n < 1)
        throw std::invalid_argument("shell_count needs n >= 1");
    if (k < 1)
        throw std::invalid_argument("shell_count needs k >= 1");
    const auto kk = static_cast<WideCount>(k);
    return checked_pow(2 * kk + 1, n, n, k) - checked_pow(2 * kk - 1, n, n, k);
}

std::string to_string(WideCount v)
{
    if (v == 0)
        return "0";
    std::string s;
    while (v) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

ShellCursor::ShellCursor(int n, std::int64_t k, ShellHalf half)
    : n_(n), k_(k), canonical_(half == ShellHalf::Canonical), q_(static_cast<std::size_t>(n > 0 ? n : 0))
{
    if (n < 1)
        throw std::invalid_argument("shell iteration needs n >= 1");
    if (k < 1)
        throw std::invalid_argument("shell iteration needs k >= 1");
}

void ShellCursor::reset(std::int64_t k)
{
    if (k < 1)
        throw std::invalid_argument("shell iteration needs k >= 1");
    k_ = k;
    face_ = -1;
}

void ShellCursor::start_face(int i)
{
    face_ = i;
    for (int p = 0; p < i; ++p)
        q_[p] = canonical_ ? 0 : -(k_ - 1);
    // A canonical vector with an all-zero prefix must have q_i = +k.
    q_[i] = canonical_ ? k_ : -k_;
    for (int p = i + 1; p < n_; ++p)
        q_[p] = -k_;
}

bool ShellCursor::advance_within_face()
{
    const int i = face_;
    for (int p = n_ - 1; p > i; --p) {
        if (q_[p] < k_) {
            ++q_[p];
            return true;
        }
        q_[p] = -k_;
    }
    if (q_[i] == -k_) {
        q_[i] = k_;
        return true;
    }
    // Odometer over the prefix, upward from its start. In canonical mode it
    // starts at zero, so every prefix reached has a positive first nonzero.
    for (int p = i - 1; p >= 0; --p) {
        if (q_[p] < k_ - 1) {
            ++q_[p];
            q_[i] = -k_;
            return true;
        }
        q_[p] = -(k_ - 1);
    }
    return false;
}

bool ShellCursor::next()
{
    if (face_ < 0) {
        start_face(0);
        return true;
    }
    if (face_ >= n_)
        return false;
    if (advance_within_face())
        return true;
    if (++face_ >= n_)
        return false;
    start_face(face_);
    return true;
}

int shell_face(std::span<const std::int64_t> q) noexcept
{
    const auto h = sup_norm(q);
    for (std::size_t i = 0; i < q.size(); ++i)
        if (q[i] == h || q[i] == -h)
            return static_cast<int>(i);
    return 0;
}

bool shell_order_less(std::span<const std::int64_t> a, std::span<const std::int64_t> b) noexcept
{
    const auto ha = sup_norm(a);
    const auto hb = sup_norm(b);
    if (ha != hb)
        return ha < hb;
    const int fa = shell_face(a);
    const int fb = shell_face(b);
    if (fa != fb)
        return fa < fb;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::vector<LatticeVector> shell_vectors(int n, std::int64_t k, ShellHalf half)
{
    std::vector<LatticeVector> out;
    for (auto&& q : ShellRange(n, k, half))
        out.push_back(std::move(q));
    return out;
}

}  // namespace kglab
