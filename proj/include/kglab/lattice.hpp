#pragma once

#include <compare>
#include <cstdint>
#include <iterator>
#include <span>
#include <string>
#include <vector>

namespace kglab {

/// Nonzero integer vector with its sup-norm height.
class LatticeVector {
public:
    /// Throws std::invalid_argument for an empty or all-zero vector.
    explicit LatticeVector(std::vector<std::int64_t> coords);

    [[nodiscard]] std::span<const std::int64_t> coords() const noexcept { return coords_; }
    [[nodiscard]] std::int64_t height() const noexcept { return height_; }
    [[nodiscard]] int dim() const noexcept { return static_cast<int>(coords_.size()); }
    [[nodiscard]] std::int64_t operator[](std::size_t i) const noexcept { return coords_[i]; }

    /// First nonzero coordinate positive.
    [[nodiscard]] bool is_canonical() const noexcept;
    /// Representative of {q, -q} with positive first nonzero coordinate.
    [[nodiscard]] LatticeVector canonical() const;
    [[nodiscard]] LatticeVector negated() const;

    friend bool operator==(const LatticeVector& a, const LatticeVector& b) noexcept
    {
        return a.coords_ == b.coords_;
    }
    /// Lexicographic on coordinates.
    friend std::strong_ordering operator<=>(const LatticeVector& a, const LatticeVector& b) noexcept
    {
        return a.coords_ <=> b.coords_;
    }

private:
    std::vector<std::int64_t> coords_;
    std::int64_t height_;
};

[[nodiscard]] std::int64_t sup_norm(std::span<const std::int64_t> q) noexcept;
[[nodiscard]] std::string to_string(const LatticeVector& q);

using WideCount = unsigned __int128;

/// #{q in Z^n : |q| = k} = (2k+1)^n - (2k-1)^n in 128-bit arithmetic.
/// Throws std::range_error on overflow, std::invalid_argument for n < 1 or k < 1.
[[nodiscard]] WideCount shell_count(int n, std::int64_t k);

[[nodiscard]] std::string to_string(WideCount v);

enum class ShellHalf {
    Full,       ///< every q with |q| = k
    Canonical,  ///< one of each pair {q, -q}: first nonzero coordinate positive
};

/// Walks the shell {|q| = k} face by face without visiting the interior.
///
/// Face i collects the vectors whose first coordinate of absolute value k
/// sits at index i. Faces come in increasing i and each face is traversed
/// in lexicographic order, so for n = 2, k = 1 the canonical walk is
/// (1,-1), (1,0), (1,1), (0,1).
class ShellCursor {
public:
    ShellCursor(int n, std::int64_t k, ShellHalf half = ShellHalf::Canonical);

    /// Restarts the walk on shell k of the same dimension, reusing storage.
    void reset(std::int64_t k);

    /// Moves to the next vector; the first call moves to the first vector.
    bool next();
    [[nodiscard]] std::span<const std::int64_t> current() const noexcept { return q_; }
    /// Index of the face holding the current vector.
    [[nodiscard]] int face() const noexcept { return face_; }

private:
    void start_face(int i);
    bool advance_within_face();

    int n_;
    std::int64_t k_;
    bool canonical_;
    int face_ = -1;
    std::vector<std::int64_t> q_;
};

/// Input range over one shell, yielding LatticeVector values.
class ShellRange {
public:
    ShellRange(int n, std::int64_t k, ShellHalf half = ShellHalf::Canonical)
        : n_(n), k_(k), half_(half)
    {
    }

    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = LatticeVector;
        using difference_type = std::ptrdiff_t;

        iterator() = default;
        explicit iterator(ShellCursor cursor) : cursor_(std::move(cursor)), live_(cursor_.next()) {}

        [[nodiscard]] LatticeVector operator*() const
        {
            const auto c = cursor_.current();
            return LatticeVector({c.begin(), c.end()});
        }
        iterator& operator++()
        {
            live_ = cursor_.next();
            return *this;
        }
        void operator++(int) { ++*this; }
        friend bool operator==(const iterator& it, std::default_sentinel_t) noexcept
        {
            return !it.live_;
        }

    private:
        ShellCursor cursor_{1, 1};
        bool live_ = false;
    };

    [[nodiscard]] iterator begin() const { return iterator(ShellCursor(n_, k_, half_)); }
    [[nodiscard]] std::default_sentinel_t end() const noexcept { return {}; }

private:
    int n_;
    std::int64_t k_;
    ShellHalf half_;
};

/// Canonical half-shell stream: shell_count(n, k) / 2 vectors.
[[nodiscard]] inline ShellRange shell_iter(int n, std::int64_t k)
{
    return ShellRange(n, k, ShellHalf::Canonical);
}

/// Index of the first coordinate whose magnitude equals the height: the face
/// that ShellCursor visits q on.
[[nodiscard]] int shell_face(std::span<const std::int64_t> q) noexcept;

/// Strict weak order matching the canonical walk across shells: by height,
/// then face, then lexicographically.
[[nodiscard]] bool shell_order_less(std::span<const std::int64_t> a,
                                    std::span<const std::int64_t> b) noexcept;

[[nodiscard]] std::vector<LatticeVector> shell_vectors(int n, std::int64_t k,
                                                       ShellHalf half = ShellHalf::Canonical);

}  // namespace kglab
