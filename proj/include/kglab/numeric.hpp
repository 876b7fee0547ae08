#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace kglab {

/// Neumaier's variant of Kahan summation. Order-dependent but deterministic.
class CompensatedSum {
public:
    void add(double term) noexcept
    {
        const double t = sum_ + term;
        if (std::fabs(sum_) >= std::fabs(term))
            carry_ += (sum_ - t) + term;
        else
            carry_ += (term - t) + sum_;
        sum_ = t;
    }

    CompensatedSum& operator+=(double term) noexcept
    {
        add(term);
        return *this;
    }

    [[nodiscard]] double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

/// Dot product of an integer vector with a real point, evaluated with
/// error-free products (fma) and compensated accumulation. Integer entries
/// must stay below 2^53 in magnitude.
[[nodiscard]] inline double compensated_dot(std::span<const std::int64_t> q,
                                            std::span<const double> x) noexcept
{
    double s = 0.0;
    double c = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double qi = static_cast<double>(q[i]);
        const double p = qi * x[i];
        const double pe = std::fma(qi, x[i], -p);
        const double t = s + p;
        const double z = t - s;
        const double se = (s - (t - z)) + (p - z);
        s = t;
        c += pe + se;
    }
    return s + c;
}

}  // namespace kglab
