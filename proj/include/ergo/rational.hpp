#pragma once

// Exact rationals and exact square roots of nonnegative rationals.

#include <gmpxx.h>

#include <compare>
#include <string>
#include <string_view>

namespace ergo {

using Rational = mpq_class;

/// Parses "p", "-p" or "p/q" with q > 0 and returns the value in lowest terms.
/// Throws std::invalid_argument on anything else.
Rational parse_rational(std::string_view text);

/// Lowest-terms "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& q);

Rational abs(const Rational& q);

/// The nonnegative real sqrt(squared), kept exact by storing its square.
/// L2 norms of rational observables are of this form.
class SqrtRational {
public:
    SqrtRational() = default;
    explicit SqrtRational(Rational squared);
    static SqrtRational from_value(const Rational& nonneg_value);

    const Rational& squared() const { return sq_; }
    bool is_zero() const { return sgn(sq_) == 0; }
    double approx() const;

    /// "p/q" when the square root is rational, otherwise "sqrt(p/q)".
    std::string to_string() const;

    friend SqrtRational operator*(const SqrtRational& a, const SqrtRational& b)
    {
        return SqrtRational(a.sq_ * b.sq_);
    }
    friend bool operator==(const SqrtRational& a, const SqrtRational& b) { return a.sq_ == b.sq_; }
    friend std::strong_ordering operator<=>(const SqrtRational& a, const SqrtRational& b)
    {
        int c = cmp(a.sq_, b.sq_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

private:
    Rational sq_{0};
};

} // namespace ergo
