#include "ergo/rational.hpp"

#include <stdexcept>

namespace ergo {

namespace {

bool is_integer_literal(std::string_view s, bool allow_sign)
{
    if (!s.empty() && allow_sign && s.front() == '-')
        s.remove_prefix(1);
    if (s.empty())
        return false;
    for (char c : s)
        if (c < '0' || c > '9')
            return false;
    return true;
}

} // namespace

Rational parse_rational(std::string_view text)
{
    auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view{} : text.substr(slash + 1);
    if (!is_integer_literal(num, true) || (slash != std::string_view::npos && !is_integer_literal(den, false)))
        throw std::invalid_argument("not a rational literal: '" + std::string(text) + "'");

    Rational q;
    q.get_num() = mpz_class(std::string(num), 10);
    q.get_den() = slash == std::string_view::npos ? mpz_class(1) : mpz_class(std::string(den), 10);
    if (q.get_den() == 0)
        throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q)
{
    return q.get_str(10);
}

Rational abs(const Rational& q)
{
    return sgn(q) < 0 ? Rational(-q) : q;
}

SqrtRational::SqrtRational(Rational squared) : sq_(std::move(squared))
{
    if (sgn(sq_) < 0)
        throw std::invalid_argument("SqrtRational of a negative number");
}

SqrtRational SqrtRational::from_value(const Rational& nonneg_value)
{
    if (sgn(nonneg_value) < 0)
        throw std::invalid_argument("SqrtRational::from_value of a negative number");
    return SqrtRational(nonneg_value * nonneg_value);
}

double SqrtRational::approx() const
{
    mpf_class f(sq_, 256);
    mpf_class root(sqrt(f), 256);
    return root.get_d();
}

std::string SqrtRational::to_string() const
{
    const mpz_class& num = sq_.get_num();
    const mpz_class& den = sq_.get_den();
    if (mpz_perfect_square_p(num.get_mpz_t()) && mpz_perfect_square_p(den.get_mpz_t())) {
        Rational root;
        root.get_num() = sqrt(num);
        root.get_den() = sqrt(den);
        root.canonicalize();
        return ergo::to_string(root);
    }
    return "sqrt(" + ergo::to_string(sq_) + ")";
}

} // namespace ergo
