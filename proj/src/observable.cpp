#include "ergo/observable.hpp"

#include "ergo/error.hpp"

namespace ergo {

namespace {
void require_same_size(const Observable& a, const Observable& b)
{
    if (a.size() != b.size())
        throw DimensionMismatch("observables have different lengths");
}
} // namespace

Observable Observable::indicator(std::size_t n, State x)
{
    Observable f = constant(n, 0);
    f[x] = 1;
    return f;
}

Observable Observable::indicator(std::size_t n, const std::vector<State>& set)
{
    Observable f = constant(n, 0);
    for (auto x : set)
        f[x] = 1;
    return f;
}

Observable& Observable::operator+=(const Observable& o)
{
    require_same_size(*this, o);
    for (std::size_t x = 0; x < values_.size(); ++x)
        values_[x] += o.values_[x];
    return *this;
}

Observable& Observable::operator-=(const Observable& o)
{
    require_same_size(*this, o);
    for (std::size_t x = 0; x < values_.size(); ++x)
        values_[x] -= o.values_[x];
    return *this;
}

Observable& Observable::operator*=(const Rational& c)
{
    for (auto& v : values_)
        v *= c;
    return *this;
}

Observable operator*(const Observable& a, const Observable& b)
{
    require_same_size(a, b);
    Observable out = a;
    for (std::size_t x = 0; x < out.size(); ++x)
        out.values_[x] *= b.values_[x];
    return out;
}

bool Observable::is_zero() const
{
    for (const auto& v : values_)
        if (sgn(v) != 0)
            return false;
    return true;
}

Observable compose(const Observable& f, const std::vector<State>& img)
{
    if (f.size() != img.size())
        throw DimensionMismatch("compose: observable and map have different lengths");
    std::vector<Rational> out(img.size());
    for (std::size_t x = 0; x < img.size(); ++x)
        out[x] = f[img[x]];
    return Observable(std::move(out));
}

Rational l2_norm_sq(const FiniteSystem& sys, const Observable& f)
{
    return inner(sys, f, f);
}

SqrtRational l2_norm(const FiniteSystem& sys, const Observable& f)
{
    return SqrtRational(l2_norm_sq(sys, f));
}

Rational linf_norm(const FiniteSystem& sys, const Observable& f)
{
    if (f.size() != sys.n())
        throw DimensionMismatch("observable length differs from state count");
    Rational m = 0;
    for (State x = 0; x < sys.n(); ++x)
        if (sgn(sys.weight(x)) > 0 && abs(f[x]) > m)
            m = abs(f[x]);
    return m;
}

Rational inner(const FiniteSystem& sys, const Observable& f, const Observable& g)
{
    if (f.size() != sys.n() || g.size() != sys.n())
        throw DimensionMismatch("observable length differs from state count");
    Rational s = 0;
    for (State x = 0; x < sys.n(); ++x)
        if (sgn(sys.weight(x)) != 0)
            s += sys.weight(x) * f[x] * g[x];
    return s;
}

Rational integral(const FiniteSystem& sys, const Observable& f)
{
    return inner(sys, f, Observable::constant(sys.n(), 1));
}

} // namespace ergo
