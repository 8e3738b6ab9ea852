#pragma once

#include "ergo/rational.hpp"
#include "ergo/system.hpp"

#include <initializer_list>
#include <vector>

namespace ergo {

/// A state-indexed vector of exact rationals: a function in L^inf(mu).
class Observable {
public:
    Observable() = default;
    explicit Observable(std::vector<Rational> values) : values_(std::move(values)) {}
    Observable(std::initializer_list<Rational> values) : values_(values) {}

    static Observable constant(std::size_t n, const Rational& c) { return Observable(std::vector<Rational>(n, c)); }
    static Observable indicator(std::size_t n, State x);
    static Observable indicator(std::size_t n, const std::vector<State>& set);

    std::size_t size() const { return values_.size(); }
    const Rational& operator[](State x) const { return values_[x]; }
    Rational& operator[](State x) { return values_[x]; }
    const std::vector<Rational>& values() const { return values_; }

    Observable& operator+=(const Observable& o);
    Observable& operator-=(const Observable& o);
    Observable& operator*=(const Rational& c);
    friend Observable operator+(Observable a, const Observable& b) { return a += b; }
    friend Observable operator-(Observable a, const Observable& b) { return a -= b; }
    friend Observable operator*(Observable a, const Rational& c) { return a *= c; }
    friend Observable operator*(const Rational& c, Observable a) { return a *= c; }
    /// Pointwise product.
    friend Observable operator*(const Observable& a, const Observable& b);
    friend bool operator==(const Observable&, const Observable&) = default;

    bool is_zero() const;

private:
    std::vector<Rational> values_;
};

/// f composed with a state map: (f o img)(x) = f(img[x]).
Observable compose(const Observable& f, const std::vector<State>& img);

/// Sum_x w(x) |f(x)|^2.
Rational l2_norm_sq(const FiniteSystem& sys, const Observable& f);
SqrtRational l2_norm(const FiniteSystem& sys, const Observable& f);
/// Essential supremum: max |f| over positive-weight states.
Rational linf_norm(const FiniteSystem& sys, const Observable& f);
/// Sum_x w(x) f(x) g(x).
Rational inner(const FiniteSystem& sys, const Observable& f, const Observable& g);
Rational integral(const FiniteSystem& sys, const Observable& f);

} // namespace ergo
