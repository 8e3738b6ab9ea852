#pragma once

// Rotation systems on tori T^m with trigonometric-polynomial observables,
// evaluated in double precision. Limits are decided exactly from the
// arithmetic nature of the rotation entries.

#include "ergo/lattice.hpp"
#include "ergo/rational.hpp"
#include "ergo/system.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ergo {

/// A real number mod 1 of the form q + sum_s c_s * theta_s with rational q, c_s.
/// Named symbols are phi = (sqrt5 - 1)/2, sqrt2 = sqrt(2) - 1, sqrt3 = sqrt(3) - 1
/// and pi = pi - 3; together with 1 they are linearly independent over Q.
/// A bare float becomes an opaque symbol whose arithmetic nature is unknown.
class Angle {
public:
    Angle() = default;
    static Angle rational(Rational q);
    static Angle symbol(const std::string& name, Rational coeff = 1);
    static Angle opaque(double value);

    /// Known symbol names.
    static bool is_known_symbol(const std::string& name);

    Angle& operator+=(const Angle& o);
    Angle scaled(std::int64_t k) const;

    const Rational& rational_part() const { return rational_; }
    /// Symbol name -> coefficient; opaque symbols are named "float:<value>".
    const std::map<std::string, Rational>& symbolic_part() const { return coeffs_; }
    /// Fractional part in [0, 1).
    double value() const;

    /// Whether this is an integer, when that can be decided. Throws UndecidableResonance otherwise.
    bool is_integer() const;

private:
    Rational rational_{0};
    std::map<std::string, Rational> coeffs_;
    std::map<std::string, double> opaque_values_;
};

struct TorusSystem {
    std::size_t m = 1;
    std::size_t r = 1;
    std::size_t d = 1;
    /// rotations[i * r + j] is the rotation vector (length m) of axis j of action i.
    std::vector<std::vector<Angle>> rotations;

    const std::vector<Angle>& rotation(std::size_t action, std::size_t axis) const
    {
        return rotations[action * r + axis];
    }
};

/// Checks shapes. Rotations always commute, so there is nothing else to check.
TorusSystem make_torus_system(std::size_t m, std::size_t r, std::size_t d, std::vector<std::vector<Angle>> rotations);

struct TrigTerm {
    std::vector<std::int64_t> k;
    std::complex<double> c;
};

/// f(t) = sum_k c_k e^{2 pi i k.t} with distinct frequencies.
class TrigObservable {
public:
    TrigObservable() = default;
    /// Merges repeated frequencies and drops zero coefficients.
    TrigObservable(std::size_t m, std::vector<TrigTerm> terms);
    static TrigObservable constant(std::size_t m, std::complex<double> c);
    static TrigObservable character(std::vector<std::int64_t> k, std::complex<double> c = 1.0);

    std::size_t dimension() const { return m_; }
    const std::vector<TrigTerm>& terms() const { return terms_; }

    std::complex<double> operator()(const std::vector<double>& t) const;
    TrigObservable conjugate() const;
    friend TrigObservable operator*(const TrigObservable& a, const TrigObservable& b);

    /// sum |c_k|, an upper bound for the sup norm.
    double sup_bound() const;
    /// Parseval: sqrt(sum |c_k|^2).
    double l2_norm() const;

private:
    std::size_t m_ = 1;
    std::vector<TrigTerm> terms_;
};

/// Pointwise box averages at each sample, summed in row-major lattice order
/// with Neumaier compensation.
std::vector<std::complex<double>> torus_truncated_average(const TorusSystem& sys,
                                                          const std::vector<TrigObservable>& fs,
                                                          const FolnerBox& box,
                                                          const std::vector<std::vector<double>>& samples);

/// The Folner limit: the sum over frequency tuples with sum_i k_i . v_{ij} in Z
/// for every axis j. Throws UndecidableResonance when an opaque entry decides it.
TrigObservable character_limit(const TorusSystem& sys, const std::vector<TrigObservable>& fs);

struct ConvergenceRow {
    std::uint64_t n;
    std::vector<std::int64_t> base;
    std::vector<double> sample;
    double error;
};

/// |average - limit| over cubes of edge N for every (N, base, sample).
std::vector<ConvergenceRow> convergence_table(const TorusSystem& sys, const std::vector<TrigObservable>& fs,
                                              const std::vector<std::uint64_t>& edges,
                                              const std::vector<std::vector<std::int64_t>>& bases,
                                              const std::vector<std::vector<double>>& samples);
/// max N * error over the table.
double rate_constant(const std::vector<ConvergenceRow>& rows);

/// For all-rational rotations: the grid (1/q)Z^m / Z^m as a finite system, q the
/// common denominator. Grid point a has index ((a_0 q + a_1) q + ...).
FiniteSystem to_finite_system(const TorusSystem& sys, const std::string& name = "torus-grid");
std::uint64_t common_denominator(const TorusSystem& sys);
std::vector<std::complex<double>> sample_on_grid(const TrigObservable& f, std::uint64_t q);

} // namespace ergo
