#pragma once

// Nonconventional averages (1/|I|) sum_{n in a + I} prod_i f_i o T_i^n on finite
// systems. On a finite system the map n -> (T_1^n, ..., T_d^n) is periodic, so the
// Folner limit is the average over one period box, for any base point.

#include "ergo/lattice.hpp"
#include "ergo/observable.hpp"
#include "ergo/system.hpp"

#include <map>
#include <vector>

namespace ergo {

Observable truncated_average(const FiniteSystem& sys, const std::vector<Observable>& fs, const FolnerBox& box);
/// Average over an explicit finite set of lattice points.
Observable truncated_average(const FiniteSystem& sys, const std::vector<Observable>& fs,
                             const std::vector<LatticePoint>& points);

Observable exact_limit(const FiniteSystem& sys, const std::vector<Observable>& fs);
/// Limit of the average pairing fs[k] with actions[k] only. With no actions the
/// empty product is the constant 1.
Observable exact_limit(const FiniteSystem& sys, std::span<const std::size_t> actions,
                       const std::vector<Observable>& fs);

/// Certified bound on ||truncated - limit||_2:
/// 2 ||f_1||_2 prod_{i>=2} ||f_i||_inf (1 - prod_j floor(N_j/P_j) P_j / N_j).
SqrtRational deviation_bound(const FiniteSystem& sys, const std::vector<Observable>& fs, const FolnerBox& box);

struct AverageReport {
    FolnerBox box;
    Observable truncated;
    Observable limit;
    SqrtRational deviation;
    SqrtRational bound;
    bool within_bound() const { return deviation <= bound; }
};
AverageReport average_report(const FiniteSystem& sys, const std::vector<Observable>& fs, const FolnerBox& box);

struct ContractiveCheck {
    SqrtRational lhs; ///< ||average||_2
    SqrtRational rhs; ///< ||f_1||_2 prod_{i>=2} ||f_i||_inf
    bool holds;
};
ContractiveCheck contractive_check(const FiniteSystem& sys, const std::vector<Observable>& fs,
                                   const FolnerBox& box);

/// gamma(m) = lim_n <u_{n+m}, u_n> with u_n = prod_i f_i o T_i^n, computed as
/// the integral of exact_limit(f_i * f_i o T_i^m).
Rational vdc_correlation(const FiniteSystem& sys, const std::vector<Observable>& fs, const LatticePoint& m);

/// gamma with a cache keyed by the residue of m modulo the period box.
class VdcCorrelator {
public:
    VdcCorrelator(const FiniteSystem& sys, std::vector<Observable> fs);
    const Rational& operator()(const LatticePoint& m);
    const PeriodBox& periods() const { return periods_; }
    std::size_t cache_size() const { return cache_.size(); }

private:
    FiniteSystem sys_;
    std::vector<Observable> fs_;
    PeriodBox periods_;
    std::map<LatticePoint, Rational> cache_;
};

/// exact_limit(f_1, e_{x_2}, ..., e_{x_d}) for every indicator tuple at once,
/// keyed by (x_2, ..., x_d). Tuples that are absent have limit zero.
std::map<std::vector<State>, Observable> basis_limits(const FiniteSystem& sys, const Observable& f1);

struct VdcIdentity {
    Rational lhs_sq; ///< ||exact_limit||_2^2
    Rational rhs_sq; ///< (1/|P|) sum_{delta in P} gamma(delta)
    bool holds;
};
VdcIdentity vdc_identity_check(const FiniteSystem& sys, const std::vector<Observable>& fs);

} // namespace ergo
