#pragma once

// Self-joinings of a finite system: measures on X^k whose coordinate marginals
// are all mu, carried with Z^r-actions that act coordinatewise.

#include "ergo/observable.hpp"
#include "ergo/partition.hpp"
#include "ergo/system.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ergo {

using Tuple = std::vector<State>;

/// A Z^r-action on X^k moving coordinate c along axis j by coords[j][c].
struct ProductAction {
    std::string name;
    std::vector<std::vector<Permutation>> coords;

    Tuple apply(std::size_t axis, const Tuple& t) const;
    /// Concatenation: acts by `a` on the first block and `b` on the second.
    static ProductAction product(std::string name, const ProductAction& a, const ProductAction& b);
};

class JoinedMeasure {
public:
    /// Zero masses are dropped; the support is kept in lexicographic order.
    JoinedMeasure(FiniteSystem base, std::size_t power, const std::map<Tuple, Rational>& masses,
                  std::vector<ProductAction> actions = {});

    const FiniteSystem& base() const { return base_; }
    std::size_t power() const { return power_; }
    const std::vector<Tuple>& support() const { return support_; }
    const std::vector<Rational>& masses() const { return masses_; }
    const std::vector<ProductAction>& actions() const { return actions_; }
    const ProductAction& action(const std::string& name) const;

    std::optional<std::size_t> index_of(const Tuple& t) const;
    Rational mass_of(const Tuple& t) const;
    Rational total_mass() const;
    std::vector<Rational> marginal(std::size_t coord) const;

    bool marginals_match_base() const;
    bool invariant_under(const ProductAction& a) const;
    bool invariant_under_all() const;

    /// The support as a finite system whose actions are the chosen stored actions.
    FiniteSystem as_system(const std::vector<std::size_t>& action_indices) const;

    friend bool operator==(const JoinedMeasure& a, const JoinedMeasure& b)
    {
        return a.power_ == b.power_ && a.support_ == b.support_ && a.masses_ == b.masses_;
    }

private:
    FiniteSystem base_;
    std::size_t power_;
    std::vector<Tuple> support_;
    std::vector<Rational> masses_;
    std::vector<ProductAction> actions_;
};

/// mu on X itself (power 1), carrying T_1..T_d as actions "T1".."Td".
JoinedMeasure diagonal_measure(const FiniteSystem& sys);

/// mu^{*d}: the period-box average of the pushforwards of the diagonal measure
/// under S_{d+1}^n. Carries S_1..S_d (S_i = T_i^{x d}) and S_{d+1} = T_1 x ... x T_d
/// named "S1".."S{d+1}". `base_shift` moves the averaging box.
JoinedMeasure furstenberg_joining(const FiniteSystem& sys, const std::vector<std::int64_t>& base_shift = {});

/// Sum over the support of mass * prod_i fs[i](t_i) * g[index]; g indexes the support.
Rational joining_integral(const JoinedMeasure& jm, const std::vector<Observable>& fs,
                          const std::vector<Rational>& g);
Rational joining_integral(const JoinedMeasure& jm, const std::vector<Observable>& fs);

struct VdcConditionWitness {
    std::vector<State> basis;      ///< x_2..x_d of the indicators f_i = 1_{x_i}
    std::size_t invariant_cell;    ///< S_{d+1}-orbit cell whose indicator is g
    Rational value;                ///< the nonzero joining integral
};

struct VdcConditionResult {
    bool integrals_vanish;
    std::optional<VdcConditionWitness> witness;
    /// Only meaningful when integrals_vanish: every indicator-basis limit is zero.
    bool conclusion_holds;
    std::optional<std::vector<State>> counterexample;
};

/// Checks the hypothesis of the Furstenberg-joining control criterion over the
/// indicator basis for f_2..f_d and S_{d+1}-orbit-cell indicators for g, and
/// verifies its conclusion whenever the hypothesis holds.
VdcConditionResult vdc_condition_check(const FiniteSystem& sys, const Observable& f1);

/// mu (x)_Xi mu on X^2: mass w(x) w(y) / w(cell) on same-cell pairs. No actions attached.
JoinedMeasure rel_indep_joining(const FiniteSystem& sys, const Partition& xi);
/// Relatively independent self-product of a joined measure over a partition of
/// its support (indices into jm.support()). Actions must be attached by the caller.
JoinedMeasure rel_indep_product(const JoinedMeasure& jm, const Partition& xi);

/// mu^{[1]}, ..., mu^{[d]} on X^{2^k}; coordinate p of stage k is the subset of
/// {1..k} with bitmask p. Each stage carries actions "T1".."Td".
std::vector<JoinedMeasure> host_kra_tower(const FiniteSystem& sys);

/// Whether the top stage's T1 is prod_alpha T_{1,alpha} (T_1 at the empty set,
/// identity at {1}, T_{max alpha} otherwise) and each Ti (i >= 2) is T_i on every
/// coordinate.
bool host_kra_closed_form_holds(const FiniteSystem& sys, const JoinedMeasure& top);

struct HkConditionResult {
    bool integrals_vanish;
    std::optional<std::vector<State>> witness; ///< x_alpha for alpha != empty, by bitmask order
    bool conclusion_holds;
    std::optional<std::vector<State>> counterexample;
};
HkConditionResult hk_condition_check(const FiniteSystem& sys, const Observable& f1);

/// Whether every indicator-basis exact_limit with this f_1 vanishes; returns the
/// first basis tuple (x_2..x_d) where it does not.
std::optional<std::vector<State>> first_nonvanishing_limit(const FiniteSystem& sys, const Observable& f1);

} // namespace ergo
