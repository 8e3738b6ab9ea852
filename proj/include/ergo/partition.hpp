#pragma once

// Factors of a finite system. A sigma-subalgebra of a finite probability space
// is a partition of its states, so factors are held as canonical partitions.

#include "ergo/observable.hpp"
#include "ergo/system.hpp"

#include <vector>

namespace ergo {

class Partition {
public:
    /// Builds from arbitrary cell ids per state; cells come out sorted by least element.
    static Partition from_labels(const FiniteSystem& sys, const std::vector<std::size_t>& cell_ids);
    static Partition from_labels(const std::vector<Rational>& weights, const std::vector<std::size_t>& cell_ids);
    static Partition singletons(const FiniteSystem& sys);
    static Partition whole(const FiniteSystem& sys);

    std::size_t state_count() const { return cell_of_.size(); }
    std::size_t cell_count() const { return cells_.size(); }
    std::size_t cell_of(State x) const { return cell_of_[x]; }
    const std::vector<State>& cell(std::size_t c) const { return cells_[c]; }
    const std::vector<std::vector<State>>& cells() const { return cells_; }
    const Rational& cell_weight(std::size_t c) const { return cell_weights_[c]; }

    const std::vector<Rational>& state_weights() const { return weights_; }

    bool is_discrete() const { return cells_.size() == cell_of_.size(); }

    /// Structural equality of canonical forms; weights follow from the system.
    friend bool operator==(const Partition& a, const Partition& b) { return a.cells_ == b.cells_; }

private:
    std::vector<Rational> weights_;
    std::vector<std::size_t> cell_of_;
    std::vector<std::vector<State>> cells_;
    std::vector<Rational> cell_weights_;
};

/// Generators of a subgroup of Z^{rd}; an empty list is the trivial subgroup.
struct SubgroupSpec {
    std::vector<GroupElement> generators;

    static SubgroupSpec trivial() { return {}; }
    static SubgroupSpec whole(std::size_t r, std::size_t d);
    /// Gamma_i: the copy of Z^r belonging to one action.
    static SubgroupSpec action_subgroup(std::size_t r, std::size_t d, std::size_t action);
};

/// Orbits of {T^g : g in Gamma}.
Partition isotropy_partition(const FiniteSystem& sys, const SubgroupSpec& gamma);
/// Isotropy factor of T_i T_j^{-1} (Gamma = {a_i(n) - a_j(n)}).
Partition difference_isotropy(const FiniteSystem& sys, std::size_t i, std::size_t j);
/// Common refinement. Throws DimensionMismatch on an empty list or mixed state counts.
Partition join(const std::vector<Partition>& parts);

/// Weighted cell averages. Throws ZeroWeightCell when a cell has no mass.
Observable cond_expect(const FiniteSystem& sys, const Observable& f, const Partition& xi);
bool is_measurable(const Observable& f, const Partition& xi);

/// True iff every generator maps every cell onto a cell.
bool is_invariant(const FiniteSystem& sys, const Partition& xi);

} // namespace ergo
