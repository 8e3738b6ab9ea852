#pragma once

// Pleasantness of finite systems and the Furstenberg-joining extension tower.
// A system is pleasant when (Sigma^{T_1} v V_i Sigma^{T_i = T_1}, Sigma, ..., Sigma)
// is a tuple of characteristic factors.

#include "ergo/observable.hpp"
#include "ergo/partition.hpp"
#include "ergo/system.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ergo {

inline constexpr std::uint64_t kDefaultStateBudget = 1'000'000;

/// Sigma^{T_1} followed by Sigma^{T_i = T_1} for i = 2..d.
std::vector<Partition> pleasant_constituents(const FiniteSystem& sys);
/// Their join.
Partition pleasant_factor(const FiniteSystem& sys);

struct PleasantnessReport {
    bool pleasant;
    /// max over indicator tuples of ||exact_limit(e_{x_1} - E[e_{x_1} | Xi], e_{x_2}, ..., e_{x_d})||_2
    SqrtRational defect;
    std::vector<Partition> constituents;
    Partition factor;
    std::optional<std::vector<State>> witness; ///< x_1..x_d attaining the defect
};

/// Exact pleasantness test. By multilinearity the indicator basis covers every
/// bounded f_1..f_d. Throws BudgetExceeded when n^d exceeds `budget`.
PleasantnessReport is_pleasant(const FiniteSystem& sys, std::uint64_t budget = kDefaultStateBudget);

struct ExtensionStage {
    FiniteSystem system;
    std::vector<State> factor_map; ///< state -> state of the previous stage
    std::size_t index;
};

/// The Furstenberg self-joining as a new system: T_1 lifts to S_{d+1}, T_i to S_i
/// (i >= 2), and the factor map is the first-coordinate projection. Throws
/// BudgetExceeded if the joined support exceeds `budget`.
ExtensionStage one_step_extension(const FiniteSystem& sys, std::uint64_t budget = kDefaultStateBudget,
                                  std::size_t index = 1);

/// Whether `stage` is an extension of `below` through its factor map.
bool is_extension_of(const ExtensionStage& stage, const FiniteSystem& below);

enum class TowerVerdict { PleasantAtStage, BudgetExceeded, MaxStagesReached };

struct ExtensionTower {
    std::vector<ExtensionStage> stages;
    /// Report for the last system examined (the input when no stage was built).
    std::optional<PleasantnessReport> report;
    TowerVerdict verdict;
    bool stabilized() const { return verdict == TowerVerdict::PleasantAtStage; }
};

ExtensionTower iterate_extensions(const FiniteSystem& sys, std::size_t max_m,
                                  std::uint64_t budget = kDefaultStateBudget);

/// Writes f, measurable for the join of `constituents` (one per action), as an
/// exact sum of products g_{1,k} g_{2,k} ... g_{d,k} with g_{i,k} measurable for
/// constituents[i]. Throws NotMeasurable otherwise.
std::vector<std::vector<Observable>> pleasant_decompose(const FiniteSystem& sys, const Observable& f,
                                                        const std::vector<Partition>& constituents);

struct PleasantReduction {
    Observable reduced; ///< sum_k g_{1,k} exact_limit over T_2..T_d of (g_{i,k} f_i)
    Observable direct;  ///< exact_limit(sum_k prod_i g_{i,k}, f_2, ..., f_d)
    bool equal;
};

/// `rest` holds f_2..f_d. Throws InvarianceViolated if some g_{1,k} is not
/// T_1-invariant or some g_{i,k} is not T_1 T_i^{-1}-invariant.
PleasantReduction reduce_pleasant_limit(const FiniteSystem& sys, const std::vector<std::vector<Observable>>& tuples,
                                        const std::vector<Observable>& rest);

} // namespace ergo
