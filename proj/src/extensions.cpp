#include "ergo/extensions.hpp"

#include "ergo/averages.hpp"
#include "ergo/error.hpp"
#include "ergo/joinings.hpp"
#include "ergo/parallel.hpp"

#include <numeric>

namespace ergo {

std::vector<Partition> pleasant_constituents(const FiniteSystem& sys)
{
    std::vector<Partition> parts;
    parts.push_back(isotropy_partition(sys, SubgroupSpec::action_subgroup(sys.r(), sys.d(), 0)));
    for (std::size_t i = 1; i < sys.d(); ++i)
        parts.push_back(difference_isotropy(sys, i, 0));
    return parts;
}

Partition pleasant_factor(const FiniteSystem& sys)
{
    return join(pleasant_constituents(sys));
}

PleasantnessReport is_pleasant(const FiniteSystem& sys, std::uint64_t budget)
{
    std::uint64_t tuples = 1;
    for (std::size_t i = 0; i < sys.d(); ++i) {
        if (tuples > budget / sys.n())
            throw BudgetExceeded("indicator basis of size n^d = " + std::to_string(sys.n()) + "^" +
                                     std::to_string(sys.d()) + " exceeds the budget",
                                 tuples * sys.n(), budget);
        tuples *= sys.n();
    }

    auto constituents = pleasant_constituents(sys);
    Partition xi = join(constituents);

    struct Best {
        Rational defect_sq{0};
        std::optional<std::vector<State>> witness;
    };
    auto per_state = parallel_map<Best>(sys.n(), [&](std::size_t x1) {
        Best best;
        if (sgn(sys.weight(static_cast<State>(x1))) == 0)
            return best;
        Observable e = Observable::indicator(sys.n(), static_cast<State>(x1));
        Observable h = e - cond_expect(sys, e, xi);
        for (const auto& [rest, limit] : basis_limits(sys, h)) {
            Rational sq = l2_norm_sq(sys, limit);
            if (sq > best.defect_sq) {
                best.defect_sq = sq;
                std::vector<State> w{static_cast<State>(x1)};
                w.insert(w.end(), rest.begin(), rest.end());
                best.witness = std::move(w);
            }
        }
        return best;
    });

    Best overall;
    for (auto& b : per_state)
        if (b.defect_sq > overall.defect_sq)
            overall = std::move(b);

    PleasantnessReport rep{sgn(overall.defect_sq) == 0, SqrtRational(overall.defect_sq), std::move(constituents),
                           std::move(xi), std::move(overall.witness)};
    return rep;
}

ExtensionStage one_step_extension(const FiniteSystem& sys, std::uint64_t budget, std::size_t index)
{
    JoinedMeasure jm = furstenberg_joining(sys);
    if (jm.support().size() > budget)
        throw BudgetExceeded("Furstenberg self-joining support exceeds the budget", jm.support().size(), budget);

    const std::size_t d = sys.d();
    std::vector<std::size_t> lifts{d};
    for (std::size_t i = 1; i < d; ++i)
        lifts.push_back(i);
    FiniteSystem up = jm.as_system(lifts);

    RawSystem raw = up.to_raw();
    raw.name = sys.name() + "/ext" + std::to_string(index);
    up = validate_system(raw);

    std::vector<State> factor(up.n());
    for (std::size_t k = 0; k < jm.support().size(); ++k)
        factor[k] = jm.support()[k][0];
    ExtensionStage stage{std::move(up), std::move(factor), index};
    if (!is_extension_of(stage, sys))
        throw InvariantViolation("one-step extension does not factor onto its base");
    return stage;
}

bool is_extension_of(const ExtensionStage& stage, const FiniteSystem& below)
{
    const FiniteSystem& up = stage.system;
    if (up.d() != below.d() || up.r() != below.r() || stage.factor_map.size() != up.n())
        return false;
    for (std::size_t i = 0; i < up.d(); ++i)
        for (std::size_t j = 0; j < up.r(); ++j)
            for (State s = 0; s < up.n(); ++s)
                if (stage.factor_map[up.generator(i, j)(s)] != below.generator(i, j)(stage.factor_map[s]))
                    return false;
    std::vector<Rational> pushed(below.n(), Rational(0));
    for (State s = 0; s < up.n(); ++s)
        pushed[stage.factor_map[s]] += up.weight(s);
    return pushed == below.weights();
}

ExtensionTower iterate_extensions(const FiniteSystem& sys, std::size_t max_m, std::uint64_t budget)
{
    ExtensionTower tower{{}, std::nullopt, TowerVerdict::MaxStagesReached};
    const FiniteSystem* current = &sys;
    for (std::size_t m = 0;; ++m) {
        try {
            tower.report = is_pleasant(*current, budget);
        } catch (const BudgetExceeded&) {
            tower.report.reset();
            tower.verdict = TowerVerdict::BudgetExceeded;
            return tower;
        }
        if (tower.report->pleasant) {
            tower.verdict = TowerVerdict::PleasantAtStage;
            return tower;
        }
        if (m == max_m)
            return tower;
        try {
            tower.stages.push_back(one_step_extension(*current, budget, m + 1));
        } catch (const BudgetExceeded&) {
            tower.verdict = TowerVerdict::BudgetExceeded;
            return tower;
        }
        current = &tower.stages.back().system;
    }
}

std::vector<std::vector<Observable>> pleasant_decompose(const FiniteSystem& sys, const Observable& f,
                                                        const std::vector<Partition>& constituents)
{
    if (f.size() != sys.n())
        throw DimensionMismatch("observable length differs from state count");
    if (constituents.size() != sys.d())
        throw DimensionMismatch("one constituent partition per action expected");
    const std::size_t n = sys.n();

    bool constant = true;
    for (State x = 0; x < n; ++x)
        constant = constant && f[x] == f[0];
    if (constant) {
        std::vector<Observable> tuple{Observable::constant(n, f[0])};
        for (std::size_t i = 1; i < sys.d(); ++i)
            tuple.push_back(Observable::constant(n, 1));
        return {tuple};
    }

    Partition joined = join(constituents);
    if (!is_measurable(f, joined))
        throw NotMeasurable("observable is not measurable for the join of the constituents");

    // A join cell is C_1 n ... n C_d, so its indicator is the product of the
    // constituent cell indicators.
    std::vector<std::vector<Observable>> tuples;
    for (const auto& cell : joined.cells()) {
        const Rational& value = f[cell.front()];
        if (sgn(value) == 0)
            continue;
        std::vector<Observable> tuple;
        for (std::size_t i = 0; i < sys.d(); ++i) {
            const auto& c = constituents[i].cell(constituents[i].cell_of(cell.front()));
            tuple.push_back(Observable::indicator(n, c));
        }
        tuple[0] *= value;
        tuples.push_back(std::move(tuple));
    }
    return tuples;
}

PleasantReduction reduce_pleasant_limit(const FiniteSystem& sys, const std::vector<std::vector<Observable>>& tuples,
                                        const std::vector<Observable>& rest)
{
    const std::size_t d = sys.d(), n = sys.n();
    if (rest.size() + 1 != d)
        throw DimensionMismatch("expected f_2..f_d");
    for (const auto& t : tuples)
        if (t.size() != d)
            throw DimensionMismatch("every tuple needs one function per action");

    for (std::size_t k = 0; k < tuples.size(); ++k)
        for (std::size_t j = 0; j < sys.r(); ++j)
            for (State x = 0; x < n; ++x) {
                if (tuples[k][0][sys.generator(0, j)(x)] != tuples[k][0][x])
                    throw InvarianceViolated("g_1 of tuple " + std::to_string(k) + " is not T_1-invariant");
                for (std::size_t i = 1; i < d; ++i)
                    if (tuples[k][i][sys.generator(0, j)(x)] != tuples[k][i][sys.generator(i, j)(x)])
                        throw InvarianceViolated("g_" + std::to_string(i + 1) + " of tuple " + std::to_string(k) +
                                                 " is not T_1 T_" + std::to_string(i + 1) + "^{-1}-invariant");
            }

    std::vector<std::size_t> tail(d - 1);
    std::iota(tail.begin(), tail.end(), std::size_t{1});

    PleasantReduction out{Observable::constant(n, 0), {}, false};
    Observable f1 = Observable::constant(n, 0);
    for (const auto& t : tuples) {
        std::vector<Observable> weighted;
        for (std::size_t i = 1; i < d; ++i)
            weighted.push_back(t[i] * rest[i - 1]);
        out.reduced += t[0] * exact_limit(sys, tail, weighted);

        Observable product = t[0];
        for (std::size_t i = 1; i < d; ++i)
            product = product * t[i];
        f1 += product;
    }
    std::vector<Observable> fs{f1};
    fs.insert(fs.end(), rest.begin(), rest.end());
    out.direct = exact_limit(sys, fs);
    out.equal = out.reduced == out.direct;
    return out;
}

} // namespace ergo
