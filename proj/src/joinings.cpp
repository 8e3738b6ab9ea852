#include "ergo/joinings.hpp"

#include "ergo/averages.hpp"
#include "ergo/error.hpp"
#include "ergo/lattice.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace ergo {

Tuple ProductAction::apply(std::size_t axis, const Tuple& t) const
{
    const auto& maps = coords[axis];
    Tuple out(t.size());
    for (std::size_t c = 0; c < t.size(); ++c)
        out[c] = maps[c](t[c]);
    return out;
}

ProductAction ProductAction::product(std::string name, const ProductAction& a, const ProductAction& b)
{
    if (a.coords.size() != b.coords.size())
        throw DimensionMismatch("product of actions of different rank");
    ProductAction out{std::move(name), a.coords};
    for (std::size_t j = 0; j < out.coords.size(); ++j)
        out.coords[j].insert(out.coords[j].end(), b.coords[j].begin(), b.coords[j].end());
    return out;
}

JoinedMeasure::JoinedMeasure(FiniteSystem base, std::size_t power, const std::map<Tuple, Rational>& masses,
                             std::vector<ProductAction> actions)
    : base_(std::move(base)), power_(power), actions_(std::move(actions))
{
    for (const auto& [t, m] : masses) {
        if (t.size() != power_)
            throw DimensionMismatch("joined tuple has wrong length");
        if (sgn(m) < 0)
            throw InvariantViolation("negative joined mass");
        if (sgn(m) == 0)
            continue;
        support_.push_back(t);
        masses_.push_back(m);
    }
    for (const auto& a : actions_) {
        if (a.coords.size() != base_.r())
            throw DimensionMismatch("action '" + a.name + "' has wrong rank");
        for (const auto& axis : a.coords)
            if (axis.size() != power_)
                throw DimensionMismatch("action '" + a.name + "' has wrong coordinate count");
    }
}

const ProductAction& JoinedMeasure::action(const std::string& name) const
{
    for (const auto& a : actions_)
        if (a.name == name)
            return a;
    throw DimensionMismatch("no action named '" + name + "'");
}

std::optional<std::size_t> JoinedMeasure::index_of(const Tuple& t) const
{
    auto it = std::lower_bound(support_.begin(), support_.end(), t);
    if (it == support_.end() || *it != t)
        return std::nullopt;
    return static_cast<std::size_t>(it - support_.begin());
}

Rational JoinedMeasure::mass_of(const Tuple& t) const
{
    auto i = index_of(t);
    return i ? masses_[*i] : Rational(0);
}

Rational JoinedMeasure::total_mass() const
{
    Rational s = 0;
    for (const auto& m : masses_)
        s += m;
    return s;
}

std::vector<Rational> JoinedMeasure::marginal(std::size_t coord) const
{
    std::vector<Rational> out(base_.n(), Rational(0));
    for (std::size_t k = 0; k < support_.size(); ++k)
        out[support_[k][coord]] += masses_[k];
    return out;
}

bool JoinedMeasure::marginals_match_base() const
{
    for (std::size_t c = 0; c < power_; ++c)
        if (marginal(c) != base_.weights())
            return false;
    return true;
}

bool JoinedMeasure::invariant_under(const ProductAction& a) const
{
    for (std::size_t j = 0; j < a.coords.size(); ++j)
        for (std::size_t k = 0; k < support_.size(); ++k) {
            auto target = index_of(a.apply(j, support_[k]));
            if (!target || masses_[*target] != masses_[k])
                return false;
        }
    return true;
}

bool JoinedMeasure::invariant_under_all() const
{
    return std::all_of(actions_.begin(), actions_.end(), [&](const auto& a) { return invariant_under(a); });
}

FiniteSystem JoinedMeasure::as_system(const std::vector<std::size_t>& action_indices) const
{
    RawSystem raw;
    raw.name = base_.name() + "^" + std::to_string(power_);
    raw.r = base_.r();
    raw.d = action_indices.size();
    raw.n = support_.size();
    raw.weights = masses_;
    for (const auto& t : support_) {
        std::string label = "(";
        for (std::size_t c = 0; c < t.size(); ++c)
            label += (c ? "," : "") + base_.label(t[c]);
        raw.labels.push_back(label + ")");
    }
    for (std::size_t i = 0; i < action_indices.size(); ++i) {
        const auto& a = actions_.at(action_indices[i]);
        for (std::size_t j = 0; j < base_.r(); ++j) {
            std::vector<State> perm(support_.size());
            for (std::size_t k = 0; k < support_.size(); ++k) {
                auto target = index_of(a.apply(j, support_[k]));
                if (!target)
                    throw InvariantViolation("action '" + a.name + "' leaves the support");
                perm[k] = static_cast<State>(*target);
            }
            raw.generators.push_back({i, j, std::move(perm)});
        }
    }
    return validate_system(raw);
}

JoinedMeasure diagonal_measure(const FiniteSystem& sys)
{
    std::map<Tuple, Rational> masses;
    for (State x = 0; x < sys.n(); ++x)
        masses[{x}] = sys.weight(x);
    std::vector<ProductAction> actions;
    for (std::size_t i = 0; i < sys.d(); ++i) {
        ProductAction a{"T" + std::to_string(i + 1), {}};
        for (std::size_t j = 0; j < sys.r(); ++j)
            a.coords.push_back({sys.generator(i, j)});
        actions.push_back(std::move(a));
    }
    return JoinedMeasure(sys, 1, masses, std::move(actions));
}

JoinedMeasure furstenberg_joining(const FiniteSystem& sys, const std::vector<std::int64_t>& base_shift)
{
    const std::size_t d = sys.d(), r = sys.r();
    auto box = FolnerBox::full_period(period_box(sys), base_shift);
    if (box.base.size() != r)
        throw DimensionMismatch("base shift rank differs from r");
    const Rational volume(static_cast<unsigned long>(box.volume()));

    std::map<Tuple, Rational> masses;
    std::vector<std::vector<State>> imgs(d);
    Tuple t(d);
    for (std::uint64_t k = 0; k < box.volume(); ++k) {
        LatticePoint p = box.point(k);
        for (std::size_t i = 0; i < d; ++i)
            imgs[i] = action_image(sys, i, p);
        for (State x = 0; x < sys.n(); ++x) {
            if (sgn(sys.weight(x)) == 0)
                continue;
            for (std::size_t i = 0; i < d; ++i)
                t[i] = imgs[i][x];
            masses[t] += sys.weight(x);
        }
    }
    for (auto& [_, m] : masses)
        m /= volume;

    std::vector<ProductAction> actions;
    for (std::size_t i = 0; i < d; ++i) {
        ProductAction a{"S" + std::to_string(i + 1), {}};
        for (std::size_t j = 0; j < r; ++j)
            a.coords.emplace_back(d, sys.generator(i, j));
        actions.push_back(std::move(a));
    }
    ProductAction diag{"S" + std::to_string(d + 1), {}};
    for (std::size_t j = 0; j < r; ++j) {
        std::vector<Permutation> per;
        for (std::size_t i = 0; i < d; ++i)
            per.push_back(sys.generator(i, j));
        diag.coords.push_back(std::move(per));
    }
    actions.push_back(std::move(diag));
    return JoinedMeasure(sys, d, masses, std::move(actions));
}

Rational joining_integral(const JoinedMeasure& jm, const std::vector<Observable>& fs, const std::vector<Rational>& g)
{
    if (fs.size() != jm.power())
        throw DimensionMismatch("one observable per joined coordinate expected");
    for (const auto& f : fs)
        if (f.size() != jm.base().n())
            throw DimensionMismatch("observable length differs from state count");
    if (g.size() != jm.support().size())
        throw DimensionMismatch("g must be indexed by the joined support");
    Rational s = 0;
    for (std::size_t k = 0; k < jm.support().size(); ++k) {
        if (sgn(g[k]) == 0)
            continue;
        Rational term = jm.masses()[k] * g[k];
        for (std::size_t i = 0; i < fs.size(); ++i)
            term *= fs[i][jm.support()[k][i]];
        s += term;
    }
    return s;
}

Rational joining_integral(const JoinedMeasure& jm, const std::vector<Observable>& fs)
{
    return joining_integral(jm, fs, std::vector<Rational>(jm.support().size(), Rational(1)));
}

std::optional<std::vector<State>> first_nonvanishing_limit(const FiniteSystem& sys, const Observable& f1)
{
    for (const auto& [key, limit] : basis_limits(sys, f1))
        if (sgn(l2_norm_sq(sys, limit)) != 0)
            return key;
    return std::nullopt;
}

VdcConditionResult vdc_condition_check(const FiniteSystem& sys, const Observable& f1)
{
    if (f1.size() != sys.n())
        throw DimensionMismatch("observable length differs from state count");
    const std::size_t d = sys.d();
    JoinedMeasure jm = furstenberg_joining(sys);
    FiniteSystem on_support = jm.as_system({d});
    Partition cells = isotropy_partition(on_support, SubgroupSpec::whole(sys.r(), 1));

    // The integral against 1_{x_2} x ... x 1_{x_d} x 1_cell collects exactly the
    // support points with those coordinates in that cell.
    std::map<std::pair<std::size_t, std::vector<State>>, Rational> sums;
    for (std::size_t k = 0; k < jm.support().size(); ++k) {
        const Tuple& t = jm.support()[k];
        std::vector<State> rest(t.begin() + 1, t.end());
        sums[{cells.cell_of(static_cast<State>(k)), std::move(rest)}] += jm.masses()[k] * f1[t[0]];
    }

    VdcConditionResult out{true, std::nullopt, false, std::nullopt};
    for (const auto& [key, value] : sums)
        if (sgn(value) != 0) {
            out.integrals_vanish = false;
            out.witness = VdcConditionWitness{key.second, key.first, value};
            break;
        }
    if (out.integrals_vanish) {
        out.counterexample = first_nonvanishing_limit(sys, f1);
        out.conclusion_holds = !out.counterexample.has_value();
    }
    return out;
}

JoinedMeasure rel_indep_joining(const FiniteSystem& sys, const Partition& xi)
{
    if (xi.state_count() != sys.n())
        throw DimensionMismatch("partition does not match state count");
    std::map<Tuple, Rational> masses;
    for (std::size_t c = 0; c < xi.cell_count(); ++c) {
        const Rational& w = xi.cell_weight(c);
        if (sgn(w) == 0)
            throw ZeroWeightCell("cell " + std::to_string(c) + " has zero weight");
        for (auto x : xi.cell(c))
            for (auto y : xi.cell(c)) {
                Rational m = sys.weight(x) * sys.weight(y) / w;
                if (sgn(m) != 0)
                    masses[{x, y}] = m;
            }
    }
    return JoinedMeasure(sys, 2, masses);
}

JoinedMeasure rel_indep_product(const JoinedMeasure& jm, const Partition& xi)
{
    if (xi.state_count() != jm.support().size())
        throw DimensionMismatch("partition does not match the joined support");
    std::map<Tuple, Rational> masses;
    for (std::size_t c = 0; c < xi.cell_count(); ++c) {
        Rational w = 0;
        for (auto s : xi.cell(c))
            w += jm.masses()[s];
        if (sgn(w) == 0)
            throw ZeroWeightCell("cell " + std::to_string(c) + " has zero weight");
        for (auto s : xi.cell(c))
            for (auto t : xi.cell(c)) {
                Tuple joined = jm.support()[s];
                joined.insert(joined.end(), jm.support()[t].begin(), jm.support()[t].end());
                masses[std::move(joined)] = jm.masses()[s] * jm.masses()[t] / w;
            }
    }
    return JoinedMeasure(jm.base(), 2 * jm.power(), masses);
}

namespace {

ProductAction identity_action(const FiniteSystem& sys, std::size_t power)
{
    ProductAction a{"id", {}};
    for (std::size_t j = 0; j < sys.r(); ++j)
        a.coords.emplace_back(power, Permutation::identity(sys.n()));
    return a;
}

} // namespace

std::vector<JoinedMeasure> host_kra_tower(const FiniteSystem& sys)
{
    const std::size_t d = sys.d();
    std::vector<std::size_t> all(d);
    std::iota(all.begin(), all.end(), std::size_t{0});

    std::vector<JoinedMeasure> tower;
    JoinedMeasure stage = diagonal_measure(sys);
    for (std::size_t k = 1; k <= d; ++k) {
        FiniteSystem on_support = stage.as_system(all);
        Partition xi = k == 1 ? isotropy_partition(on_support, SubgroupSpec::action_subgroup(sys.r(), d, 0))
                              : difference_isotropy(on_support, 0, k - 1);
        JoinedMeasure product = rel_indep_product(stage, xi);

        std::vector<ProductAction> lifted;
        const auto& prev = stage.actions();
        lifted.push_back(ProductAction::product(
            "T1", prev[0], k == 1 ? identity_action(sys, stage.power()) : prev[k - 1]));
        for (std::size_t i = 1; i < d; ++i)
            lifted.push_back(ProductAction::product("T" + std::to_string(i + 1), prev[i], prev[i]));

        std::map<Tuple, Rational> masses;
        for (std::size_t s = 0; s < product.support().size(); ++s)
            masses.emplace(product.support()[s], product.masses()[s]);
        JoinedMeasure next(sys, product.power(), masses, std::move(lifted));
        if (!next.invariant_under_all())
            throw InvariantViolation("Host-Kra stage " + std::to_string(k) + " is not invariant under its lifts");
        tower.push_back(next);
        stage = std::move(next);
    }
    return tower;
}

bool host_kra_closed_form_holds(const FiniteSystem& sys, const JoinedMeasure& top)
{
    const std::size_t d = sys.d();
    if (top.power() != (std::size_t{1} << d) || top.actions().size() != d)
        return false;
    const Permutation id = Permutation::identity(sys.n());
    for (std::size_t j = 0; j < sys.r(); ++j) {
        for (std::size_t p = 0; p < top.power(); ++p) {
            const Permutation& expected =
                p == 0 ? sys.generator(0, j) : (p == 1 ? id : sys.generator(std::bit_width(p) - 1, j));
            if (!(top.actions()[0].coords[j][p] == expected))
                return false;
            for (std::size_t i = 1; i < d; ++i)
                if (!(top.actions()[i].coords[j][p] == sys.generator(i, j)))
                    return false;
        }
    }
    return true;
}

HkConditionResult hk_condition_check(const FiniteSystem& sys, const Observable& f1)
{
    if (f1.size() != sys.n())
        throw DimensionMismatch("observable length differs from state count");
    JoinedMeasure top = host_kra_tower(sys).back();
    std::map<std::vector<State>, Rational> sums;
    for (std::size_t k = 0; k < top.support().size(); ++k) {
        const Tuple& t = top.support()[k];
        sums[std::vector<State>(t.begin() + 1, t.end())] += top.masses()[k] * f1[t[0]];
    }
    HkConditionResult out{true, std::nullopt, false, std::nullopt};
    for (const auto& [key, value] : sums)
        if (sgn(value) != 0) {
            out.integrals_vanish = false;
            out.witness = key;
            break;
        }
    if (out.integrals_vanish) {
        out.counterexample = first_nonvanishing_limit(sys, f1);
        out.conclusion_holds = !out.counterexample.has_value();
    }
    return out;
}

} // namespace ergo
