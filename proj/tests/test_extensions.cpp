#include "oracle.hpp"

#include "ergo/averages.hpp"
#include "ergo/error.hpp"
#include "ergo/extensions.hpp"
#include "ergo/partition.hpp"

#include <doctest.h>

using namespace ergo;
using oracle::frac;
using oracle::Q;

namespace {

Observable pullback(const Observable& f, const std::vector<State>& map)
{
    std::vector<Rational> v;
    for (auto x : map)
        v.push_back(f[x]);
    return Observable(std::move(v));
}

} // namespace

TEST_CASE("pleasant factor")
{
    auto six = oracle::cyclic(6, {2});
    auto parts = pleasant_constituents(six);
    REQUIRE(parts.size() == 1);
    CHECK(parts[0] == isotropy_partition(six, SubgroupSpec::action_subgroup(1, 1, 0)));

    auto five = oracle::cyclic(5, {1, 2});
    CHECK(pleasant_factor(five).cell_count() == 1);
    auto ext = one_step_extension(five).system;
    CHECK(pleasant_factor(ext).is_discrete());
}

TEST_CASE("single actions are pleasant")
{
    for (std::size_t q : {4, 6, 7})
        for (std::size_t s = 1; s < q; ++s) {
            auto rep = is_pleasant(oracle::cyclic(q, {s}));
            CHECK(rep.pleasant);
            CHECK(rep.defect.is_zero());
        }
}

TEST_CASE("the cyclic five system is not pleasant but its extension is")
{
    auto five = oracle::cyclic(5, {1, 2});
    auto rep = is_pleasant(five);
    CHECK_FALSE(rep.pleasant);
    CHECK(rep.defect.squared() > 0);
    REQUIRE(rep.witness);

    // Witness from direct enumeration: f1 = e0 - 1/5, f2 = e0 has limit (1/5) e0 - 1/25.
    auto f1 = Observable::indicator(5, 0) - Observable::constant(5, frac(1, 5));
    auto limit = oracle::limit(oracle::from_system(five), {f1.values(), Observable::indicator(5, 0).values()});
    CHECK(Observable(limit) == Observable::indicator(5, 0) * frac(1, 5) - Observable::constant(5, frac(1, 25)));

    auto stage = one_step_extension(five);
    CHECK(stage.system.n() == 25);
    for (const auto& w : stage.system.weights())
        CHECK(w == frac(1, 25));
    auto ext = is_pleasant(stage.system);
    CHECK(ext.pleasant);
    CHECK(ext.defect.is_zero());
    CHECK(is_extension_of(stage, five));
}

TEST_CASE("extension generators are the joining actions")
{
    auto five = oracle::cyclic(5, {1, 2});
    auto stage = one_step_extension(five);
    auto jm = furstenberg_joining(five);
    REQUIRE(jm.support().size() == 25);
    for (State s = 0; s < 25; ++s) {
        const auto& t = jm.support()[s];
        // T1 lifts to (+1, +2), T2 lifts to (+2, +2).
        Tuple up1{(t[0] + 1) % 5, (t[1] + 2) % 5};
        Tuple up2{(t[0] + 2) % 5, (t[1] + 2) % 5};
        CHECK(jm.support()[stage.system.generator(0, 0)(s)] == up1);
        CHECK(jm.support()[stage.system.generator(1, 0)(s)] == up2);
        CHECK(stage.factor_map[s] == t[0]);
    }
}

TEST_CASE("single-action extension is the system itself")
{
    auto six = oracle::cyclic(6, {1});
    auto stage = one_step_extension(six);
    CHECK(stage.system.n() == 6);
    CHECK(stage.system.generator(0, 0) == six.generator(0, 0));
}

TEST_CASE("extensions carry limits and weights down")
{
    oracle::Fuzz fz(67);
    for (const auto& c : oracle::finite_corpus()) {
        auto stage = one_step_extension(c.system);
        CHECK(is_extension_of(stage, c.system));
        std::vector<Rational> pushed(c.system.n(), Q(0));
        for (State s = 0; s < stage.system.n(); ++s)
            pushed[stage.factor_map[s]] += stage.system.weight(s);
        CHECK(pushed == c.system.weights());
        for (int trial = 0; trial < 3; ++trial) {
            auto fs = fz.tuple(c.system.n(), c.system.d());
            std::vector<Observable> up;
            for (const auto& f : fs)
                up.push_back(pullback(f, stage.factor_map));
            CHECK(exact_limit(stage.system, up) == pullback(exact_limit(c.system, fs), stage.factor_map));
        }
    }
}

TEST_CASE("odd prime cyclic scenarios become pleasant after one step")
{
    for (const auto& c : oracle::finite_corpus()) {
        if (c.name != "cyclic-5" && c.name != "cyclic-7" && c.name != "cyclic-5-d3")
            continue;
        auto rep = is_pleasant(one_step_extension(c.system).system);
        CHECK_MESSAGE(rep.defect.is_zero(), c.name);
    }
}

TEST_CASE("characteristic tuple property on pleasant systems")
{
    for (const auto& c : oracle::finite_corpus()) {
        auto tower = iterate_extensions(c.system, 2);
        if (!tower.stabilized())
            continue;
        const auto& sys = tower.stages.empty() ? c.system : tower.stages.back().system;
        if (sys.d() < 2 || sys.n() > 100)
            continue;
        auto xi = pleasant_factor(sys);
        for (State x1 = 0; x1 < sys.n(); ++x1) {
            auto e = Observable::indicator(sys.n(), x1);
            auto proj = cond_expect(sys, e, xi);
            auto a = basis_limits(sys, e);
            auto b = basis_limits(sys, proj);
            std::erase_if(a, [](const auto& kv) { return kv.second.is_zero(); });
            std::erase_if(b, [](const auto& kv) { return kv.second.is_zero(); });
            REQUIRE(a == b);
        }
    }
}

TEST_CASE("extension towers")
{
    auto single = iterate_extensions(oracle::cyclic(6, {1}), 3);
    CHECK(single.stabilized());
    CHECK(single.stages.empty());

    auto five = iterate_extensions(oracle::cyclic(5, {1, 2}), 3);
    CHECK(five.verdict == TowerVerdict::PleasantAtStage);
    CHECK(five.stages.size() == 1);

    auto capped = iterate_extensions(oracle::cyclic(5, {1, 2}), 0);
    CHECK(capped.verdict == TowerVerdict::MaxStagesReached);

    auto starved = iterate_extensions(oracle::cyclic(5, {1, 2}), 3, 10);
    CHECK(starved.verdict == TowerVerdict::BudgetExceeded);
    CHECK_THROWS_AS(is_pleasant(oracle::cyclic(5, {1, 2}), 10), BudgetExceeded);
    CHECK_THROWS_AS(one_step_extension(oracle::cyclic(5, {1, 2}), 10), BudgetExceeded);
}

TEST_CASE("even modulus towers are recorded")
{
    // Observed outcome, kept as a regression value rather than a claim.
    auto four = iterate_extensions(oracle::cyclic(4, {1, 2}), 3);
    CHECK(four.verdict == TowerVerdict::PleasantAtStage);
    CHECK(four.stages.size() == 1);
    auto six = iterate_extensions(oracle::cyclic(6, {1, 2}), 3);
    CHECK(six.verdict == TowerVerdict::PleasantAtStage);
    CHECK(six.stages.size() == 1);
}

TEST_CASE("decomposition into constituent products")
{
    auto ext = one_step_extension(oracle::cyclic(5, {1, 2})).system;
    auto parts = pleasant_constituents(ext);

    auto c = pleasant_decompose(ext, Observable::constant(ext.n(), frac(3, 4)), parts);
    REQUIRE(c.size() == 1);
    Observable prod = Observable::constant(ext.n(), 1);
    for (const auto& g : c[0])
        prod = prod * g;
    CHECK(prod == Observable::constant(ext.n(), frac(3, 4)));

    oracle::Fuzz fz(71);
    for (State x = 0; x < ext.n(); ++x) {
        auto e = Observable::indicator(ext.n(), x);
        auto tuples = pleasant_decompose(ext, e, parts);
        REQUIRE(tuples.size() == 1);
        for (std::size_t i = 0; i < parts.size(); ++i)
            CHECK(is_measurable(tuples[0][i], parts[i]));
        Observable sum = Observable::constant(ext.n(), 0);
        for (const auto& t : tuples) {
            Observable p = Observable::constant(ext.n(), 1);
            for (const auto& g : t)
                p = p * g;
            sum += p;
        }
        CHECK(sum == e);
    }
    auto five = oracle::cyclic(5, {1, 2});
    CHECK_THROWS_AS(pleasant_decompose(five, Observable::indicator(5, 0), pleasant_constituents(five)),
                    NotMeasurable);
}

TEST_CASE("reduction of limits over pleasant factors")
{
    auto five = oracle::cyclic(5, {1, 2});
    Observable f2{1, 0, frac(1, 2), 0, 3};
    auto red = reduce_pleasant_limit(five, {{Observable::constant(5, frac(5, 2)), Observable::constant(5, 1)}}, {f2});
    CHECK(red.equal);
    auto sigma2 = isotropy_partition(five, SubgroupSpec::action_subgroup(1, 2, 1));
    CHECK(red.reduced == cond_expect(five, f2, sigma2) * frac(5, 2));

    auto ones = reduce_pleasant_limit(five, {{Observable::constant(5, 1), Observable::constant(5, 1)}},
                                      {Observable::indicator(5, 3)});
    CHECK(ones.equal);
    CHECK(ones.direct == exact_limit(five, {Observable::constant(5, 1), Observable::indicator(5, 3)}));

    auto ext = one_step_extension(five).system;
    auto parts = pleasant_constituents(ext);
    oracle::Fuzz fz(73);
    for (int trial = 0; trial < 10; ++trial) {
        auto tuples = pleasant_decompose(ext, fz.observable(ext.n()), parts);
        auto red2 = reduce_pleasant_limit(ext, tuples, {fz.observable(ext.n())});
        CHECK(red2.equal);
    }
    CHECK_THROWS_AS(reduce_pleasant_limit(five, {{Observable::indicator(5, 0), Observable::constant(5, 1)}},
                                          {Observable::indicator(5, 0)}),
                    InvarianceViolated);
}
