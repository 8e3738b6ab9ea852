#include "oracle.hpp"

#include "ergo/error.hpp"
#include "ergo/partition.hpp"

#include <doctest.h>

using namespace ergo;
using oracle::frac;
using oracle::Q;

namespace {

using Cells = std::vector<std::vector<State>>;

Partition cells_of(const FiniteSystem& sys, const Cells& cells)
{
    std::vector<std::size_t> ids(sys.n());
    for (std::size_t c = 0; c < cells.size(); ++c)
        for (auto x : cells[c])
            ids[x] = c;
    return Partition::from_labels(sys, ids);
}

/// Every partition of {0..n-1}, as restricted growth strings.
std::vector<std::vector<std::size_t>> all_partitions(std::size_t n)
{
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> a(n, 0);
    auto rec = [&](auto&& self, std::size_t k, std::size_t top) -> void {
        if (k == n) {
            out.push_back(a);
            return;
        }
        for (std::size_t v = 0; v <= top + 1; ++v) {
            a[k] = v;
            self(self, k + 1, std::max(top, v));
        }
    };
    if (n > 0)
        rec(rec, 1, 0);
    return out;
}

} // namespace

TEST_CASE("isotropy partitions")
{
    auto five = oracle::cyclic(5, {1, 2});
    CHECK(isotropy_partition(five, SubgroupSpec::trivial()).is_discrete());
    CHECK(isotropy_partition(five, SubgroupSpec::whole(1, 2)).cells() == Cells{{0, 1, 2, 3, 4}});

    auto six = oracle::cyclic(6, {2, 3});
    SubgroupSpec plus_two{{GroupElement{{1, 0}}}};
    CHECK(isotropy_partition(six, plus_two).cells() == Cells{{0, 2, 4}, {1, 3, 5}});
}

TEST_CASE("difference isotropy")
{
    auto same = oracle::cyclic(5, {2, 2});
    CHECK(difference_isotropy(same, 0, 1).is_discrete());
    CHECK(difference_isotropy(oracle::cyclic(5, {1, 2}), 0, 1).cells() == Cells{{0, 1, 2, 3, 4}});
    CHECK(difference_isotropy(oracle::cyclic(6, {2, 4}), 0, 1).cells() == Cells{{0, 2, 4}, {1, 3, 5}});
}

TEST_CASE("isotropy partitions match orbit search and are invariant")
{
    for (const auto& c : oracle::finite_corpus()) {
        auto o = oracle::from_system(c.system);
        for (std::size_t i = 0; i < c.system.d(); ++i) {
            auto part = isotropy_partition(c.system, SubgroupSpec::action_subgroup(c.system.r(), c.system.d(), i));
            std::vector<oracle::Perm> gens(o.gens.begin() + i * o.r, o.gens.begin() + (i + 1) * o.r);
            auto label = oracle::orbits(o.n, gens);
            for (State x = 0; x < o.n; ++x)
                for (State y = 0; y < o.n; ++y)
                    REQUIRE((part.cell_of(x) == part.cell_of(y)) == (label[x] == label[y]));
            CHECK(is_invariant(c.system, part));
            for (std::size_t k = 0; k < c.system.d(); ++k)
                if (k != i)
                    CHECK(is_invariant(c.system, difference_isotropy(c.system, i, k)));
        }
    }
}

TEST_CASE("join")
{
    auto six = oracle::cyclic(6, {1});
    auto parity = cells_of(six, {{0, 2, 4}, {1, 3, 5}});
    auto thirds = cells_of(six, {{0, 3}, {1, 4}, {2, 5}});
    CHECK(join({parity, thirds}).is_discrete());
    CHECK(join({parity, Partition::whole(six)}) == parity);
    CHECK(join({parity, parity}) == parity);
    CHECK_THROWS_AS(join({}), DimensionMismatch);
    CHECK_THROWS_AS(join({parity, Partition::whole(oracle::cyclic(5, {1}))}), DimensionMismatch);
}

TEST_CASE("join is associative, commutative and idempotent on every partition of four states")
{
    auto four = oracle::cyclic(4, {1});
    std::vector<Partition> all;
    for (const auto& ids : all_partitions(4))
        all.push_back(Partition::from_labels(four, ids));
    REQUIRE(all.size() == 15);
    for (const auto& a : all) {
        CHECK(join({a, a}) == a);
        for (const auto& b : all) {
            auto ab = join({a, b});
            REQUIRE(ab == join({b, a}));
            for (State x = 0; x < 4; ++x)
                for (State y = 0; y < 4; ++y)
                    REQUIRE((ab.cell_of(x) == ab.cell_of(y)) ==
                            (a.cell_of(x) == a.cell_of(y) && b.cell_of(x) == b.cell_of(y)));
            for (const auto& c : all)
                REQUIRE(join({join({a, b}), c}) == join({a, join({b, c})}));
        }
    }
}

TEST_CASE("conditional expectation examples")
{
    auto four = oracle::cyclic(4, {1});
    auto halves = cells_of(four, {{0, 2}, {1, 3}});
    auto e = cond_expect(four, Observable::indicator(4, 0), halves);
    CHECK(e == Observable{frac(1, 2), 0, frac(1, 2), 0});

    auto c = Observable::constant(4, frac(-3, 7));
    CHECK(cond_expect(four, c, halves) == c);
    Observable f{1, frac(2, 3), -5, 0};
    CHECK(cond_expect(four, f, Partition::singletons(four)) == f);
    CHECK(cond_expect(four, f, Partition::whole(four)) == Observable::constant(4, frac(-10, 12)));
}

TEST_CASE("measurability")
{
    auto four = oracle::cyclic(4, {1});
    auto halves = cells_of(four, {{0, 2}, {1, 3}});
    CHECK(is_measurable(Observable::constant(4, 3), halves));
    CHECK_FALSE(is_measurable(Observable::indicator(4, 0), Partition::whole(four)));
    oracle::Fuzz fz(2);
    for (int t = 0; t < 20; ++t)
        CHECK(is_measurable(cond_expect(four, fz.observable(4), halves), halves));
}

TEST_CASE("zero-weight cells are refused")
{
    RawSystem raw{"null", 1, 1, 3, {frac(1, 2), frac(1, 2), Q(0)}, {{0, 0, {1, 0, 2}}}, {}};
    auto sys = validate_system(raw);
    auto xi = Partition::from_labels(sys, {0, 0, 1});
    CHECK_THROWS_AS(cond_expect(sys, Observable{1, 2, 3}, xi), ZeroWeightCell);
}

TEST_CASE("conditional expectation is an idempotent orthogonal projection with the tower property")
{
    oracle::Fuzz fz(17);
    auto six = oracle::cyclic(6, {1});
    auto parts = all_partitions(6);
    for (int trial = 0; trial < 150; ++trial) {
        auto fine = Partition::from_labels(six, parts[fz.raw() % parts.size()]);
        auto other = Partition::from_labels(six, parts[fz.raw() % parts.size()]);
        auto coarse = join({fine, other}) == fine ? other : fine;
        auto refined = join({fine, other});
        auto f = fz.observable(6);

        auto e = cond_expect(six, f, fine);
        CHECK(cond_expect(six, e, fine) == e);
        CHECK(cond_expect(six, cond_expect(six, f, refined), coarse) == cond_expect(six, f, coarse));
        for (std::size_t c = 0; c < fine.cell_count(); ++c)
            CHECK(inner(six, f - e, Observable::indicator(6, fine.cell(c))) == 0);

        std::vector<std::uint32_t> label(6);
        for (State x = 0; x < 6; ++x)
            label[x] = static_cast<std::uint32_t>(fine.cell(fine.cell_of(x)).front());
        CHECK(e.values() == oracle::cond_expect(six.weights(), f.values(), label));
    }
}
