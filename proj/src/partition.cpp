#include "ergo/partition.hpp"

#include "ergo/error.hpp"

#include <map>
#include <numeric>

namespace ergo {

namespace {

struct DisjointSets {
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
    std::size_t find(std::size_t x)
    {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b)
            parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::size_t> parent;
};

Partition orbits(const FiniteSystem& sys, const std::vector<std::vector<State>>& maps)
{
    DisjointSets sets(sys.n());
    for (const auto& m : maps)
        for (State x = 0; x < sys.n(); ++x)
            sets.unite(x, m[x]);
    std::vector<std::size_t> ids(sys.n());
    for (State x = 0; x < sys.n(); ++x)
        ids[x] = sets.find(x);
    return Partition::from_labels(sys, ids);
}

} // namespace

Partition Partition::from_labels(const FiniteSystem& sys, const std::vector<std::size_t>& cell_ids)
{
    return from_labels(sys.weights(), cell_ids);
}

Partition Partition::from_labels(const std::vector<Rational>& weights, const std::vector<std::size_t>& cell_ids)
{
    if (weights.size() != cell_ids.size())
        throw DimensionMismatch("partition labels do not match state count");
    Partition p;
    p.weights_ = weights;
    p.cell_of_.resize(cell_ids.size());
    // Scanning states in order numbers cells by their least element.
    std::map<std::size_t, std::size_t> renumber;
    for (std::size_t x = 0; x < cell_ids.size(); ++x) {
        auto [it, fresh] = renumber.try_emplace(cell_ids[x], p.cells_.size());
        if (fresh) {
            p.cells_.emplace_back();
            p.cell_weights_.emplace_back(0);
        }
        p.cell_of_[x] = it->second;
        p.cells_[it->second].push_back(static_cast<State>(x));
        p.cell_weights_[it->second] += weights[x];
    }
    return p;
}

Partition Partition::singletons(const FiniteSystem& sys)
{
    std::vector<std::size_t> ids(sys.n());
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    return from_labels(sys, ids);
}

Partition Partition::whole(const FiniteSystem& sys)
{
    return from_labels(sys, std::vector<std::size_t>(sys.n(), 0));
}

SubgroupSpec SubgroupSpec::whole(std::size_t r, std::size_t d)
{
    SubgroupSpec s;
    for (std::size_t k = 0; k < r * d; ++k) {
        GroupElement g = GroupElement::zero(r, d);
        g.coords[k] = 1;
        s.generators.push_back(std::move(g));
    }
    return s;
}

SubgroupSpec SubgroupSpec::action_subgroup(std::size_t r, std::size_t d, std::size_t action)
{
    SubgroupSpec s;
    for (std::size_t j = 0; j < r; ++j) {
        GroupElement g = GroupElement::zero(r, d);
        g.coords[action * r + j] = 1;
        s.generators.push_back(std::move(g));
    }
    return s;
}

Partition isotropy_partition(const FiniteSystem& sys, const SubgroupSpec& gamma)
{
    std::vector<std::vector<State>> maps;
    for (const auto& g : gamma.generators) {
        std::vector<State> img(sys.n());
        for (State x = 0; x < sys.n(); ++x)
            img[x] = act(sys, g, x);
        maps.push_back(std::move(img));
    }
    return orbits(sys, maps);
}

Partition difference_isotropy(const FiniteSystem& sys, std::size_t i, std::size_t j)
{
    if (i >= sys.d() || j >= sys.d() || i == j)
        throw DimensionMismatch("difference_isotropy needs two distinct valid actions");
    SubgroupSpec gamma;
    for (std::size_t k = 0; k < sys.r(); ++k) {
        GroupElement g = GroupElement::zero(sys.r(), sys.d());
        g.coords[i * sys.r() + k] = 1;
        g.coords[j * sys.r() + k] = -1;
        gamma.generators.push_back(std::move(g));
    }
    return isotropy_partition(sys, gamma);
}

Partition join(const std::vector<Partition>& parts)
{
    if (parts.empty())
        throw DimensionMismatch("join of an empty list");
    const std::size_t n = parts.front().state_count();
    for (const auto& p : parts)
        if (p.state_count() != n)
            throw DimensionMismatch("join of partitions over different state sets");
    std::map<std::vector<std::size_t>, std::size_t> key_ids;
    std::vector<std::size_t> ids(n);
    for (std::size_t x = 0; x < n; ++x) {
        std::vector<std::size_t> key;
        key.reserve(parts.size());
        for (const auto& p : parts)
            key.push_back(p.cell_of(static_cast<State>(x)));
        ids[x] = key_ids.try_emplace(std::move(key), key_ids.size()).first->second;
    }
    return Partition::from_labels(parts.front().state_weights(), ids);
}

Observable cond_expect(const FiniteSystem& sys, const Observable& f, const Partition& xi)
{
    if (f.size() != sys.n() || xi.state_count() != sys.n())
        throw DimensionMismatch("cond_expect: sizes differ");
    Observable out = Observable::constant(sys.n(), 0);
    for (std::size_t c = 0; c < xi.cell_count(); ++c) {
        Rational mass = 0, acc = 0;
        for (auto x : xi.cell(c)) {
            mass += sys.weight(x);
            acc += sys.weight(x) * f[x];
        }
        if (sgn(mass) == 0)
            throw ZeroWeightCell("cell " + std::to_string(c) + " has zero weight");
        Rational avg = acc / mass;
        for (auto x : xi.cell(c))
            out[x] = avg;
    }
    return out;
}

bool is_measurable(const Observable& f, const Partition& xi)
{
    if (f.size() != xi.state_count())
        throw DimensionMismatch("is_measurable: sizes differ");
    for (const auto& cell : xi.cells())
        for (auto x : cell)
            if (f[x] != f[cell.front()])
                return false;
    return true;
}

bool is_invariant(const FiniteSystem& sys, const Partition& xi)
{
    for (const auto& g : sys.generators())
        for (const auto& cell : xi.cells()) {
            std::size_t target = xi.cell_of(g(cell.front()));
            if (xi.cell(target).size() != cell.size())
                return false;
            for (auto x : cell)
                if (xi.cell_of(g(x)) != target)
                    return false;
        }
    return true;
}

} // namespace ergo
