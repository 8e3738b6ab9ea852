#include "ergo/system.hpp"

#include "ergo/error.hpp"

#include <algorithm>
#include <numeric>

namespace ergo {

namespace {

std::uint64_t checked_lcm(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t g = std::gcd(a, b);
    std::uint64_t q = a / g;
    if (q != 0 && b > UINT64_MAX / q)
        throw Error("permutation order overflows 64 bits");
    return q * b;
}

ValidationError malformed(const std::string& msg)
{
    return ValidationError(ValidationError::Kind::Malformed, msg);
}

} // namespace

Permutation::Permutation(std::vector<State> image) : image_(std::move(image))
{
    const std::size_t n = image_.size();
    inverse_.assign(n, 0);
    std::vector<bool> hit(n, false);
    for (std::size_t x = 0; x < n; ++x) {
        State y = image_[x];
        if (y >= n || hit[y])
            throw malformed("generator is not a permutation of {0.." + std::to_string(n) + "-1}");
        hit[y] = true;
        inverse_[y] = static_cast<State>(x);
    }

    cycle_of_.assign(n, 0);
    position_.assign(n, 0);
    std::vector<bool> seen(n, false);
    for (std::size_t start = 0; start < n; ++start) {
        if (seen[start])
            continue;
        std::vector<State> cycle;
        for (State x = static_cast<State>(start); !seen[x]; x = image_[x]) {
            seen[x] = true;
            cycle_of_[x] = static_cast<std::uint32_t>(cycles_.size());
            position_[x] = static_cast<std::uint32_t>(cycle.size());
            cycle.push_back(x);
        }
        cycles_.push_back(std::move(cycle));
    }
}

Permutation Permutation::identity(std::size_t n)
{
    std::vector<State> id(n);
    std::iota(id.begin(), id.end(), State{0});
    return Permutation(std::move(id));
}

State Permutation::power(State x, std::int64_t k) const
{
    const auto& cycle = cycles_[cycle_of_[x]];
    const auto len = static_cast<std::int64_t>(cycle.size());
    std::int64_t p = (static_cast<std::int64_t>(position_[x]) + k % len) % len;
    if (p < 0)
        p += len;
    return cycle[static_cast<std::size_t>(p)];
}

std::uint64_t Permutation::order() const
{
    std::uint64_t ord = 1;
    for (const auto& c : cycles_)
        ord = checked_lcm(ord, c.size());
    return ord;
}

bool Permutation::is_identity() const
{
    for (std::size_t x = 0; x < image_.size(); ++x)
        if (image_[x] != x)
            return false;
    return true;
}

FiniteSystem validate_system(const RawSystem& c)
{
    if (c.r == 0 || c.d == 0)
        throw malformed("r and d must be positive");
    if (c.n == 0)
        throw malformed("state count must be positive");
    if (c.weights.size() != c.n)
        throw malformed("expected " + std::to_string(c.n) + " weights, got " + std::to_string(c.weights.size()));
    if (!c.labels.empty() && c.labels.size() != c.n)
        throw malformed("labels must be absent or one per state");
    if (c.generators.size() != c.r * c.d)
        throw malformed("expected r*d = " + std::to_string(c.r * c.d) + " generators, got " +
                        std::to_string(c.generators.size()));

    std::vector<std::optional<Permutation>> slots(c.r * c.d);
    for (const auto& g : c.generators) {
        if (g.action >= c.d || g.axis >= c.r)
            throw malformed("generator index (" + std::to_string(g.action + 1) + "," +
                            std::to_string(g.axis + 1) + ") out of range");
        if (g.perm.size() != c.n)
            throw malformed("generator (" + std::to_string(g.action + 1) + "," + std::to_string(g.axis + 1) +
                            ") has wrong length");
        auto& slot = slots[g.action * c.r + g.axis];
        if (slot)
            throw malformed("duplicate generator (" + std::to_string(g.action + 1) + "," +
                            std::to_string(g.axis + 1) + ")");
        slot.emplace(g.perm);
    }

    Rational total = 0;
    for (const auto& w : c.weights) {
        if (sgn(w) < 0)
            throw ValidationError(ValidationError::Kind::NonProbabilityWeights, "negative weight");
        total += w;
    }
    if (total != 1)
        throw ValidationError(ValidationError::Kind::NonProbabilityWeights,
                              "weights sum to " + to_string(total) + ", not 1");

    FiniteSystem sys;
    sys.name_ = c.name;
    sys.r_ = c.r;
    sys.d_ = c.d;
    sys.weights_ = c.weights;
    sys.labels_ = c.labels;
    for (auto& s : slots)
        sys.generators_.push_back(std::move(*s));

    const auto& gens = sys.generators_;
    for (std::size_t k = 0; k < gens.size(); ++k) {
        for (State x = 0; x < c.n; ++x) {
            if (c.weights[gens[k](x)] != c.weights[x]) {
                ValidationError e(ValidationError::Kind::MeasureNotPreserved,
                                  "generator " + std::to_string(k) + " moves state " + std::to_string(x) +
                                      " to a state of different weight");
                e.generator_a = k;
                e.witness_state = x;
                throw e;
            }
        }
    }
    for (std::size_t a = 0; a < gens.size(); ++a) {
        for (std::size_t b = a + 1; b < gens.size(); ++b) {
            for (State x = 0; x < c.n; ++x) {
                if (gens[a](gens[b](x)) != gens[b](gens[a](x))) {
                    ValidationError e(ValidationError::Kind::NonCommuting,
                                      "generators " + std::to_string(a) + " and " + std::to_string(b) +
                                          " do not commute at state " + std::to_string(x));
                    e.generator_a = a;
                    e.generator_b = b;
                    e.witness_state = x;
                    throw e;
                }
            }
        }
    }
    return sys;
}

std::string FiniteSystem::label(State x) const
{
    return labels_.empty() ? std::to_string(x) : labels_[x];
}

RawSystem FiniteSystem::to_raw() const
{
    RawSystem raw;
    raw.name = name_;
    raw.r = r_;
    raw.d = d_;
    raw.n = n();
    raw.weights = weights_;
    raw.labels = labels_;
    for (std::size_t i = 0; i < d_; ++i)
        for (std::size_t j = 0; j < r_; ++j)
            raw.generators.push_back({i, j, generator(i, j).image()});
    return raw;
}

GroupElement GroupElement::zero(std::size_t r, std::size_t d)
{
    return {std::vector<std::int64_t>(r * d, 0)};
}

GroupElement GroupElement::on_action(std::size_t r, std::size_t d, std::size_t action,
                                     std::span<const std::int64_t> n)
{
    if (n.size() != r || action >= d)
        throw DimensionMismatch("GroupElement::on_action: bad action index or vector length");
    GroupElement g = zero(r, d);
    std::copy(n.begin(), n.end(), g.coords.begin() + static_cast<std::ptrdiff_t>(action * r));
    return g;
}

GroupElement GroupElement::operator+(const GroupElement& other) const
{
    if (coords.size() != other.coords.size())
        throw DimensionMismatch("GroupElement sizes differ");
    GroupElement out = *this;
    for (std::size_t k = 0; k < coords.size(); ++k)
        out.coords[k] += other.coords[k];
    return out;
}

GroupElement GroupElement::operator-() const
{
    GroupElement out = *this;
    for (auto& c : out.coords)
        c = -c;
    return out;
}

std::uint64_t PeriodBox::volume() const
{
    std::uint64_t v = 1;
    for (auto p : periods) {
        if (p != 0 && v > UINT64_MAX / p)
            throw Error("period box volume overflows 64 bits");
        v *= p;
    }
    return v;
}

State act(const FiniteSystem& sys, const GroupElement& g, State x)
{
    if (g.coords.size() != sys.r() * sys.d())
        throw DimensionMismatch("group element has wrong rank");
    for (std::size_t k = 0; k < g.coords.size(); ++k)
        if (g.coords[k] != 0)
            x = sys.generators()[k].power(x, g.coords[k]);
    return x;
}

State act(const FiniteSystem& sys, std::size_t action, std::span<const std::int64_t> n, State x)
{
    if (n.size() != sys.r())
        throw DimensionMismatch("lattice vector has wrong rank");
    for (std::size_t j = 0; j < n.size(); ++j)
        if (n[j] != 0)
            x = sys.generator(action, j).power(x, n[j]);
    return x;
}

std::vector<State> action_image(const FiniteSystem& sys, std::size_t action, std::span<const std::int64_t> n)
{
    std::vector<State> img(sys.n());
    for (State x = 0; x < sys.n(); ++x)
        img[x] = act(sys, action, n, x);
    return img;
}

PeriodBox period_box(const FiniteSystem& sys, std::span<const std::size_t> actions)
{
    if (actions.empty())
        throw DimensionMismatch("period_box needs at least one action");
    PeriodBox box{std::vector<std::uint64_t>(sys.r(), 1)};
    for (std::size_t j = 0; j < sys.r(); ++j)
        for (auto i : actions) {
            if (i >= sys.d())
                throw DimensionMismatch("action index out of range");
            box.periods[j] = checked_lcm(box.periods[j], sys.generator(i, j).order());
        }
    return box;
}

PeriodBox period_box(const FiniteSystem& sys)
{
    std::vector<std::size_t> all(sys.d());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return period_box(sys, all);
}

std::vector<Rational> pushforward(const FiniteSystem& sys, const GroupElement& g, std::span<const Rational> m)
{
    if (m.size() != sys.n())
        throw DimensionMismatch("measure vector has wrong length");
    std::vector<Rational> out(sys.n());
    for (State x = 0; x < sys.n(); ++x)
        out[act(sys, g, x)] = m[x];
    return out;
}

SupportRestriction normalize_support(const FiniteSystem& sys)
{
    std::vector<State> kept;
    std::vector<State> new_index(sys.n(), 0);
    for (State x = 0; x < sys.n(); ++x)
        if (sgn(sys.weight(x)) > 0) {
            new_index[x] = static_cast<State>(kept.size());
            kept.push_back(x);
        }

    RawSystem raw;
    raw.name = sys.name();
    raw.r = sys.r();
    raw.d = sys.d();
    raw.n = kept.size();
    for (auto x : kept) {
        raw.weights.push_back(sys.weight(x));
        if (!sys.labels().empty())
            raw.labels.push_back(sys.labels()[x]);
    }
    for (std::size_t i = 0; i < sys.d(); ++i)
        for (std::size_t j = 0; j < sys.r(); ++j) {
            std::vector<State> perm;
            for (auto x : kept)
                perm.push_back(new_index[sys.generator(i, j)(x)]);
            raw.generators.push_back({i, j, std::move(perm)});
        }
    return {validate_system(raw), std::move(kept)};
}

FiniteSystem restrict_actions(const FiniteSystem& sys, std::span<const std::size_t> actions)
{
    RawSystem raw = sys.to_raw();
    raw.d = actions.size();
    raw.generators.clear();
    for (std::size_t k = 0; k < actions.size(); ++k) {
        if (actions[k] >= sys.d())
            throw DimensionMismatch("action index out of range");
        for (std::size_t j = 0; j < sys.r(); ++j)
            raw.generators.push_back({k, j, sys.generator(actions[k], j).image()});
    }
    return validate_system(raw);
}

} // namespace ergo
