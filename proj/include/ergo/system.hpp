#pragma once

// Finite measure-preserving Z^{rd}-systems: a weighted state space with r*d
// commuting permutation generators. Generator (i, j) is axis j of action i;
// the C++ API indexes both from zero.

#include "ergo/rational.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ergo {

using State = std::uint32_t;

/// A bijection of {0..n-1} with its inverse and cycle structure.
class Permutation {
public:
    Permutation() = default;
    /// Throws ValidationError(Malformed) if `image` is not a bijection.
    explicit Permutation(std::vector<State> image);
    static Permutation identity(std::size_t n);

    std::size_t size() const { return image_.size(); }
    State operator()(State x) const { return image_[x]; }
    State inverse(State x) const { return inverse_[x]; }
    /// sigma^k(x) for any integer k, in O(1) via the cycle table.
    State power(State x, std::int64_t k) const;
    /// Least common multiple of the cycle lengths.
    std::uint64_t order() const;
    bool is_identity() const;

    const std::vector<State>& image() const { return image_; }

    friend bool operator==(const Permutation& a, const Permutation& b) { return a.image_ == b.image_; }

private:
    std::vector<State> image_;
    std::vector<State> inverse_;
    std::vector<std::uint32_t> cycle_of_;
    std::vector<std::uint32_t> position_;
    std::vector<std::vector<State>> cycles_;
};

/// Unvalidated system description, as read from a system file.
struct RawGenerator {
    std::size_t action = 0;
    std::size_t axis = 0;
    std::vector<State> perm;
};

struct RawSystem {
    std::string name;
    std::size_t r = 1;
    std::size_t d = 1;
    std::size_t n = 0;
    std::vector<Rational> weights;
    std::vector<RawGenerator> generators;
    std::vector<std::string> labels;
};

class FiniteSystem;
FiniteSystem validate_system(const RawSystem& candidate);

/// Immutable once validated; only validate_system constructs one.
class FiniteSystem {
public:
    const std::string& name() const { return name_; }
    std::size_t n() const { return weights_.size(); }
    std::size_t r() const { return r_; }
    std::size_t d() const { return d_; }
    const std::vector<Rational>& weights() const { return weights_; }
    const Rational& weight(State x) const { return weights_[x]; }
    const Permutation& generator(std::size_t action, std::size_t axis) const
    {
        return generators_[action * r_ + axis];
    }
    const std::vector<Permutation>& generators() const { return generators_; }
    /// Label of x, or its decimal index when the system has no labels.
    std::string label(State x) const;
    const std::vector<std::string>& labels() const { return labels_; }

    RawSystem to_raw() const;

private:
    friend FiniteSystem validate_system(const RawSystem&);
    FiniteSystem() = default;

    std::string name_;
    std::size_t r_ = 1;
    std::size_t d_ = 1;
    std::vector<Rational> weights_;
    std::vector<Permutation> generators_;
    std::vector<std::string> labels_;
};

/// An element of Z^{rd}; coords[i * r + j] is the exponent of generator (i, j).
struct GroupElement {
    std::vector<std::int64_t> coords;

    static GroupElement zero(std::size_t r, std::size_t d);
    /// The element n placed in the copy of Z^r belonging to `action`.
    static GroupElement on_action(std::size_t r, std::size_t d, std::size_t action,
                                  std::span<const std::int64_t> n);
    GroupElement operator+(const GroupElement& other) const;
    GroupElement operator-() const;
    friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

struct PeriodBox {
    std::vector<std::uint64_t> periods;
    std::uint64_t volume() const;
};

State act(const FiniteSystem& sys, const GroupElement& g, State x);
/// T_action^n (x) for n in Z^r.
State act(const FiniteSystem& sys, std::size_t action, std::span<const std::int64_t> n, State x);
/// The whole permutation T_action^n as an image array.
std::vector<State> action_image(const FiniteSystem& sys, std::size_t action,
                                std::span<const std::int64_t> n);

/// P_j = lcm over the chosen actions of the order of generator (i, j).
PeriodBox period_box(const FiniteSystem& sys, std::span<const std::size_t> actions);
PeriodBox period_box(const FiniteSystem& sys);

/// (g_* m)(y) = m(g^{-1} y).
std::vector<Rational> pushforward(const FiniteSystem& sys, const GroupElement& g,
                                  std::span<const Rational> m);

struct SupportRestriction;
/// Drops zero-weight states. The zero-weight set is invariant, so generators restrict.
SupportRestriction normalize_support(const FiniteSystem& sys);

/// The system keeping only the listed actions, in the listed order.
FiniteSystem restrict_actions(const FiniteSystem& sys, std::span<const std::size_t> actions);

struct SupportRestriction {
    FiniteSystem system;
    std::vector<State> kept; ///< kept[new index] = old index
};

} // namespace ergo
