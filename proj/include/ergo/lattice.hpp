#pragma once

// Lattice sums of products of observables along several actions. Shared by the
// exact engine (V = Rational) and the complex bridge (V = std::complex<double>).

#include "ergo/error.hpp"
#include "ergo/parallel.hpp"
#include "ergo/system.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace ergo {

using LatticePoint = std::vector<std::int64_t>;

/// A box prod_j [base_j, base_j + lengths_j) in Z^r.
struct FolnerBox {
    std::vector<std::uint64_t> lengths;
    std::vector<std::int64_t> base;

    std::uint64_t volume() const;
    /// Row-major (last axis fastest) enumeration order.
    LatticePoint point(std::uint64_t index) const;
    static FolnerBox full_period(const PeriodBox& p, std::vector<std::int64_t> base = {});
};

namespace detail {

inline Rational divide(const Rational& v, std::uint64_t count)
{
    return v / Rational(static_cast<unsigned long>(count));
}
inline std::complex<double> divide(const std::complex<double>& v, std::uint64_t count)
{
    return v / static_cast<double>(count);
}

/// Pointwise (1/count) sum_{k<count} prod_s fs[s](T_{actions[s]}^{point_at(k)} x).
/// Partial sums over a fixed number of chunks are merged in chunk order, so the
/// result does not depend on the worker count.
template <class V, class PointAt>
std::vector<V> lattice_average(const FiniteSystem& sys, std::span<const std::size_t> actions,
                               std::span<const std::vector<V>> fs, std::uint64_t count, PointAt&& point_at)
{
    if (actions.size() != fs.size())
        throw DimensionMismatch("one observable per action expected");
    for (const auto& f : fs)
        if (f.size() != sys.n())
            throw DimensionMismatch("observable length differs from state count");
    if (count == 0)
        throw DimensionMismatch("average over an empty set of lattice points");

    const std::size_t n = sys.n();
    constexpr std::size_t kChunks = 64;
    auto chunks = make_chunks(count, kChunks);
    auto partial = parallel_map<std::vector<V>>(chunks.size(), [&](std::size_t c) {
        std::vector<V> acc(n, V(0));
        std::vector<std::vector<State>> imgs(actions.size());
        for (std::uint64_t k = chunks[c].begin; k < chunks[c].end; ++k) {
            LatticePoint p = point_at(k);
            for (std::size_t s = 0; s < actions.size(); ++s)
                imgs[s] = action_image(sys, actions[s], p);
            for (State x = 0; x < n; ++x) {
                V term(1);
                for (std::size_t s = 0; s < actions.size(); ++s)
                    term *= fs[s][imgs[s][x]];
                acc[x] += term;
            }
        }
        return acc;
    });

    std::vector<V> out(n, V(0));
    for (const auto& part : partial)
        for (State x = 0; x < n; ++x)
            out[x] += part[x];
    for (auto& v : out)
        v = divide(v, count);
    return out;
}

} // namespace detail

} // namespace ergo
