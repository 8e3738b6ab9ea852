#include "ergo/averages.hpp"

#include "ergo/error.hpp"

#include <numeric>

namespace ergo {

namespace {

std::vector<std::size_t> all_actions(const FiniteSystem& sys)
{
    std::vector<std::size_t> a(sys.d());
    std::iota(a.begin(), a.end(), std::size_t{0});
    return a;
}

void require_tuple(const FiniteSystem& sys, const std::vector<Observable>& fs)
{
    if (fs.size() != sys.d())
        throw DimensionMismatch("expected " + std::to_string(sys.d()) + " observables, got " +
                                std::to_string(fs.size()));
    for (const auto& f : fs)
        if (f.size() != sys.n())
            throw DimensionMismatch("observable length differs from state count");
}

std::vector<std::vector<Rational>> raw_values(const std::vector<Observable>& fs)
{
    std::vector<std::vector<Rational>> v;
    v.reserve(fs.size());
    for (const auto& f : fs)
        v.push_back(f.values());
    return v;
}

void require_box(const FiniteSystem& sys, const FolnerBox& box)
{
    if (box.lengths.size() != sys.r() || box.base.size() != sys.r())
        throw DimensionMismatch("box rank differs from r");
    for (auto len : box.lengths)
        if (len == 0)
            throw DimensionMismatch("box edge lengths must be positive");
}

} // namespace

std::uint64_t FolnerBox::volume() const
{
    std::uint64_t v = 1;
    for (auto len : lengths)
        v *= len;
    return v;
}

LatticePoint FolnerBox::point(std::uint64_t index) const
{
    LatticePoint p(lengths.size());
    for (std::size_t j = lengths.size(); j-- > 0;) {
        p[j] = base[j] + static_cast<std::int64_t>(index % lengths[j]);
        index /= lengths[j];
    }
    return p;
}

FolnerBox FolnerBox::full_period(const PeriodBox& p, std::vector<std::int64_t> base)
{
    if (base.empty())
        base.assign(p.periods.size(), 0);
    return {p.periods, std::move(base)};
}

Observable truncated_average(const FiniteSystem& sys, const std::vector<Observable>& fs, const FolnerBox& box)
{
    require_tuple(sys, fs);
    require_box(sys, box);
    auto values = raw_values(fs);
    auto actions = all_actions(sys);
    return Observable(detail::lattice_average<Rational>(sys, actions, values, box.volume(),
                                                       [&](std::uint64_t k) { return box.point(k); }));
}

Observable truncated_average(const FiniteSystem& sys, const std::vector<Observable>& fs,
                             const std::vector<LatticePoint>& points)
{
    require_tuple(sys, fs);
    for (const auto& p : points)
        if (p.size() != sys.r())
            throw DimensionMismatch("lattice point rank differs from r");
    auto values = raw_values(fs);
    auto actions = all_actions(sys);
    return Observable(detail::lattice_average<Rational>(sys, actions, values, points.size(),
                                                       [&](std::uint64_t k) { return points[k]; }));
}

Observable exact_limit(const FiniteSystem& sys, const std::vector<Observable>& fs)
{
    require_tuple(sys, fs);
    return truncated_average(sys, fs, FolnerBox::full_period(period_box(sys)));
}

Observable exact_limit(const FiniteSystem& sys, std::span<const std::size_t> actions,
                       const std::vector<Observable>& fs)
{
    if (actions.size() != fs.size())
        throw DimensionMismatch("one observable per action expected");
    if (actions.empty())
        return Observable::constant(sys.n(), 1);
    auto box = FolnerBox::full_period(period_box(sys, actions));
    auto values = raw_values(fs);
    return Observable(detail::lattice_average<Rational>(sys, actions, values, box.volume(),
                                                       [&](std::uint64_t k) { return box.point(k); }));
}

SqrtRational deviation_bound(const FiniteSystem& sys, const std::vector<Observable>& fs, const FolnerBox& box)
{
    require_tuple(sys, fs);
    require_box(sys, box);
    PeriodBox p = period_box(sys);
    Rational full_fraction = 1;
    for (std::size_t j = 0; j < sys.r(); ++j) {
        std::uint64_t full = box.lengths[j] / p.periods[j] * p.periods[j];
        full_fraction *= Rational(static_cast<unsigned long>(full)) /
                         Rational(static_cast<unsigned long>(box.lengths[j]));
    }
    Rational gap = 1 - full_fraction;
    Rational sq = 4 * l2_norm_sq(sys, fs[0]) * gap * gap;
    for (std::size_t i = 1; i < fs.size(); ++i) {
        Rational m = linf_norm(sys, fs[i]);
        sq *= m * m;
    }
    return SqrtRational(sq);
}

AverageReport average_report(const FiniteSystem& sys, const std::vector<Observable>& fs, const FolnerBox& box)
{
    AverageReport rep{box, truncated_average(sys, fs, box), exact_limit(sys, fs), {}, {}};
    rep.deviation = l2_norm(sys, rep.truncated - rep.limit);
    rep.bound = deviation_bound(sys, fs, box);
    return rep;
}

ContractiveCheck contractive_check(const FiniteSystem& sys, const std::vector<Observable>& fs,
                                   const FolnerBox& box)
{
    ContractiveCheck c;
    c.lhs = l2_norm(sys, truncated_average(sys, fs, box));
    Rational rhs_sq = l2_norm_sq(sys, fs[0]);
    for (std::size_t i = 1; i < fs.size(); ++i) {
        Rational m = linf_norm(sys, fs[i]);
        rhs_sq *= m * m;
    }
    c.rhs = SqrtRational(rhs_sq);
    c.holds = c.lhs <= c.rhs;
    return c;
}

Rational vdc_correlation(const FiniteSystem& sys, const std::vector<Observable>& fs, const LatticePoint& m)
{
    require_tuple(sys, fs);
    if (m.size() != sys.r())
        throw DimensionMismatch("shift rank differs from r");
    std::vector<Observable> shifted;
    shifted.reserve(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i)
        shifted.push_back(fs[i] * compose(fs[i], action_image(sys, i, m)));
    return integral(sys, exact_limit(sys, shifted));
}

VdcCorrelator::VdcCorrelator(const FiniteSystem& sys, std::vector<Observable> fs)
    : sys_(sys), fs_(std::move(fs)), periods_(period_box(sys))
{
    require_tuple(sys_, fs_);
}

const Rational& VdcCorrelator::operator()(const LatticePoint& m)
{
    if (m.size() != sys_.r())
        throw DimensionMismatch("shift rank differs from r");
    LatticePoint residue(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) {
        auto p = static_cast<std::int64_t>(periods_.periods[j]);
        residue[j] = ((m[j] % p) + p) % p;
    }
    auto it = cache_.find(residue);
    if (it == cache_.end())
        it = cache_.emplace(residue, vdc_correlation(sys_, fs_, residue)).first;
    return it->second;
}

VdcIdentity vdc_identity_check(const FiniteSystem& sys, const std::vector<Observable>& fs)
{
    VdcIdentity out;
    out.lhs_sq = l2_norm_sq(sys, exact_limit(sys, fs));

    VdcCorrelator gamma(sys, fs);
    auto box = FolnerBox::full_period(gamma.periods());
    Rational sum = 0;
    for (std::uint64_t k = 0; k < box.volume(); ++k)
        sum += gamma(box.point(k));
    out.rhs_sq = sum / Rational(static_cast<unsigned long>(box.volume()));
    out.holds = out.lhs_sq == out.rhs_sq;
    return out;
}

} // namespace ergo

namespace ergo {

std::map<std::vector<State>, Observable> basis_limits(const FiniteSystem& sys, const Observable& f1)
{
    if (f1.size() != sys.n())
        throw DimensionMismatch("observable length differs from state count");
    auto box = FolnerBox::full_period(period_box(sys));
    std::map<std::vector<State>, Observable> acc;
    std::vector<std::vector<State>> imgs(sys.d());
    std::vector<State> key(sys.d() - 1);
    for (std::uint64_t k = 0; k < box.volume(); ++k) {
        LatticePoint p = box.point(k);
        for (std::size_t i = 0; i < sys.d(); ++i)
            imgs[i] = action_image(sys, i, p);
        for (State x = 0; x < sys.n(); ++x) {
            const Rational& v = f1[imgs[0][x]];
            if (sgn(v) == 0)
                continue;
            for (std::size_t i = 1; i < sys.d(); ++i)
                key[i - 1] = imgs[i][x];
            auto it = acc.find(key);
            if (it == acc.end())
                it = acc.emplace(key, Observable::constant(sys.n(), 0)).first;
            it->second[x] += v;
        }
    }
    Rational volume(static_cast<unsigned long>(box.volume()));
    for (auto& [_, limit] : acc)
        limit *= 1 / volume;
    return acc;
}

} // namespace ergo
