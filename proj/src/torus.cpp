#include "ergo/torus.hpp"

#include "ergo/error.hpp"
#include "ergo/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace ergo {

namespace {

const std::map<std::string, double>& known_symbols()
{
    static const std::map<std::string, double> table{
        {"phi", (std::sqrt(5.0) - 1.0) / 2.0},
        {"sqrt2", std::numbers::sqrt2 - 1.0},
        {"sqrt3", std::numbers::sqrt3 - 1.0},
        {"pi", std::numbers::pi - 3.0},
    };
    return table;
}

double frac(double x)
{
    x -= std::floor(x);
    return x >= 1.0 ? 0.0 : x;
}

/// frac(n * v) with the rounding error of the product carried along.
double frac_product(std::int64_t n, double v)
{
    const auto dn = static_cast<double>(n);
    double hi = dn * v;
    double lo = std::fma(dn, v, -hi);
    return frac(frac(hi) + lo);
}

struct NeumaierSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x)
    {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

std::complex<double> unit(double phase)
{
    phase -= std::nearbyint(phase);
    double angle = 2.0 * std::numbers::pi * phase;
    return {std::cos(angle), std::sin(angle)};
}

} // namespace

Angle Angle::rational(Rational q)
{
    Angle a;
    a.rational_ = std::move(q);
    return a;
}

Angle Angle::symbol(const std::string& name, Rational coeff)
{
    if (!is_known_symbol(name))
        throw std::invalid_argument("unknown irrational symbol '" + name + "'");
    Angle a;
    if (sgn(coeff) != 0)
        a.coeffs_[name] = std::move(coeff);
    return a;
}

Angle Angle::opaque(double value)
{
    Angle a;
    char buf[64];
    std::snprintf(buf, sizeof buf, "float:%.17g", value);
    a.coeffs_[buf] = 1;
    a.opaque_values_[buf] = value;
    return a;
}

bool Angle::is_known_symbol(const std::string& name)
{
    return known_symbols().count(name) != 0;
}

Angle& Angle::operator+=(const Angle& o)
{
    rational_ += o.rational_;
    for (const auto& [name, c] : o.coeffs_) {
        Rational& mine = coeffs_[name];
        mine += c;
        if (sgn(mine) == 0)
            coeffs_.erase(name);
    }
    for (const auto& [name, v] : o.opaque_values_)
        opaque_values_[name] = v;
    return *this;
}

Angle Angle::scaled(std::int64_t k) const
{
    Angle a;
    if (k == 0)
        return a;
    Rational factor(static_cast<long>(k));
    a.rational_ = rational_ * factor;
    for (const auto& [name, c] : coeffs_)
        a.coeffs_[name] = c * factor;
    a.opaque_values_ = opaque_values_;
    return a;
}

double Angle::value() const
{
    // The rational part is reduced exactly before conversion.
    Rational q = rational_;
    mpz_class floor_q;
    mpz_fdiv_q(floor_q.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    q -= floor_q;
    long double acc = q.get_d();
    for (const auto& [name, c] : coeffs_) {
        auto known = known_symbols().find(name);
        double v = known != known_symbols().end() ? known->second : opaque_values_.at(name);
        acc += static_cast<long double>(c.get_d()) * v;
    }
    acc -= std::floor(acc);
    return frac(static_cast<double>(acc));
}

bool Angle::is_integer() const
{
    bool known = false;
    for (const auto& [name, c] : coeffs_) {
        if (sgn(c) == 0)
            continue;
        if (!is_known_symbol(name))
            throw UndecidableResonance("resonance depends on the opaque rotation entry " + name.substr(6));
        known = true;
    }
    if (known)
        return false;
    return rational_.get_den() == 1;
}

TorusSystem make_torus_system(std::size_t m, std::size_t r, std::size_t d, std::vector<std::vector<Angle>> rotations)
{
    if (m == 0 || r == 0 || d == 0)
        throw DimensionMismatch("torus dimension, r and d must be positive");
    if (rotations.size() != r * d)
        throw DimensionMismatch("expected r*d rotation vectors");
    for (const auto& v : rotations)
        if (v.size() != m)
            throw DimensionMismatch("rotation vector length differs from the torus dimension");
    return TorusSystem{m, r, d, std::move(rotations)};
}

TrigObservable::TrigObservable(std::size_t m, std::vector<TrigTerm> terms) : m_(m)
{
    std::map<std::vector<std::int64_t>, std::complex<double>> merged;
    for (auto& t : terms) {
        if (t.k.size() != m)
            throw DimensionMismatch("frequency vector length differs from the torus dimension");
        merged[t.k] += t.c;
    }
    for (auto& [k, c] : merged)
        if (c != std::complex<double>(0.0, 0.0))
            terms_.push_back({k, c});
}

TrigObservable TrigObservable::constant(std::size_t m, std::complex<double> c)
{
    return TrigObservable(m, {{std::vector<std::int64_t>(m, 0), c}});
}

TrigObservable TrigObservable::character(std::vector<std::int64_t> k, std::complex<double> c)
{
    std::size_t m = k.size();
    return TrigObservable(m, {{std::move(k), c}});
}

std::complex<double> TrigObservable::operator()(const std::vector<double>& t) const
{
    if (t.size() != m_)
        throw DimensionMismatch("sample point dimension differs from the torus dimension");
    std::complex<double> s = 0.0;
    for (const auto& term : terms_) {
        double phase = 0.0;
        for (std::size_t c = 0; c < m_; ++c)
            phase += static_cast<double>(term.k[c]) * t[c];
        s += term.c * unit(phase);
    }
    return s;
}

TrigObservable TrigObservable::conjugate() const
{
    std::vector<TrigTerm> out;
    for (const auto& t : terms_) {
        std::vector<std::int64_t> k = t.k;
        for (auto& v : k)
            v = -v;
        out.push_back({std::move(k), std::conj(t.c)});
    }
    return TrigObservable(m_, std::move(out));
}

TrigObservable operator*(const TrigObservable& a, const TrigObservable& b)
{
    if (a.m_ != b.m_)
        throw DimensionMismatch("product of trig polynomials on different tori");
    std::vector<TrigTerm> out;
    for (const auto& x : a.terms_)
        for (const auto& y : b.terms_) {
            std::vector<std::int64_t> k(a.m_);
            for (std::size_t c = 0; c < a.m_; ++c)
                k[c] = x.k[c] + y.k[c];
            out.push_back({std::move(k), x.c * y.c});
        }
    return TrigObservable(a.m_, std::move(out));
}

double TrigObservable::sup_bound() const
{
    double s = 0.0;
    for (const auto& t : terms_)
        s += std::abs(t.c);
    return s;
}

double TrigObservable::l2_norm() const
{
    double s = 0.0;
    for (const auto& t : terms_)
        s += std::norm(t.c);
    return std::sqrt(s);
}

std::vector<std::complex<double>> torus_truncated_average(const TorusSystem& sys,
                                                          const std::vector<TrigObservable>& fs,
                                                          const FolnerBox& box,
                                                          const std::vector<std::vector<double>>& samples)
{
    if (fs.size() != sys.d)
        throw DimensionMismatch("expected one trig observable per action");
    for (const auto& f : fs)
        if (f.dimension() != sys.m)
            throw DimensionMismatch("trig observable lives on a torus of another dimension");
    if (box.lengths.size() != sys.r || box.base.size() != sys.r)
        throw DimensionMismatch("box rank differs from r");
    const std::uint64_t volume = box.volume();
    if (volume == 0)
        throw DimensionMismatch("empty box");

    std::vector<std::vector<double>> values(sys.rotations.size());
    for (std::size_t g = 0; g < sys.rotations.size(); ++g)
        for (const auto& a : sys.rotations[g])
            values[g].push_back(a.value());

    return parallel_map<std::complex<double>>(samples.size(), [&](std::size_t s) {
        const auto& t = samples[s];
        if (t.size() != sys.m)
            throw DimensionMismatch("sample point dimension differs from the torus dimension");
        NeumaierSum re, im;
        std::vector<double> point(sys.m);
        for (std::uint64_t k = 0; k < volume; ++k) {
            LatticePoint n = box.point(k);
            std::complex<double> term = 1.0;
            for (std::size_t i = 0; i < sys.d; ++i) {
                for (std::size_t c = 0; c < sys.m; ++c) {
                    double x = t[c];
                    for (std::size_t j = 0; j < sys.r; ++j)
                        x += frac_product(n[j], values[i * sys.r + j][c]);
                    point[c] = frac(x);
                }
                term *= fs[i](point);
            }
            re.add(term.real());
            im.add(term.imag());
        }
        return std::complex<double>(re.value(), im.value()) / static_cast<double>(volume);
    });
}

TrigObservable character_limit(const TorusSystem& sys, const std::vector<TrigObservable>& fs)
{
    if (fs.size() != sys.d)
        throw DimensionMismatch("expected one trig observable per action");
    struct Partial {
        std::vector<std::int64_t> k;
        std::complex<double> c;
        std::vector<Angle> beta; // per axis
    };
    std::vector<Partial> partials{{std::vector<std::int64_t>(sys.m, 0), 1.0, std::vector<Angle>(sys.r)}};
    for (std::size_t i = 0; i < sys.d; ++i) {
        if (fs[i].dimension() != sys.m)
            throw DimensionMismatch("trig observable lives on a torus of another dimension");
        std::vector<Partial> next;
        for (const auto& p : partials)
            for (const auto& term : fs[i].terms()) {
                Partial q = p;
                q.c *= term.c;
                for (std::size_t c = 0; c < sys.m; ++c) {
                    q.k[c] += term.k[c];
                    for (std::size_t j = 0; j < sys.r; ++j)
                        q.beta[j] += sys.rotation(i, j)[c].scaled(term.k[c]);
                }
                next.push_back(std::move(q));
            }
        partials = std::move(next);
    }

    std::vector<TrigTerm> resonant;
    for (const auto& p : partials) {
        bool all_integer = true;
        for (const auto& b : p.beta)
            all_integer = all_integer && b.is_integer();
        if (all_integer)
            resonant.push_back({p.k, p.c});
    }
    return TrigObservable(sys.m, std::move(resonant));
}

std::vector<ConvergenceRow> convergence_table(const TorusSystem& sys, const std::vector<TrigObservable>& fs,
                                              const std::vector<std::uint64_t>& edges,
                                              const std::vector<std::vector<std::int64_t>>& bases,
                                              const std::vector<std::vector<double>>& samples)
{
    TrigObservable limit = character_limit(sys, fs);
    std::vector<ConvergenceRow> rows;
    for (auto n : edges)
        for (const auto& base : bases) {
            FolnerBox box{std::vector<std::uint64_t>(sys.r, n), base};
            auto avg = torus_truncated_average(sys, fs, box, samples);
            for (std::size_t s = 0; s < samples.size(); ++s)
                rows.push_back({n, base, samples[s], std::abs(avg[s] - limit(samples[s]))});
        }
    return rows;
}

double rate_constant(const std::vector<ConvergenceRow>& rows)
{
    double c = 0.0;
    for (const auto& row : rows)
        c = std::max(c, static_cast<double>(row.n) * row.error);
    return c;
}

std::uint64_t common_denominator(const TorusSystem& sys)
{
    mpz_class q = 1;
    for (const auto& v : sys.rotations)
        for (const auto& a : v) {
            if (!a.symbolic_part().empty())
                throw DimensionMismatch("rotation entry is not rational; no finite grid model");
            mpz_lcm(q.get_mpz_t(), q.get_mpz_t(), a.rational_part().get_den_mpz_t());
        }
    if (!q.fits_ulong_p())
        throw Error("common denominator too large");
    return q.get_ui();
}

FiniteSystem to_finite_system(const TorusSystem& sys, const std::string& name)
{
    const std::uint64_t q = common_denominator(sys);
    std::uint64_t states = 1;
    for (std::size_t c = 0; c < sys.m; ++c)
        states *= q;
    if (states > UINT32_MAX)
        throw Error("grid model too large");

    RawSystem raw;
    raw.name = name;
    raw.r = sys.r;
    raw.d = sys.d;
    raw.n = states;
    raw.weights.assign(states, Rational(1) / Rational(static_cast<unsigned long>(states)));
    for (std::size_t i = 0; i < sys.d; ++i)
        for (std::size_t j = 0; j < sys.r; ++j) {
            std::vector<std::uint64_t> step(sys.m);
            for (std::size_t c = 0; c < sys.m; ++c) {
                Rational steps = sys.rotation(i, j)[c].rational_part() * Rational(static_cast<unsigned long>(q));
                mpz_class s = steps.get_num() % mpz_class(static_cast<unsigned long>(q));
                if (s < 0)
                    s += static_cast<unsigned long>(q);
                step[c] = s.get_ui();
            }
            std::vector<State> perm(states);
            for (std::uint64_t idx = 0; idx < states; ++idx) {
                std::uint64_t rest = idx, out = 0, scale = 1;
                for (std::size_t c = sys.m; c-- > 0;) {
                    std::uint64_t a = rest % q;
                    rest /= q;
                    out += ((a + step[c]) % q) * scale;
                    scale *= q;
                }
                perm[idx] = static_cast<State>(out);
            }
            raw.generators.push_back({i, j, std::move(perm)});
        }
    return validate_system(raw);
}

std::vector<std::complex<double>> sample_on_grid(const TrigObservable& f, std::uint64_t q)
{
    std::uint64_t states = 1;
    for (std::size_t c = 0; c < f.dimension(); ++c)
        states *= q;
    std::vector<std::complex<double>> out(states);
    std::vector<double> t(f.dimension());
    for (std::uint64_t idx = 0; idx < states; ++idx) {
        std::uint64_t rest = idx;
        for (std::size_t c = f.dimension(); c-- > 0;) {
            t[c] = static_cast<double>(rest % q) / static_cast<double>(q);
            rest /= q;
        }
        out[idx] = f(t);
    }
    return out;
}

} // namespace ergo
