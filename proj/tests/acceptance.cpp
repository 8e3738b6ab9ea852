// Acceptance gate: one PASS/FAIL line per criterion. Tolerances and time
// limits below are fixed; a criterion fails if either is exceeded.

#include "oracle.hpp"

#include "ergo/averages.hpp"
#include "ergo/cli.hpp"
#include "ergo/extensions.hpp"
#include "ergo/joinings.hpp"
#include "ergo/parallel.hpp"
#include "ergo/torus.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

using namespace ergo;
using oracle::frac;

namespace {

constexpr double kTorusTolerance = 1e-12;

struct Outcome {
    bool pass;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double seconds;
    std::function<Outcome()> run;
};

std::vector<std::int64_t> random_base(oracle::Fuzz& fz, std::size_t r, std::int64_t span)
{
    std::vector<std::int64_t> b(r);
    for (auto& a : b)
        a = fz.integer(-span, span);
    return b;
}

FolnerBox random_box(oracle::Fuzz& fz, const PeriodBox& p)
{
    FolnerBox box{std::vector<std::uint64_t>(p.periods.size()), random_base(fz, p.periods.size(), 1000)};
    for (std::size_t j = 0; j < box.lengths.size(); ++j)
        box.lengths[j] = static_cast<std::uint64_t>(fz.integer(1, 3 * static_cast<std::int64_t>(p.periods[j])));
    return box;
}

Outcome torus_counterexample()
{
    auto sc = load_scenario(oracle::scenario_dir() / "torus-double-rotation.json");
    auto fs = resolve_trig_tuple(sc);
    oracle::Fuzz fz(1);
    std::vector<std::vector<std::int64_t>> bases{{0}};
    for (int t = 0; t < 20; ++t)
        bases.push_back(random_base(fz, 1, 1'000'000));
    std::vector<std::vector<double>> samples = sc.samples;
    for (int t = 0; t < 10; ++t)
        samples.push_back({static_cast<double>(fz.raw() >> 11) * 0x1.0p-53});
    double worst = 0;
    for (const auto& base : bases)
        for (std::uint64_t n = 1; n <= 64; ++n) {
            auto avg = torus_truncated_average(*sc.torus, fs, FolnerBox{{n}, base}, samples);
            for (std::size_t s = 0; s < samples.size(); ++s)
                worst = std::max(worst, std::abs(avg[s] - std::conj(fs[1](samples[s]))));
        }
    char buf[96];
    std::snprintf(buf, sizeof buf, "max |avg - conj(f2)| = %.3g over N=1..64, %zu bases, %zu samples", worst,
                  bases.size(), samples.size());
    return {worst <= kTorusTolerance, buf};
}

Outcome cyclic_counterexample()
{
    auto five = oracle::finite_corpus();
    auto it = std::find_if(five.begin(), five.end(), [](const auto& c) { return c.name == "cyclic-5"; });
    if (it == five.end())
        return {false, "cyclic-5 scenario missing"};
    auto base = is_pleasant(it->system);
    auto stage = one_step_extension(it->system);
    auto ext = is_pleasant(stage.system);
    bool ok = !base.pleasant && base.defect.squared() > 0 && base.witness && stage.system.n() == 25 &&
              ext.pleasant && ext.defect.is_zero();
    return {ok, "base defect " + base.defect.to_string() + ", extension (" + std::to_string(stage.system.n()) +
                    " states) defect " + ext.defect.to_string()};
}

Outcome joining_properties()
{
    oracle::Fuzz fz(3);
    std::size_t scenarios = 0;
    for (const auto& c : oracle::finite_corpus()) {
        auto jm = furstenberg_joining(c.system);
        if (!jm.marginals_match_base() || jm.total_mass() != 1)
            return {false, c.name + ": marginal differs from the base measure"};
        for (std::size_t i = 0; i <= c.system.d(); ++i)
            if (!jm.invariant_under(jm.action("S" + std::to_string(i + 1))))
                return {false, c.name + ": not invariant under S" + std::to_string(i + 1)};
        for (int t = 0; t < 20; ++t)
            if (!(furstenberg_joining(c.system, random_base(fz, c.system.r(), 1000)) == jm))
                return {false, c.name + ": joining depends on the base shift"};
        ++scenarios;
    }
    return {scenarios > 0, std::to_string(scenarios) + " scenarios, 20 shifts each"};
}

Outcome deviation_bounds()
{
    oracle::Fuzz fz(4);
    std::size_t boxes = 0, full = 0;
    for (const auto& c : oracle::finite_corpus()) {
        auto p = period_box(c.system);
        auto limit = exact_limit(c.system, c.fs);
        for (int t = 0; t < 20; ++t) {
            auto base = random_base(fz, c.system.r(), 1000);
            std::vector<FolnerBox> seq;
            for (std::uint64_t k = 1; k <= 4; ++k) {
                FolnerBox b{std::vector<std::uint64_t>(c.system.r()), base};
                for (std::size_t j = 0; j < b.lengths.size(); ++j)
                    b.lengths[j] = k * p.periods[j] + static_cast<std::uint64_t>(fz.integer(0, 1)) *
                                                          static_cast<std::uint64_t>(fz.integer(1, 5));
                seq.push_back(b);
            }
            seq.push_back(FolnerBox::full_period(p, base));
            for (const auto& b : seq) {
                auto rep = average_report(c.system, c.fs, b);
                ++boxes;
                if (!rep.within_bound())
                    return {false, c.name + ": deviation above bound"};
                bool multiple = true;
                for (std::size_t j = 0; j < b.lengths.size(); ++j)
                    multiple = multiple && b.lengths[j] % p.periods[j] == 0;
                if (multiple) {
                    ++full;
                    if (!(rep.truncated == limit))
                        return {false, c.name + ": full-period average differs from the limit"};
                }
            }
        }
    }
    return {full > 0, std::to_string(boxes) + " boxes, " + std::to_string(full) + " period multiples"};
}

Outcome contractive()
{
    oracle::Fuzz fz(5);
    std::size_t n = 0;
    for (const auto& c : oracle::finite_corpus()) {
        auto p = period_box(c.system);
        for (int t = 0; t < 500; ++t) {
            auto chk = contractive_check(c.system, fz.tuple(c.system.n(), c.system.d()), random_box(fz, p));
            if (!chk.holds)
                return {false, c.name + ": inequality fails"};
            ++n;
        }
    }
    return {true, std::to_string(n) + " fuzzed tuples"};
}

Outcome vdc_identity()
{
    oracle::Fuzz fz(6);
    std::size_t n = 0;
    for (const auto& c : oracle::finite_corpus()) {
        if (!vdc_identity_check(c.system, c.fs).holds)
            return {false, c.name + ": identity fails on the scenario tuple"};
        for (int t = 0; t < 100; ++t, ++n)
            if (!vdc_identity_check(c.system, fz.tuple(c.system.n(), c.system.d())).holds)
                return {false, c.name + ": identity fails on a fuzzed tuple"};
    }
    return {true, std::to_string(n) + " fuzzed tuples plus scenario tuples"};
}

Outcome joining_control()
{
    oracle::Fuzz fz(7);
    std::size_t checked = 0, vanishing = 0;
    auto probe = [&](const FiniteSystem& sys, const Observable& f1, const std::string& name) -> std::optional<Outcome> {
        auto r = vdc_condition_check(sys, f1);
        ++checked;
        if (r.integrals_vanish) {
            ++vanishing;
            if (!r.conclusion_holds)
                return Outcome{false, name + ": integrals vanish but a basis limit does not"};
        }
        return std::nullopt;
    };
    for (const auto& c : oracle::finite_corpus()) {
        if (c.system.d() < 2)
            continue;
        std::vector<const FiniteSystem*> systems{&c.system};
        auto stage = one_step_extension(c.system);
        systems.push_back(&stage.system);
        for (const auto* sys : systems) {
            auto xi = pleasant_factor(*sys);
            std::vector<Observable> f1s{Observable::constant(sys->n(), 0), Observable::constant(sys->n(), 1)};
            if (sys == &c.system)
                f1s.push_back(c.fs.front());
            for (int t = 0; t < 4; ++t) {
                auto g = fz.observable(sys->n());
                f1s.push_back(g);
                f1s.push_back(g - cond_expect(*sys, g, xi));
            }
            for (const auto& f1 : f1s)
                if (auto bad = probe(*sys, f1, sys->name()))
                    return *bad;
        }
    }
    return {vanishing > 0, std::to_string(checked) + " checks, " + std::to_string(vanishing) +
                               " with vanishing integrals, no counterexample"};
}

Outcome pleasant_reduction()
{
    auto five = oracle::cyclic(5, {1, 2});
    auto ext = one_step_extension(five).system;
    if (!is_pleasant(ext).pleasant)
        return {false, "extension is not pleasant"};
    auto parts = pleasant_constituents(ext);
    oracle::Fuzz fz(8);
    for (int t = 0; t < 100; ++t) {
        auto tuples = pleasant_decompose(ext, fz.observable(ext.n()), parts);
        auto red = reduce_pleasant_limit(ext, tuples, {fz.observable(ext.n())});
        if (!red.equal)
            return {false, "reduced and direct limits differ"};
    }
    return {true, "100 fuzzed decomposable inputs on " + std::to_string(ext.n()) + " states"};
}

Outcome host_kra()
{
    std::set<std::size_t> ds;
    for (const auto& c : oracle::finite_corpus()) {
        auto tower = host_kra_tower(c.system);
        for (const auto& st : tower)
            if (!st.marginals_match_base() || st.total_mass() != 1)
                return {false, c.name + ": a stage marginal differs from the base measure"};
        if (!host_kra_closed_form_holds(c.system, tower.back()))
            return {false, c.name + ": top-stage T1 differs from its closed form"};
        ds.insert(c.system.d());
        if (c.name == "cyclic-5") {
            for (State x = 0; x < 5; ++x)
                for (State y = 0; y < 5; ++y)
                    if (tower[0].mass_of({x, y}) != frac(1, 25))
                        return {false, "first stage of cyclic-5 is not the product measure"};
        }
    }
    bool all_d = ds.count(1) && ds.count(2) && ds.count(3);
    return {all_d, "closed form verified for d in {1,2,3}"};
}

Outcome determinism()
{
    std::size_t reports = 0;
    for (const auto& p : oracle::scenario_files()) {
        auto sc = load_scenario(p);
        std::vector<std::string> cmds = sc.engine == "torus"
                                            ? std::vector<std::string>{"validate", "torus-demo"}
                                            : std::vector<std::string>{"validate", "avg", "limit", "joining",
                                                                       "hk", "extend", "pleasant"};
        for (const auto& cmd : cmds) {
            std::string outs[3];
            const char* threads[3] = {"1", "1", "8"};
            for (int k = 0; k < 3; ++k) {
                std::ostringstream out, err;
                int code = run_cli({cmd, "--scenario", p.string(), "--threads", threads[k]}, out, err);
                if (code != 0)
                    return {false, cmd + " on " + p.filename().string() + " exited " + std::to_string(code)};
                outs[k] = out.str();
            }
            if (outs[0] != outs[1] || outs[0] != outs[2])
                return {false, cmd + " on " + p.filename().string() + " is not byte-identical"};
            ++reports;
        }
    }
    set_worker_count(1);
    return {true, std::to_string(reports) + " reports identical across 2 runs and 1 vs 8 threads"};
}

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "torus counterexample averages equal conj(f2)", 1.0, torus_counterexample},
        {2, "cyclic-5 not pleasant, one-step extension pleasant", 10.0, cyclic_counterexample},
        {3, "Furstenberg joining marginals, invariance, shift independence", 30.0, joining_properties},
        {4, "box averages within deviation bound, exact at period multiples", 30.0, deviation_bounds},
        {5, "contractive inequality on fuzzed tuples", 60.0, contractive},
        {6, "van der Corput identity exact", 60.0, vdc_identity},
        {7, "joining control conclusion whenever integrals vanish", 60.0, joining_control},
        {8, "pleasant-factor reduction two-sided equality", 60.0, pleasant_reduction},
        {9, "Host-Kra tower closed form and marginals", 60.0, host_kra},
        {10, "report determinism across runs and thread counts", 120.0, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool pass = o.pass && secs < c.seconds;
        failures += !pass;
        std::printf("%s %2d %s [%.2fs < %.0fs] %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, c.seconds,
                    o.detail.c_str());
    }
    return failures == 0 ? 0 : 1;
}
